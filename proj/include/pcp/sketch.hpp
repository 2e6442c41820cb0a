#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "pcp/linalg.hpp"
#include "pcp/matrix.hpp"

namespace pcp {

enum class SketchMethod {
  Gaussian,
  NonOblivious,
  LeverageResidual,
  RidgeLeverage,
  Svd,
  /// Haar orthogonal d x d operator; lossless, used to exercise the audit.
  Orthogonal,
  /// S = I_d.
  Identity,
};

std::string_view to_string(SketchMethod method) noexcept;
/// Accepts the canonical names plus the short aliases used by the CLI
/// ("ridge", "leverage", "nonoblivious", ...). Throws ConfigError otherwise.
SketchMethod parse_sketch_method(std::string_view name);

/// Default value of the width constant for each method. These are calibrated
/// desk-scale values; the underlying guarantees only promise "some universal
/// constant".
double default_const_c(SketchMethod method) noexcept;

struct SketchParams {
  long k = 1;
  double eps = 0.5;
  double delta = 0.1;
  /// Width constant; unset means default_const_c(method).
  std::optional<double> const_c;
  std::uint64_t seed = 0;
  std::optional<std::size_t> m_override;

  /// Throws InvalidInput unless 0 < eps < 1, 0 < delta < 1, k ≥ 1, const_c > 0
  /// and m_override (if set) ≥ 1.
  void validate() const;
  double const_for(SketchMethod method) const;
};

/// Column sampling operator: column j of S is weights[j] · e_{indices[j]}.
struct SamplingPattern {
  std::vector<std::size_t> indices;
  std::vector<double> weights;
  std::vector<double> probs;  ///< full distribution over the d columns

  std::size_t d() const noexcept { return probs.size(); }
  std::size_t m() const noexcept { return indices.size(); }
  /// Dense d x m materialization.
  Matrix dense() const;
};

struct Sketch {
  Matrix a_tilde;
  std::variant<Matrix, SamplingPattern> op;
  double c_const = 0.0;
  SketchMethod method = SketchMethod::Gaussian;
  SketchParams params;
  std::size_t m = 0;
  /// Set when m ≥ d: the sketch was still built but does not compress.
  bool width_not_reducing = false;

  /// S as a dense d x m matrix regardless of how it is stored.
  Matrix operator_matrix() const;
};

struct RidgeScores {
  std::vector<double> tau;
  double lambda = 0.0;
  double sum_tau = 0.0;
};

/// ⌈x⌉ that ignores floating-point noise just above an integer.
std::size_t ceil_width(double x) noexcept;

/// ln(k/δ), floored at 1.
double log_k_over_delta(long k, double delta) noexcept;

std::size_t gaussian_width(const SketchParams& params);
std::size_t non_oblivious_width(const SketchParams& params);
std::size_t leverage_residual_width(const SketchParams& params);
std::size_t ridge_width(const SketchParams& params, double sum_tau_over);
std::size_t svd_width(const SketchParams& params);

/// Ã = AS with S_ij i.i.d. N(0, 1)/√m.
Sketch gaussian_sketch(const Matrix& a, const SketchParams& params);

/// Ã = AZ where Z is an orthonormal basis for the row space of ΠA and Π is an
/// m' x n Gaussian matrix.
Sketch non_oblivious_rp(const Matrix& a, const SketchParams& params);

/// Mixed column-leverage and residual-norm sampling probabilities over the d
/// columns of A. Falls back to pure leverage when A has rank ≤ k.
std::vector<double> leverage_residual_probs(const Matrix& a, long k);
Sketch leverage_residual_sample(const Matrix& a, const SketchParams& params);

/// λ-ridge leverage scores of the columns with λ = ‖A − A_k‖²_F / k.
RidgeScores ridge_scores(const Matrix& a, long k);

/// Samples t columns with probability proportional to `tau_over` (or the exact
/// ridge scores when absent). Throws InvalidOverestimate if any supplied
/// overestimate is below the true score by more than 1e-10.
Sketch ridge_leverage_sample(const Matrix& a, const SketchParams& params,
                             std::optional<std::span<const double>> tau_over = std::nullopt);

/// Ã = A·V_m = U_m Σ_m with c = ‖A − A_m‖²_F. Widths beyond rank(A) are
/// padded with zero columns.
Sketch svd_sketch(const Matrix& a, const SketchParams& params);

Sketch orthogonal_sketch(const Matrix& a, std::uint64_t seed);
Sketch identity_sketch(const Matrix& a);

/// Dispatches on `method`.
Sketch build_sketch(const Matrix& a, SketchMethod method, const SketchParams& params);

/// m i.i.d. draws from `probs` by inverse CDF. A draw u ∈ [0,1) selects the
/// lowest index whose cumulative mass exceeds u·total, so zero-probability
/// columns are never chosen.
std::vector<std::size_t> sample_indices(std::span<const double> probs, std::size_t m,
                                        std::uint64_t seed);

}  // namespace pcp

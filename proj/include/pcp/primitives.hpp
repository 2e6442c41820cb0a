#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pcp/matrix.hpp"

namespace pcp {

/// Worst case over x with xᵀM ≠ 0 of |‖xᵀM‖² − ‖xᵀMS‖²| / ‖xᵀM‖², evaluated
/// exactly as ‖VᵀSSᵀV − I‖₂ with V an orthonormal basis of M's row space.
/// Throws ZeroMatrix for M = 0 and DimensionError if S.rows() ≠ M.cols().
double subspace_embedding_error(const Matrix& m, const Matrix& s);

/// The exact value above together with a vector x ∈ ℝⁿ attaining it.
struct EmbeddingWitness {
  double error = 0.0;
  std::vector<double> x;
};
EmbeddingWitness subspace_embedding_witness(const Matrix& m, const Matrix& s);

/// ‖MN − MSSᵀN‖_F / (‖M‖_F‖N‖_F); 0 when M or N vanishes.
double amm_error(const Matrix& m, const Matrix& n, const Matrix& s);

/// |‖M‖²_F − ‖MS‖²_F| / ‖M‖²_F; 0 when M vanishes.
double frobenius_preservation_error(const Matrix& m, const Matrix& s);

/// Smallest ε' ≥ 0 with (1−ε')AAᵀ − λI ⪯ ASSᵀAᵀ ⪯ (1+ε')AAᵀ + λI.
///
/// In the left singular basis of A the sandwich reads ±E ⪯ ε'I + λΣ⁻² with
/// E = VᵀSSᵀV − I, so ε' = max(0, λ_max(E − λΣ⁻²), λ_max(−E − λΣ⁻²)).
/// Directions outside col(A) never bind because λ ≥ 0.
double spectral_approx_error(const Matrix& a, const Matrix& s, double lambda);

enum class Theorem { MatrixApprox, SpectralApprox };
std::string_view to_string(Theorem t) noexcept;

struct Condition {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool holds() const noexcept { return measured <= threshold + 1e-12; }
};

/// Measured sufficient-condition errors against their thresholds.
struct Certificate {
  Theorem theorem = Theorem::MatrixApprox;
  std::vector<Condition> conditions;
  /// Ridge parameter of the spectral sandwich (spectral certificate only).
  double lambda_used = 0.0;
  /// Tail index of the spectral certificate.
  std::size_t p_used = 0;
  bool holds = false;

  const Condition& condition(std::string_view name) const;
};

/// Conditions: se_err ≤ ε/3, amm_tail_tail ≤ ε/(6√k), amm_tail_vk ≤ ε/(6√k),
/// frob_tail ≤ ε/6.
Certificate certify_theorem1(const Matrix& a, const Matrix& s, long k, double eps);

/// Conditions: spectral_eps ≤ ε/24 with λ = ε‖A−A_k‖²_F/(24k), and
/// frob_tail_p ≤ (ε/12)·‖A−A_k‖²_F/‖A−A_p‖²_F (unbounded when A_{\p} = 0).
Certificate certify_theorem2(const Matrix& a, const Matrix& s, long k, double eps);

enum class JlFamily { Gaussian };
/// Throws Unsupported for families whose moments depend on the test vector.
JlFamily parse_jl_family(std::string_view name);

struct JlMomentEstimate {
  int ell = 2;
  std::size_t trials = 0;
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo mean of |‖xᵀS‖² − 1|^ℓ for x = e₁ over independently seeded S
/// (S_ij ~ N(0, 1/m)). Only the row of S that x touches is drawn; trial t uses
/// stream derive_seed(seed, t).
JlMomentEstimate jl_moment_estimate(JlFamily family, std::size_t d, std::size_t m, int ell,
                                    std::size_t trials, std::uint64_t seed);

}  // namespace pcp

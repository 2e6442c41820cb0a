#include "pcp/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pcp/error.hpp"
#include "pcp/linalg.hpp"
#include "pcp/random.hpp"

namespace pcp {

namespace {

void require_sketch_rows(const Matrix& m, const Matrix& s, const char* who) {
  if (s.rows() != m.cols()) {
    throw DimensionError(std::string(who) + ": sketch has " + std::to_string(s.rows()) +
                         " rows, matrix has " + std::to_string(m.cols()) + " columns");
  }
}

/// VᵀSSᵀV − I for orthonormal V (d x r).
Matrix embedding_gap(const Matrix& v, const Matrix& s) {
  const Matrix stv = matmul_tn(s, v);
  Matrix e = matmul_tn(stv, stv);
  for (std::size_t i = 0; i < e.rows(); ++i) e(i, i) -= 1.0;
  return e;
}

}  // namespace

EmbeddingWitness subspace_embedding_witness(const Matrix& m, const Matrix& s) {
  require_sketch_rows(m, s, "subspace_embedding_error");
  if (max_abs(m) == 0.0) throw ZeroMatrix("subspace embedding error is undefined for M = 0");
  const SvdFactorization f = svd(m);
  const SymmetricEigen eig = sym_eig(embedding_gap(f.v, s));
  // Extreme eigenvalues sit at either end of the descending spectrum.
  const std::size_t r = f.rank;
  const std::size_t at = std::abs(eig.values.front()) >= std::abs(eig.values.back()) ? 0 : r - 1;
  EmbeddingWitness w;
  w.error = std::abs(eig.values[at]);
  // xᵀM = zᵀVᵀ requires x = UΣ⁻¹z.
  w.x.assign(m.rows(), 0.0);
  for (std::size_t j = 0; j < r; ++j) {
    const double coef = eig.vectors(j, at) / f.sigma[j];
    for (std::size_t i = 0; i < m.rows(); ++i) w.x[i] += coef * f.u(i, j);
  }
  return w;
}

double subspace_embedding_error(const Matrix& m, const Matrix& s) {
  return subspace_embedding_witness(m, s).error;
}

double amm_error(const Matrix& m, const Matrix& n, const Matrix& s) {
  if (m.cols() != n.rows()) throw DimensionError("amm_error: inner dimensions differ");
  require_sketch_rows(m, s, "amm_error");
  const double scale = frobenius_norm(m) * frobenius_norm(n);
  if (scale == 0.0) return 0.0;
  const Matrix exact = matmul(m, n);
  const Matrix approx = matmul(matmul(m, s), matmul_tn(s, n));
  return frobenius_norm(exact - approx) / scale;
}

double frobenius_preservation_error(const Matrix& m, const Matrix& s) {
  require_sketch_rows(m, s, "frobenius_preservation_error");
  const double base = frobenius_norm_sq(m);
  if (base == 0.0) return 0.0;
  return std::abs(base - frobenius_norm_sq(matmul(m, s))) / base;
}

double spectral_approx_error(const Matrix& a, const Matrix& s, double lambda) {
  require_sketch_rows(a, s, "spectral_approx_error");
  if (!(lambda >= 0.0)) throw InvalidInput("lambda must be non-negative");
  if (max_abs(a) == 0.0) throw ZeroMatrix("spectral approximation error is undefined for A = 0");
  const SvdFactorization f = svd(a);
  const Matrix e = embedding_gap(f.v, s);
  const std::size_t r = f.rank;
  Matrix upper(r, r);
  Matrix lower(r, r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      upper(i, j) = e(i, j);
      lower(i, j) = -e(i, j);
    }
    const double shift = lambda / (f.sigma[i] * f.sigma[i]);
    upper(i, i) -= shift;
    lower(i, i) -= shift;
  }
  const double hi = sym_eig(upper).values.front();
  const double lo = sym_eig(lower).values.front();
  return std::max({0.0, hi, lo});
}

std::string_view to_string(Theorem t) noexcept {
  return t == Theorem::MatrixApprox ? "T1" : "T2";
}

const Condition& Certificate::condition(std::string_view name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw InvalidInput("certificate has no condition '" + std::string(name) + "'");
}

namespace {

void require_cert_args(const Matrix& a, const Matrix& s, long k, double eps) {
  require_input(a);
  require_sketch_rows(a, s, "certificate");
  if (k < 1) throw InvalidRank("k must be at least 1");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0, 1)");
}

bool all_hold(const std::vector<Condition>& conds) {
  return std::all_of(conds.begin(), conds.end(), [](const Condition& c) { return c.holds(); });
}

}  // namespace

Certificate certify_theorem1(const Matrix& a, const Matrix& s, long k, double eps) {
  require_cert_args(a, s, k, eps);
  const SvdFactorization f = svd(a);
  const HeadTailSplit split = head_tail_split(f, a, k);
  const bool tail_zero = f.rank <= static_cast<std::size_t>(k);
  const double amm_thr = eps / (6.0 * std::sqrt(static_cast<double>(k)));

  Certificate cert;
  cert.theorem = Theorem::MatrixApprox;
  const double se = max_abs(split.head) == 0.0 ? 0.0 : subspace_embedding_error(split.head, s);
  const Matrix tail_t = transpose(split.tail);
  cert.conditions = {
      {"se_err", se, eps / 3.0},
      {"amm_tail_tail", tail_zero ? 0.0 : amm_error(split.tail, tail_t, s), amm_thr},
      {"amm_tail_vk", tail_zero ? 0.0 : amm_error(split.tail, split.v_r, s), amm_thr},
      {"frob_tail", tail_zero ? 0.0 : frobenius_preservation_error(split.tail, s), eps / 6.0},
  };
  cert.holds = all_hold(cert.conditions);
  return cert;
}

Certificate certify_theorem2(const Matrix& a, const Matrix& s, long k, double eps) {
  require_cert_args(a, s, k, eps);
  const SvdFactorization f = svd(a);
  const auto kk = static_cast<std::size_t>(k);
  const double tail_k = f.tail_energy(kk);
  const double lambda = eps * tail_k / (24.0 * static_cast<double>(k));
  const std::size_t p = tail_index_p(f, k);
  const double tail_p = f.tail_energy(p);

  Certificate cert;
  cert.theorem = Theorem::SpectralApprox;
  cert.lambda_used = lambda;
  cert.p_used = p;
  double frob_p = 0.0;
  double frob_thr = std::numeric_limits<double>::infinity();
  if (p < f.rank) {
    const HeadTailSplit split = head_tail_split(f, a, static_cast<long>(p));
    frob_p = frobenius_preservation_error(split.tail, s);
    frob_thr = (eps / 12.0) * tail_k / tail_p;
  }
  cert.conditions = {
      {"spectral_eps", spectral_approx_error(a, s, lambda), eps / 24.0},
      {"frob_tail_p", frob_p, frob_thr},
  };
  cert.holds = all_hold(cert.conditions);
  return cert;
}

JlFamily parse_jl_family(std::string_view name) {
  if (name == "gaussian") return JlFamily::Gaussian;
  throw Unsupported("JL moment estimation supports rotation-invariant families only; got '" +
                    std::string(name) + "'");
}

JlMomentEstimate jl_moment_estimate(JlFamily family, std::size_t d, std::size_t m, int ell,
                                    std::size_t trials, std::uint64_t seed) {
  if (family != JlFamily::Gaussian) throw Unsupported("unsupported JL family");
  if (ell < 2) throw InvalidInput("moment order must be at least 2");
  if (trials < 100) throw InvalidInput("at least 100 trials are required");
  if (d < 1 || m < 1) throw InvalidInput("d and m must be positive");

  const double inv_m = 1.0 / static_cast<double>(m);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(derive_seed(seed, t));
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double g = rng.normal();
      norm_sq += g * g;
    }
    const double dev = std::pow(std::abs(norm_sq * inv_m - 1.0), ell);
    sum += dev;
    sum_sq += dev * dev;
  }
  const double n = static_cast<double>(trials);
  JlMomentEstimate out;
  out.ell = ell;
  out.trials = trials;
  out.estimate = sum / n;
  const double var = std::max(0.0, (sum_sq - n * out.estimate * out.estimate) / (n - 1.0));
  out.std_error = std::sqrt(var / n);
  return out;
}

}  // namespace pcp

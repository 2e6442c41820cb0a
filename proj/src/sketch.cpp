#include "pcp/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcp/error.hpp"
#include "pcp/random.hpp"

namespace pcp {

std::string_view to_string(SketchMethod method) noexcept {
  switch (method) {
    case SketchMethod::Gaussian: return "gaussian";
    case SketchMethod::NonOblivious: return "non-oblivious";
    case SketchMethod::LeverageResidual: return "leverage-residual";
    case SketchMethod::RidgeLeverage: return "ridge-leverage";
    case SketchMethod::Svd: return "svd";
    case SketchMethod::Orthogonal: return "orthogonal";
    case SketchMethod::Identity: return "identity";
  }
  return "gaussian";
}

SketchMethod parse_sketch_method(std::string_view name) {
  if (name == "gaussian" || name == "dense") return SketchMethod::Gaussian;
  if (name == "non-oblivious" || name == "nonoblivious" || name == "non_oblivious")
    return SketchMethod::NonOblivious;
  if (name == "leverage-residual" || name == "leverage" || name == "leverage_residual")
    return SketchMethod::LeverageResidual;
  if (name == "ridge-leverage" || name == "ridge" || name == "ridge_leverage")
    return SketchMethod::RidgeLeverage;
  if (name == "svd") return SketchMethod::Svd;
  if (name == "orthogonal") return SketchMethod::Orthogonal;
  if (name == "identity") return SketchMethod::Identity;
  throw ConfigError("unknown sketch method '" + std::string(name) + "'");
}

double default_const_c(SketchMethod method) noexcept {
  switch (method) {
    case SketchMethod::Gaussian: return 8.0;
    case SketchMethod::NonOblivious: return 4.0;
    case SketchMethod::LeverageResidual: return 16.0;
    case SketchMethod::RidgeLeverage: return 16.0;
    default: return 1.0;
  }
}

void SketchParams::validate() const {
  if (k < 1) throw InvalidInput("k must be at least 1");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
  if (const_c && !(*const_c > 0.0 && std::isfinite(*const_c))) {
    throw InvalidInput("const_c must be positive");
  }
  if (m_override && *m_override == 0) throw InvalidInput("explicit sketch width must be positive");
}

double SketchParams::const_for(SketchMethod method) const {
  return const_c.value_or(default_const_c(method));
}

Matrix SamplingPattern::dense() const {
  Matrix s(d(), m());
  for (std::size_t j = 0; j < m(); ++j) s(indices[j], j) = weights[j];
  return s;
}

Matrix Sketch::operator_matrix() const {
  if (const auto* dense = std::get_if<Matrix>(&op)) return *dense;
  return std::get<SamplingPattern>(op).dense();
}

std::size_t ceil_width(double x) noexcept {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(x));
}

double log_k_over_delta(long k, double delta) noexcept {
  return std::max(1.0, std::log(static_cast<double>(k) / delta));
}

std::size_t gaussian_width(const SketchParams& params) {
  if (params.m_override) return *params.m_override;
  const double c = params.const_for(SketchMethod::Gaussian);
  return std::max<std::size_t>(
      1, ceil_width(c * (static_cast<double>(params.k) + std::log(1.0 / params.delta)) /
                    (params.eps * params.eps)));
}

std::size_t non_oblivious_width(const SketchParams& params) {
  if (params.m_override) return *params.m_override;
  const double c = params.const_for(SketchMethod::NonOblivious);
  return std::max<std::size_t>(1, ceil_width(c * static_cast<double>(params.k) / params.eps));
}

std::size_t leverage_residual_width(const SketchParams& params) {
  if (params.m_override) return *params.m_override;
  const double c = params.const_for(SketchMethod::LeverageResidual);
  return std::max<std::size_t>(
      1, ceil_width(c * static_cast<double>(params.k) * log_k_over_delta(params.k, params.delta) /
                    (params.eps * params.eps)));
}

std::size_t ridge_width(const SketchParams& params, double sum_tau_over) {
  if (params.m_override) return *params.m_override;
  const double c = params.const_for(SketchMethod::RidgeLeverage);
  return std::max<std::size_t>(
      1, ceil_width(c * log_k_over_delta(params.k, params.delta) / (params.eps * params.eps) *
                    sum_tau_over));
}

std::size_t svd_width(const SketchParams& params) {
  if (params.m_override) return *params.m_override;
  return std::max<std::size_t>(1, ceil_width(static_cast<double>(params.k) / params.eps));
}

std::vector<std::size_t> sample_indices(std::span<const double> probs, std::size_t m,
                                        std::uint64_t seed) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  std::size_t last_positive = probs.size();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0)) throw InvalidInput("sampling probabilities must be non-negative");
    if (probs[i] > 0.0) last_positive = i;
    acc += probs[i];
    cdf[i] = acc;
  }
  if (last_positive == probs.size()) throw InvalidInput("sampling distribution has no mass");

  CounterRng rng(seed);
  std::vector<std::size_t> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
    out[j] = std::min(idx, last_positive);
  }
  return out;
}

namespace {

Sketch finish_dense(const Matrix& a, Matrix s, SketchMethod method, const SketchParams& params,
                    double c_const) {
  Sketch sk;
  sk.a_tilde = matmul(a, s);
  sk.m = s.cols();
  sk.op = std::move(s);
  sk.c_const = c_const;
  sk.method = method;
  sk.params = params;
  sk.width_not_reducing = sk.m >= a.cols();
  return sk;
}

Sketch finish_sampled(const Matrix& a, std::vector<double> probs, std::size_t m,
                      SketchMethod method, const SketchParams& params) {
  SamplingPattern pattern;
  pattern.indices = sample_indices(probs, m, params.seed);
  pattern.weights.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    pattern.weights[j] = 1.0 / std::sqrt(static_cast<double>(m) * probs[pattern.indices[j]]);
  }
  pattern.probs = std::move(probs);

  Sketch sk;
  sk.a_tilde = Matrix(a.rows(), m);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < m; ++j)
      sk.a_tilde(i, j) = pattern.weights[j] * a(i, pattern.indices[j]);
  sk.op = std::move(pattern);
  sk.m = m;
  sk.c_const = 0.0;
  sk.method = method;
  sk.params = params;
  sk.width_not_reducing = m >= a.cols();
  return sk;
}

}  // namespace

Sketch gaussian_sketch(const Matrix& a, const SketchParams& params) {
  require_input(a);
  params.validate();
  const std::size_t m = gaussian_width(params);
  CounterRng rng(params.seed);
  Matrix s = gaussian_matrix(a.cols(), m, rng);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (double& x : s.data()) x *= scale;
  return finish_dense(a, std::move(s), SketchMethod::Gaussian, params, 0.0);
}

Sketch non_oblivious_rp(const Matrix& a, const SketchParams& params) {
  require_input(a);
  params.validate();
  const std::size_t width = non_oblivious_width(params);
  CounterRng rng(params.seed);
  const Matrix pi = gaussian_matrix(width, a.rows(), rng);
  const Matrix pia = matmul(pi, a);
  if (max_abs(pia) == 0.0) throw ZeroMatrix("non_oblivious_rp: sketched matrix is zero");
  Matrix z = svd(pia).v;
  return finish_dense(a, std::move(z), SketchMethod::NonOblivious, params, 0.0);
}

std::vector<double> leverage_residual_probs(const Matrix& a, long k) {
  require_input(a);
  if (k < 1) throw InvalidRank("k must be at least 1");
  const SvdFactorization fact = svd(a);
  if (fact.rank == 0) throw ZeroMatrix("leverage_residual_probs: A is zero");
  const std::size_t d = a.cols();
  const std::size_t kept = std::min<std::size_t>(static_cast<std::size_t>(k), fact.rank);

  std::vector<double> lev(d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < kept; ++j) lev[i] += fact.v(i, j) * fact.v(i, j);

  std::vector<double> probs(d);
  if (fact.tail_energy(kept) == 0.0) {
    for (std::size_t i = 0; i < d; ++i) probs[i] = lev[i] / static_cast<double>(kept);
    return probs;
  }
  const Matrix tail = head_tail_split(fact, a, k).tail;
  std::vector<double> res(d, 0.0);
  double res_total = 0.0;
  for (std::size_t r = 0; r < tail.rows(); ++r)
    for (std::size_t i = 0; i < d; ++i) res[i] += tail(r, i) * tail(r, i);
  for (double x : res) res_total += x;
  const double kk = static_cast<double>(kept);
  for (std::size_t i = 0; i < d; ++i) {
    probs[i] = lev[i] / (2.0 * kk) + (res_total > 0.0 ? res[i] / (2.0 * res_total) : 0.0);
  }
  return probs;
}

Sketch leverage_residual_sample(const Matrix& a, const SketchParams& params) {
  require_input(a);
  params.validate();
  if (a.cols() < 2) throw InvalidInput("leverage_residual_sample: need at least 2 columns");
  return finish_sampled(a, leverage_residual_probs(a, params.k), leverage_residual_width(params),
                        SketchMethod::LeverageResidual, params);
}

RidgeScores ridge_scores(const Matrix& a, long k) {
  require_input(a);
  if (k < 1) throw InvalidRank("k must be at least 1");
  const SvdFactorization fact = svd(a);
  RidgeScores out;
  out.lambda = fact.tail_energy(static_cast<std::size_t>(k)) / static_cast<double>(k);
  out.tau.assign(a.cols(), 0.0);
  for (std::size_t j = 0; j < fact.rank; ++j) {
    const double s2 = fact.sigma[j] * fact.sigma[j];
    const double w = s2 / (s2 + out.lambda);
    out.sum_tau += w;
    for (std::size_t i = 0; i < a.cols(); ++i) out.tau[i] += w * fact.v(i, j) * fact.v(i, j);
  }
  return out;
}

Sketch ridge_leverage_sample(const Matrix& a, const SketchParams& params,
                             std::optional<std::span<const double>> tau_over) {
  require_input(a);
  params.validate();
  const RidgeScores exact = ridge_scores(a, params.k);
  std::vector<double> scores;
  if (tau_over) {
    if (tau_over->size() != a.cols()) {
      throw DimensionError("ridge overestimates must have one entry per column");
    }
    scores.assign(tau_over->begin(), tau_over->end());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (!std::isfinite(scores[i]) || scores[i] < exact.tau[i] - 1e-10) {
        throw InvalidOverestimate("overestimate for column " + std::to_string(i) +
                                  " is below its ridge leverage score");
      }
      scores[i] = std::max(scores[i], 0.0);
    }
  } else {
    scores = exact.tau;
  }
  double total = 0.0;
  for (double x : scores) total += x;
  if (!(total > 0.0)) throw ZeroMatrix("ridge_leverage_sample: all scores are zero");
  std::vector<double> probs(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) probs[i] = scores[i] / total;
  return finish_sampled(a, std::move(probs), ridge_width(params, total),
                        SketchMethod::RidgeLeverage, params);
}

Sketch svd_sketch(const Matrix& a, const SketchParams& params) {
  require_input(a);
  params.validate();
  const std::size_t m = svd_width(params);
  const SvdFactorization fact = svd(a);
  const std::size_t kept = std::min(m, fact.rank);
  Matrix vm(a.cols(), m);
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < kept; ++j) vm(i, j) = fact.v(i, j);
  return finish_dense(a, std::move(vm), SketchMethod::Svd, params, fact.tail_energy(kept));
}

Sketch orthogonal_sketch(const Matrix& a, std::uint64_t seed) {
  require_input(a);
  SketchParams params;
  params.seed = seed;
  params.m_override = a.cols();
  return finish_dense(a, haar_orthogonal(a.cols(), seed), SketchMethod::Orthogonal, params, 0.0);
}

Sketch identity_sketch(const Matrix& a) {
  require_input(a);
  SketchParams params;
  params.m_override = a.cols();
  return finish_dense(a, Matrix::identity(a.cols()), SketchMethod::Identity, params, 0.0);
}

Sketch build_sketch(const Matrix& a, SketchMethod method, const SketchParams& params) {
  switch (method) {
    case SketchMethod::Gaussian: return gaussian_sketch(a, params);
    case SketchMethod::NonOblivious: return non_oblivious_rp(a, params);
    case SketchMethod::LeverageResidual: return leverage_residual_sample(a, params);
    case SketchMethod::RidgeLeverage: return ridge_leverage_sample(a, params);
    case SketchMethod::Svd: return svd_sketch(a, params);
    case SketchMethod::Orthogonal: {
      Sketch sk = orthogonal_sketch(a, params.seed);
      sk.params.k = params.k;
      sk.params.eps = params.eps;
      sk.params.delta = params.delta;
      return sk;
    }
    case SketchMethod::Identity: {
      Sketch sk = identity_sketch(a);
      sk.params.k = params.k;
      sk.params.eps = params.eps;
      sk.params.delta = params.delta;
      return sk;
    }
  }
  throw ConfigError("unknown sketch method");
}

}  // namespace pcp

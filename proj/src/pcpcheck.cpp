#include "pcp/pcpcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pcp/error.hpp"
#include "pcp/random.hpp"
#include "pcp/solvers.hpp"

namespace pcp {

namespace {

/// Top-j left singular subspaces for j = 1..min(k, rank).
void add_singular_probes(const Matrix& m, long k, ProjectionKind kind, const std::string& tag,
                         std::vector<Probe>& out) {
  if (max_abs(m) == 0.0) return;
  const SvdFactorization f = svd(m);
  const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(k), f.rank);
  for (std::size_t j = 1; j <= top; ++j) {
    out.push_back({Projection{leading_columns(f.u, j), kind}, tag + "-" + std::to_string(j)});
  }
}

Projection axes_projection(std::size_t n, const std::vector<std::size_t>& axes) {
  Matrix basis(n, axes.size());
  for (std::size_t j = 0; j < axes.size(); ++j) basis(axes[j], j) = 1.0;
  return Projection{std::move(basis), ProjectionKind::BasisAxes};
}

}  // namespace

std::vector<Probe> exhaustive_cluster_probes(std::size_t n, int k) {
  if (n > kMaxExhaustiveRows) {
    throw TooLarge("exhaustive cluster probes are capped at " +
                   std::to_string(kMaxExhaustiveRows) + " rows");
  }
  std::vector<Probe> out;
  enumerate_partitions(n, k, [&](std::span<const int> rgs) {
    const int blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
    if (blocks != k) return;
    out.push_back({cluster_indicator_projection(rgs, k, n), "exhaustive-cluster"});
  });
  return out;
}

ProbeSet generate_probes(const Matrix& a, const Matrix& a_tilde, long k, std::uint64_t seed,
                         const ProbeOptions& options) {
  require_input(a);
  if (k < 1) throw InvalidRank("k must be at least 1");
  if (a_tilde.rows() != a.rows()) throw DimensionError("A and its sketch differ in rows");
  const std::size_t n = a.rows();
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), n);

  ProbeSet set;
  set.k = k;
  set.seed = seed;
  auto& probes = set.probes;

  add_singular_probes(a, k, ProjectionKind::TopSingularOfA, "top-A", probes);
  add_singular_probes(a_tilde, k, ProjectionKind::TopSingularOfSketch, "top-sketch", probes);

  // A with the sketch's dominant subspace removed.
  {
    Matrix residual = a;
    if (max_abs(a_tilde) > 0.0) {
      const Matrix q = leading_columns(svd(a_tilde).u, kk);
      residual = a - matmul(q, matmul_tn(q, a));
    }
    if (max_abs(residual) > 1e-14 * max_abs(a)) {
      const SvdFactorization f = svd(residual);
      probes.push_back({Projection{leading_columns(f.u, kk), ProjectionKind::Custom},
                        "residual-top"});
    }
  }

  for (std::size_t r = 0; r < options.n_random; ++r) {
    probes.push_back({haar_subspace(n, kk, derive_seed(seed, r)), "random"});
  }

  {
    std::vector<std::size_t> first(kk);
    std::iota(first.begin(), first.end(), 0);
    probes.push_back({axes_projection(n, first), "axes-first"});

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> norms(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (double x : a.row(i)) norms[i] += x * x;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });
    order.resize(kk);
    probes.push_back({axes_projection(n, order), "axes-heaviest"});
  }

  if (n >= static_cast<std::size_t>(k)) {
    const int kc = static_cast<int>(k);
    for (int run = 0; run < options.lloyd_runs; ++run) {
      const std::uint64_t s = derive_seed(seed ^ 0x6c6c6f7964ULL, static_cast<std::uint64_t>(run));
      const Clustering ca = lloyd_kmeans(a, kc, options.lloyd_iters, s);
      probes.push_back({cluster_indicator_projection(ca.assignment, kc, n), "lloyd-A"});
      if (a_tilde.cols() > 0 && all_finite(a_tilde)) {
        const Clustering cs = lloyd_kmeans(a_tilde, kc, options.lloyd_iters, s);
        probes.push_back({cluster_indicator_projection(cs.assignment, kc, n), "lloyd-sketch"});
      }
    }
    if (options.exhaustive_clusters) {
      auto all = exhaustive_cluster_probes(n, kc);
      probes.insert(probes.end(), std::make_move_iterator(all.begin()),
                    std::make_move_iterator(all.end()));
    }
  }
  return set;
}

ProbeEvaluation evaluate_probe(const Matrix& a, const Matrix& a_tilde, double c,
                               const Projection& p) {
  if (a_tilde.rows() != a.rows()) throw DimensionError("A and its sketch differ in rows");
  ProbeEvaluation ev;
  ev.cost_a = projection_cost(a, p);
  ev.cost_sketch = projection_cost(a_tilde, p);
  const double scale = frobenius_norm_sq(a);
  if (ev.cost_a <= 1e-12 * scale) {
    ev.zero_cost = true;
    ev.signed_rel_err = std::abs(ev.cost_sketch + c) <= 1e-8 * scale
                            ? 0.0
                            : std::numeric_limits<double>::infinity();
    return ev;
  }
  ev.signed_rel_err = (ev.cost_sketch + c - ev.cost_a) / ev.cost_a;
  return ev;
}

double pcp_error_on_probe(const Matrix& a, const Matrix& a_tilde, double c, const Projection& p) {
  return evaluate_probe(a, a_tilde, c, p).signed_rel_err;
}

PcpReport pcp_report(const Matrix& a, const Matrix& a_tilde, double c, const ProbeSet& probes,
                     double eps_target) {
  if (probes.probes.empty()) throw InvalidInput("pcp_report: probe set is empty");
  PcpReport report;
  report.eps_target = eps_target;
  report.per_probe.reserve(probes.size());
  for (const auto& probe : probes.probes) {
    ProbeEvaluation ev = evaluate_probe(a, a_tilde, c, probe.projection);
    ev.tag = probe.tag;
    report.max_abs_rel_err = std::max(report.max_abs_rel_err, std::abs(ev.signed_rel_err));
    report.per_probe.push_back(std::move(ev));
  }
  report.pass = report.max_abs_rel_err <= eps_target;
  return report;
}

ImplicationResult implication_test(const Matrix& a, const Matrix& s, long k, double eps,
                                   const ProbeSet& probes) {
  ImplicationResult out;
  const Matrix a_tilde = matmul(a, s);
  out.certificate_t1 = certify_theorem1(a, s, k, eps);
  out.certificate_t2 = certify_theorem2(a, s, k, eps);
  out.report = pcp_report(a, a_tilde, 0.0, probes, eps);
  const bool ok = out.report.max_abs_rel_err <= eps;
  out.consistent = (!out.certificate_t1.holds || ok) && (!out.certificate_t2.holds || ok);
  return out;
}

TransferResult approx_transfer_check(const Matrix& a, const Matrix& a_tilde, double c, long k,
                                     double eps, const std::vector<Projection>& candidates,
                                     double gamma) {
  if (candidates.empty()) throw InvalidInput("approx_transfer_check: no candidates");
  if (!(gamma >= 1.0)) throw InvalidInput("gamma must be at least 1");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0, 1)");
  for (const auto& p : candidates) {
    if (p.rank() > static_cast<std::size_t>(k)) {
      throw InvalidInput("candidate projection has rank above k");
    }
  }
  std::vector<double> cost_a(candidates.size());
  std::vector<double> cost_s(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    cost_a[i] = projection_cost(a, candidates[i]);
    cost_s[i] = projection_cost(a_tilde, candidates[i]);
  }
  TransferResult out;
  out.min_cost_a = *std::min_element(cost_a.begin(), cost_a.end());
  out.min_cost_sketch = *std::min_element(cost_s.begin(), cost_s.end());
  const double admit = gamma * out.min_cost_sketch + 1e-12 * frobenius_norm_sq(a_tilde);
  double worst = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (cost_s[i] <= admit && cost_a[i] > worst) {
      worst = cost_a[i];
      out.chosen = i;
    }
  }
  out.lhs = cost_a[out.chosen];
  out.rhs = (1.0 + eps) * gamma / (1.0 - eps) * out.min_cost_a + (1.0 - gamma) * c / (1.0 - eps);
  out.bound_holds = out.lhs <= out.rhs + 1e-10 * frobenius_norm_sq(a);
  return out;
}

}  // namespace pcp

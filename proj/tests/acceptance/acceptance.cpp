#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "pcp/generators.hpp"
#include "pcp/linalg.hpp"
#include "pcp/pcpcheck.hpp"
#include "pcp/primitives.hpp"
#include "pcp/random.hpp"
#include "pcp/sketch.hpp"
#include "pcp/solvers.hpp"

using namespace pcp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t uniform_int(CounterRng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.next_u64() % (hi - lo + 1));
}

/// Test matrices of mixed spectral shape: dense Gaussian, planted low rank
/// with and without noise, and power-law decay.
Matrix random_instance(CounterRng& rng, std::size_t n, std::size_t d) {
  GeneratorSpec spec;
  spec.n = n;
  spec.d = d;
  spec.seed = rng.next_u64();
  switch (rng.next_u64() % 4) {
    case 0: {
      Matrix a = gaussian_matrix(n, d, rng);
      return a;
    }
    case 1:
      spec.kind = GeneratorKind::LowRankPlusNoise;
      spec.rank = uniform_int(rng, 1, std::min<std::size_t>(4, std::min(n, d)));
      spec.noise = 0.02;
      break;
    case 2:
      spec.kind = GeneratorKind::LowRankPlusNoise;
      spec.rank = uniform_int(rng, 1, std::min<std::size_t>(3, std::min(n, d)));
      spec.noise = 0.0;
      break;
    default:
      spec.kind = GeneratorKind::PowerLaw;
      spec.alpha = 0.5 + 0.5 * static_cast<double>(rng.next_u64() % 4);
      break;
  }
  return gen_synthetic(spec);
}

ProbeOptions audit_options(std::size_t n, std::size_t n_random) {
  ProbeOptions o;
  o.n_random = n_random;
  o.lloyd_runs = 3;
  o.exhaustive_clusters = n <= 10;
  return o;
}

Outcome criterion1() {
  double worst = 0.0;
  std::size_t probes = 0;
  CounterRng rng(101);
  for (int rep = 0; rep < 4; ++rep) {
    const std::size_t n = uniform_int(rng, 5, 10);
    const std::size_t d = uniform_int(rng, n, 20);
    const Matrix a = random_instance(rng, n, d);
    const long k = static_cast<long>(uniform_int(rng, 1, 3));
    const std::uint64_t seed = rng.next_u64();

    const Sketch orth = orthogonal_sketch(a, seed);
    const ProbeSet set = generate_probes(a, orth.a_tilde, k, seed, audit_options(n, 20));
    const PcpReport r1 = pcp_report(a, orth.a_tilde, orth.c_const, set, 1e-8);

    SketchParams p;
    p.k = k;
    p.seed = seed;
    p.m_override = svd(a).rank + static_cast<std::size_t>(rep % 2);
    const Sketch lossless = svd_sketch(a, p);
    const ProbeSet set2 = generate_probes(a, lossless.a_tilde, k, seed, audit_options(n, 20));
    const PcpReport r2 = pcp_report(a, lossless.a_tilde, lossless.c_const, set2, 1e-8);

    worst = std::max({worst, r1.max_abs_rel_err, r2.max_abs_rel_err});
    probes += set.size() + set2.size();
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max_abs_rel_err %.3g over %zu probes (limit 1e-8)", worst, probes);
  return {worst <= 1e-8, buf};
}

/// Trials whose certificate holds must pass the probe audit at ε.
Outcome implication_harness(Theorem theorem, std::uint64_t master) {
  const SketchMethod methods[] = {SketchMethod::Gaussian, SketchMethod::NonOblivious,
                                  SketchMethod::LeverageResidual, SketchMethod::RidgeLeverage};
  const double width_factors[] = {0.5, 2.0, 16.0, 128.0, 1024.0};
  const int trials = 240;
  int held = 0;
  int violations = 0;
  double worst_held = 0.0;
  CounterRng rng(master);
  for (int t = 0; t < trials; ++t) {
    const std::size_t n = uniform_int(rng, 3, 12);
    const std::size_t d = uniform_int(rng, 2, 30);
    const Matrix a = random_instance(rng, n, d);
    const long k = static_cast<long>(uniform_int(rng, 1, 3));
    const double eps = rng.next_u64() % 2 == 0 ? 0.3 : 0.5;
    const SketchMethod method = methods[t % 4];
    const double factor = width_factors[(t / 4) % 5];

    SketchParams params;
    params.k = k;
    params.eps = eps;
    params.seed = derive_seed(master, static_cast<std::uint64_t>(t));
    params.m_override = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(factor * static_cast<double>(d))));
    const Sketch sk = build_sketch(a, method, params);
    const Matrix s = sk.operator_matrix();
    const Certificate cert = theorem == Theorem::MatrixApprox ? certify_theorem1(a, s, k, eps)
                                                              : certify_theorem2(a, s, k, eps);
    if (!cert.holds) continue;
    ++held;
    const Matrix a_tilde = matmul(a, s);
    const ProbeSet set = generate_probes(a, a_tilde, k, params.seed, audit_options(n, 30));
    const PcpReport report = pcp_report(a, a_tilde, 0.0, set, eps);
    worst_held = std::max(worst_held, report.max_abs_rel_err / eps);
    if (!report.pass) ++violations;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%d trials, certificate held in %d, violations %d, worst err/eps when held %.3g",
                trials, held, violations, worst_held);
  return {violations == 0 && held > 0, buf};
}

Outcome criterion4() {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::LowRankPlusNoise;
  spec.n = 60;
  spec.d = 500;
  spec.rank = 5;
  spec.noise = 0.05;
  spec.seed = 4;
  const Matrix a = gen_synthetic(spec);
  int passed = 0;
  double worst = 0.0;
  std::size_t m = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    SketchParams p;
    p.k = 3;
    p.eps = 0.4;
    p.delta = 0.1;
    p.const_c = 8.0;
    p.seed = seed;
    const Sketch sk = gaussian_sketch(a, p);
    m = sk.m;
    const ProbeSet set = generate_probes(a, sk.a_tilde, 3, seed);
    const PcpReport r = pcp_report(a, sk.a_tilde, sk.c_const, set, 0.4);
    passed += r.pass ? 1 : 0;
    worst = std::max(worst, r.max_abs_rel_err);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "m = %zu, %d/30 seeds pass, worst max_abs_rel_err %.3g", m,
                passed, worst);
  return {passed >= 27, buf};
}

Outcome criterion5() {
  CounterRng rng(505);
  int failures = 0;
  double worst_ratio = 0.0;
  double worst_identity = 0.0;
  double worst_p_over_k = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = uniform_int(rng, 2, 15);
    const std::size_t d = uniform_int(rng, 2, 20);
    const Matrix a = random_instance(rng, n, d);
    const SvdFactorization f = svd(a);
    // Gram eigenvalues as an oracle independent of the SVD routine.
    const SymmetricEigen gram = sym_eig(matmul_nt(a, a));
    for (long k : {1L, 2L, 4L}) {
      const RidgeScores rs = ridge_scores(a, k);
      double expect = 0.0;
      for (double ev : gram.values) {
        if (ev <= 1e-10 * gram.values.front()) continue;
        expect += ev / (ev + rs.lambda);
      }
      worst_ratio = std::max(worst_ratio, rs.sum_tau / (2.0 * static_cast<double>(k)));
      worst_identity = std::max(worst_identity, std::abs(rs.sum_tau - expect));
      if (rs.sum_tau > 2.0 * static_cast<double>(k) + 1e-8) ++failures;
      if (std::abs(rs.sum_tau - expect) > 1e-8) ++failures;
      if (f.tail_energy(std::min<std::size_t>(static_cast<std::size_t>(k), f.rank)) > 0.0) {
        const std::size_t p = tail_index_p(f, k);
        if (p > 2 * static_cast<std::size_t>(k)) ++failures;
        worst_p_over_k = std::max(worst_p_over_k, static_cast<double>(p) / static_cast<double>(k));
      }
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "max sum_tau/2k %.4f, max |sum_tau - oracle| %.2g, max p/k %.2f, failures %d",
                worst_ratio, worst_identity, worst_p_over_k, failures);
  return {failures == 0, buf};
}

Matrix planted_two_clusters(std::uint64_t seed) {
  CounterRng rng(seed);
  const Matrix center = gaussian_matrix(2, 6, rng);
  Matrix a(8, 6);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 6; ++j) a(i, j) = 10.0 * center(i % 2, j) + 0.5 * rng.normal();
  return a;
}

Outcome criterion6() {
  int failures = 0;
  double worst = 0.0;
  for (std::uint64_t inst = 0; inst < 5; ++inst) {
    const Matrix a = planted_two_clusters(600 + inst);
    const double optimum = exhaustive_kmeans(a, 2).cost;
    SketchParams p;
    p.k = 2;
    p.eps = 0.5;
    p.seed = inst;
    const Sketch svd_sk = svd_sketch(a, p);
    SketchParams pg = p;
    pg.m_override = 24;
    const Sketch gauss_sk = gaussian_sketch(a, pg);
    if (svd_sk.m != 4) ++failures;
    for (const Sketch* sk : {&svd_sk, &gauss_sk}) {
      SolverParams sp;
      sp.k = 2;
      sp.kmeans = KMeansSolver::Exhaustive;
      const SolveResult res = sketch_and_solve(a, *sk, SolveTask::KMeans, sp);
      const double bound = 3.0 * optimum;
      worst = std::max(worst, res.cost_on_a / optimum);
      if (!(res.gamma && *res.gamma == 1.0)) ++failures;
      if (res.cost_on_a > bound * (1.0 + 1e-12)) ++failures;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "10 solves, worst cost_on_a/optimum %.4f (bound 3), failures %d",
                worst, failures);
  return {failures == 0, buf};
}

Outcome criterion7() {
  CounterRng rng(707);
  int failures = 0;
  double worst_gap = 0.0;
  double worst_exceed = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = uniform_int(rng, 1, 6);
    const std::size_t d = uniform_int(rng, 1, 8);
    const std::size_t m = uniform_int(rng, 1, 10);
    const Matrix mm = gaussian_matrix(n, d, rng);
    Matrix s = gaussian_matrix(d, m, rng);
    s = (1.0 / std::sqrt(static_cast<double>(m))) * s;
    const EmbeddingWitness w = subspace_embedding_witness(mm, s);

    auto ratio = [&](std::span<const double> x) {
      std::vector<double> xm(d, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) xm[j] += x[i] * mm(i, j);
      double base = 0.0;
      for (double v : xm) base += v * v;
      double sk = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) acc += xm[j] * s(j, c);
        sk += acc * acc;
      }
      return base > 0.0 ? std::abs(base - sk) / base : 0.0;
    };

    std::vector<double> x(n);
    for (int probe = 0; probe < 10000; ++probe) {
      for (double& v : x) v = rng.normal();
      const double r = ratio(x);
      worst_exceed = std::max(worst_exceed, r - w.error);
      if (r > w.error * (1.0 + 1e-10) + 1e-12) ++failures;
    }
    const double gap = std::abs(ratio(w.x) - w.error);
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-3) ++failures;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "200 pairs x 1e4 probes, max(probe - exact) %.2g, max witness gap %.2g, failures %d",
                worst_exceed, worst_gap, failures);
  return {failures == 0, buf};
}

Outcome criterion8() {
  const JlMomentEstimate est = jl_moment_estimate(JlFamily::Gaussian, 100, 100, 2, 100000, 808);
  const double oracle = 2.0 / 100.0;
  const double rel = std::abs(est.estimate - oracle) / oracle;
  char buf[160];
  std::snprintf(buf, sizeof buf, "estimate %.5f vs 2/m = %.5f (rel dev %.3f, limit 0.10)",
                est.estimate, oracle, rel);
  return {rel <= 0.10, buf};
}

Outcome criterion9() {
  CounterRng rng(909);
  int failures = 0;
  std::size_t probes = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = uniform_int(rng, 2, 20);
    const std::size_t d = uniform_int(rng, 2, 40);
    const Matrix a = random_instance(rng, n, d);
    for (long k : {1L, 2L, 3L}) {
      for (double eps : {0.25, 0.5}) {
        SketchParams p;
        p.k = k;
        p.eps = eps;
        p.seed = rng.next_u64();
        const Sketch sk = svd_sketch(a, p);
        const SvdFactorization f = svd(a);
        const double expect_c = f.tail_energy(std::min(sk.m, f.rank));
        if (std::abs(sk.c_const - expect_c) > 1e-9 * f.total_energy()) ++failures;
        const ProbeSet set = generate_probes(a, sk.a_tilde, k, p.seed, audit_options(n, 20));
        const PcpReport r = pcp_report(a, sk.a_tilde, sk.c_const, set, eps);
        for (const auto& ev : r.per_probe) {
          ++probes;
          worst = std::max(worst, std::abs(ev.signed_rel_err) / eps);
          if (!(ev.signed_rel_err >= -eps - 1e-6 && ev.signed_rel_err <= eps + 1e-6)) ++failures;
        }
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu probes, worst |err|/eps %.4f, failures %d", probes, worst,
                failures);
  return {failures == 0, buf};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "lossless sketches", 1.0, criterion1},
      {2, "matrix-approximation certificate implies PCP", 60.0,
       [] { return implication_harness(Theorem::MatrixApprox, 202); }},
      {3, "spectral certificate implies PCP", 60.0,
       [] { return implication_harness(Theorem::SpectralApprox, 303); }},
      {4, "Gaussian PCP at calibrated width", 30.0, criterion4},
      {5, "ridge leverage structure", 10.0, criterion5},
      {6, "transfer bound", 10.0, criterion6},
      {7, "subspace embedding exactness", 30.0, criterion7},
      {8, "JL moment", 20.0, criterion8},
      {9, "SVD sketch constant audit", 30.0, criterion9},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool ok = out.pass && in_time;
    failed += ok ? 0 : 1;
    std::printf("criterion %d %-48s %s  %s  [%.2fs / %.0fs%s]\n", c.id, c.name,
                ok ? "PASS" : "FAIL", out.detail.c_str(), secs, c.limit_s,
                in_time ? "" : " EXCEEDED");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}

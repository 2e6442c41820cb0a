#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "pcp/error.hpp"
#include "pcp/generators.hpp"
#include "pcp/linalg.hpp"
#include "pcp/pcpcheck.hpp"
#include "pcp/primitives.hpp"
#include "pcp/sketch.hpp"
#include "pcp/solvers.hpp"

namespace py = pybind11;
using namespace pcp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix from_numpy(const Array& arr) {
  if (arr.ndim() == 1) {
    const auto n = static_cast<std::size_t>(arr.shape(0));
    return Matrix(n, 1, std::vector<double>(arr.data(), arr.data() + n));
  }
  if (arr.ndim() != 2) throw InvalidInput("expected a 2-D array");
  const auto r = static_cast<std::size_t>(arr.shape(0));
  const auto c = static_cast<std::size_t>(arr.shape(1));
  return Matrix(r, c, std::vector<double>(arr.data(), arr.data() + r * c));
}

py::array_t<double> to_numpy(const Matrix& m) {
  py::array_t<double> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

py::array_t<double> to_numpy(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

SketchParams make_params(long k, double eps, double delta, std::optional<double> const_c,
                         std::uint64_t seed, std::optional<std::size_t> m) {
  SketchParams p;
  p.k = k;
  p.eps = eps;
  p.delta = delta;
  p.const_c = const_c;
  p.seed = seed;
  p.m_override = m;
  return p;
}

py::dict certificate_dict(const Certificate& c) {
  py::dict measured, thresholds;
  for (const auto& cond : c.conditions) {
    measured[py::str(cond.name)] = cond.measured;
    thresholds[py::str(cond.name)] = cond.threshold;
  }
  py::dict d;
  d["theorem"] = std::string(to_string(c.theorem));
  d["holds"] = c.holds;
  d["measured"] = measured;
  d["thresholds"] = thresholds;
  if (c.theorem == Theorem::SpectralApprox) {
    d["lambda_used"] = c.lambda_used;
    d["p_used"] = c.p_used;
  }
  return d;
}

py::dict clustering_dict(const Clustering& c) {
  py::dict d;
  d["assignment"] = c.assignment;
  d["k"] = c.k;
  d["cost"] = c.cost;
  d["cost_history"] = c.cost_history;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Projection-cost-preserving sketches";
  py::register_exception<Error>(m, "PcpError", PyExc_ValueError);

  m.def(
      "svd",
      [](const Array& a, double tol) {
        const SvdFactorization f = svd(from_numpy(a), tol);
        py::dict d;
        d["u"] = to_numpy(f.u);
        d["sigma"] = to_numpy(f.sigma);
        d["v"] = to_numpy(f.v);
        d["rank"] = f.rank;
        return d;
      },
      py::arg("a"), py::arg("tol") = kDefaultSvdTol, "Thin SVD truncated at the numerical rank.");

  m.def(
      "tail_index_p", [](const Array& a, long k) { return tail_index_p(svd(from_numpy(a)), k); },
      py::arg("a"), py::arg("k"));

  m.def(
      "projection_cost",
      [](const Array& a, const Array& basis) {
        return projection_cost(from_numpy(a), make_projection(from_numpy(basis)));
      },
      py::arg("a"), py::arg("basis"), "||A - QQ^T A||_F^2 for an orthonormal basis Q.");

  m.def(
      "sketch",
      [](const Array& a, const std::string& method, long k, double eps, double delta,
         std::optional<double> const_c, std::uint64_t seed, std::optional<std::size_t> width) {
        const Sketch sk = build_sketch(from_numpy(a), parse_sketch_method(method),
                                       make_params(k, eps, delta, const_c, seed, width));
        py::dict d;
        d["a_tilde"] = to_numpy(sk.a_tilde);
        d["s"] = to_numpy(sk.operator_matrix());
        d["c_const"] = sk.c_const;
        d["m"] = sk.m;
        d["method"] = std::string(to_string(sk.method));
        d["width_not_reducing"] = sk.width_not_reducing;
        return d;
      },
      py::arg("a"), py::arg("method") = "gaussian", py::arg("k") = 1, py::arg("eps") = 0.5,
      py::arg("delta") = 0.1, py::arg("const_c") = py::none(), py::arg("seed") = 0,
      py::arg("m") = py::none(), "Builds a sketch; returns A~, the operator S and the constant c.");

  m.def(
      "certify",
      [](const Array& a, const Array& s, long k, double eps, const std::string& theorem) {
        const Matrix am = from_numpy(a), sm = from_numpy(s);
        if (theorem == "T1") return certificate_dict(certify_theorem1(am, sm, k, eps));
        if (theorem == "T2") return certificate_dict(certify_theorem2(am, sm, k, eps));
        throw InvalidInput("theorem must be 'T1' or 'T2'");
      },
      py::arg("a"), py::arg("s"), py::arg("k"), py::arg("eps"), py::arg("theorem") = "T1");

  m.def(
      "subspace_embedding_error",
      [](const Array& mm, const Array& s) {
        return subspace_embedding_error(from_numpy(mm), from_numpy(s));
      },
      py::arg("m"), py::arg("s"));
  m.def(
      "amm_error",
      [](const Array& mm, const Array& n, const Array& s) {
        return amm_error(from_numpy(mm), from_numpy(n), from_numpy(s));
      },
      py::arg("m"), py::arg("n"), py::arg("s"));
  m.def(
      "frobenius_preservation_error",
      [](const Array& mm, const Array& s) {
        return frobenius_preservation_error(from_numpy(mm), from_numpy(s));
      },
      py::arg("m"), py::arg("s"));
  m.def(
      "spectral_approx_error",
      [](const Array& a, const Array& s, double lambda) {
        return spectral_approx_error(from_numpy(a), from_numpy(s), lambda);
      },
      py::arg("a"), py::arg("s"), py::arg("lam"));

  m.def(
      "ridge_scores",
      [](const Array& a, long k) {
        const RidgeScores rs = ridge_scores(from_numpy(a), k);
        py::dict d;
        d["tau"] = to_numpy(rs.tau);
        d["lambda"] = rs.lambda;
        d["sum_tau"] = rs.sum_tau;
        return d;
      },
      py::arg("a"), py::arg("k"));
  m.def(
      "leverage_residual_probs",
      [](const Array& a, long k) { return to_numpy(leverage_residual_probs(from_numpy(a), k)); },
      py::arg("a"), py::arg("k"));

  m.def(
      "pcp_report",
      [](const Array& a, const Array& a_tilde, double c, long k, double eps, std::uint64_t seed,
         std::size_t n_random, int lloyd_runs, bool exhaustive) {
        const Matrix am = from_numpy(a), at = from_numpy(a_tilde);
        ProbeOptions o;
        o.n_random = n_random;
        o.lloyd_runs = lloyd_runs;
        o.exhaustive_clusters = exhaustive;
        const PcpReport r = pcp_report(am, at, c, generate_probes(am, at, k, seed, o), eps);
        py::list probes;
        for (const auto& ev : r.per_probe) {
          py::dict p;
          p["tag"] = ev.tag;
          p["cost_a"] = ev.cost_a;
          p["cost_sketch"] = ev.cost_sketch;
          p["signed_rel_err"] = ev.signed_rel_err;
          p["zero_cost"] = ev.zero_cost;
          probes.append(p);
        }
        py::dict d;
        d["max_abs_rel_err"] = r.max_abs_rel_err;
        d["pass"] = r.pass;
        d["n_probes"] = r.per_probe.size();
        d["per_probe"] = probes;
        return d;
      },
      py::arg("a"), py::arg("a_tilde"), py::arg("c") = 0.0, py::arg("k") = 1,
      py::arg("eps") = 0.5, py::arg("seed") = 0, py::arg("n_random") = 50,
      py::arg("lloyd_runs") = 5, py::arg("exhaustive") = false,
      "Audits A~ + c against A on the generated probe families.");

  m.def(
      "best_rank_k_projection",
      [](const Array& a, long k) { return to_numpy(best_rank_k_projection(from_numpy(a), k).basis); },
      py::arg("a"), py::arg("k"));
  m.def(
      "lloyd_kmeans",
      [](const Array& a, int k, int iters, std::uint64_t seed) {
        return clustering_dict(lloyd_kmeans(from_numpy(a), k, iters, seed));
      },
      py::arg("a"), py::arg("k"), py::arg("iters") = 50, py::arg("seed") = 0);
  m.def(
      "exhaustive_kmeans",
      [](const Array& a, int k) { return clustering_dict(exhaustive_kmeans(from_numpy(a), k)); },
      py::arg("a"), py::arg("k"));

  m.def(
      "solve",
      [](const Array& a, const std::string& task, const std::string& method, long k, double eps,
         std::uint64_t seed, std::optional<std::size_t> width, const std::string& solver) {
        const Matrix am = from_numpy(a);
        const Sketch sk = build_sketch(am, parse_sketch_method(method),
                                       make_params(k, eps, 0.1, std::nullopt, seed, width));
        SolverParams sp;
        sp.k = k;
        sp.seed = seed;
        if (solver == "lloyd") sp.kmeans = KMeansSolver::Lloyd;
        else if (solver != "exhaustive") throw InvalidInput("solver must be 'exhaustive' or 'lloyd'");
        SolveTask t;
        if (task == "lowrank") t = SolveTask::LowRank;
        else if (task == "kmeans") t = SolveTask::KMeans;
        else throw InvalidInput("task must be 'lowrank' or 'kmeans'");
        const SolveResult r = sketch_and_solve(am, sk, t, sp);
        py::dict d;
        d["basis"] = to_numpy(r.solution.basis);
        d["cost_on_a"] = r.cost_on_a;
        d["cost_on_sketch"] = r.cost_on_sketch;
        d["gamma"] = r.gamma ? py::object(py::float_(*r.gamma)) : py::object(py::none());
        d["certified_ratio"] =
            r.certified_ratio ? py::object(py::float_(*r.certified_ratio)) : py::object(py::none());
        if (r.clustering) d["assignment"] = r.clustering->assignment;
        return d;
      },
      py::arg("a"), py::arg("task") = "lowrank", py::arg("method") = "svd", py::arg("k") = 1,
      py::arg("eps") = 0.5, py::arg("seed") = 0, py::arg("m") = py::none(),
      py::arg("solver") = "exhaustive");

  m.def(
      "gen_synthetic",
      [](const std::string& spec, std::uint64_t seed) {
        return to_numpy(gen_synthetic(parse_generator_spec(spec, seed)));
      },
      py::arg("spec"), py::arg("seed") = 0,
      "Synthetic matrix from a 'kind:key=value,...' spec (lowrank, clustered, powerlaw).");

  m.def(
      "jl_moment",
      [](std::size_t d, std::size_t width, int ell, std::size_t trials, std::uint64_t seed,
         const std::string& family) {
        const JlMomentEstimate e =
            jl_moment_estimate(parse_jl_family(family), d, width, ell, trials, seed);
        py::dict out;
        out["estimate"] = e.estimate;
        out["std_error"] = e.std_error;
        out["trials"] = e.trials;
        out["ell"] = e.ell;
        return out;
      },
      py::arg("d"), py::arg("m"), py::arg("ell") = 2, py::arg("trials") = 100000,
      py::arg("seed") = 0, py::arg("family") = "gaussian");
}

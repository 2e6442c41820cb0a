#include "pcp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pcp/error.hpp"
#include "pcp/generators.hpp"
#include "pcp/io.hpp"
#include "pcp/random.hpp"
#include "pcp/solvers.hpp"

namespace pcp {

using nlohmann::json;

namespace {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json to_json(const SketchParams& params, SketchMethod method) {
  json j;
  j["k"] = params.k;
  j["eps"] = params.eps;
  j["delta"] = params.delta;
  j["const_c"] = params.const_for(method);
  j["seed"] = params.seed;
  j["m_override"] = params.m_override ? json(*params.m_override) : json(nullptr);
  return j;
}

json to_json(const Certificate& cert) {
  json j;
  j["theorem"] = std::string(to_string(cert.theorem));
  j["holds"] = cert.holds;
  json measured = json::object();
  json thresholds = json::object();
  for (const auto& c : cert.conditions) {
    measured[c.name] = number_or_null(c.measured);
    thresholds[c.name] = number_or_null(c.threshold);
  }
  if (cert.theorem == Theorem::SpectralApprox) {
    measured["lambda_used"] = cert.lambda_used;
    measured["p_used"] = cert.p_used;
  }
  j["measured"] = std::move(measured);
  j["thresholds"] = std::move(thresholds);
  return j;
}

json to_json(const PcpReport& report, bool include_probes) {
  json j;
  j["max_abs_rel_err"] = number_or_null(report.max_abs_rel_err);
  j["n_probes"] = report.per_probe.size();
  j["eps_target"] = report.eps_target;
  j["pass"] = report.pass;
  if (include_probes) {
    json probes = json::array();
    for (const auto& p : report.per_probe) {
      probes.push_back({{"tag", p.tag},
                        {"cost_a", p.cost_a},
                        {"cost_sketch", p.cost_sketch},
                        {"signed_rel_err", number_or_null(p.signed_rel_err)},
                        {"zero_cost", p.zero_cost}});
    }
    j["per_probe"] = std::move(probes);
  }
  return j;
}

namespace {

void flatten_into(const json& j, const std::string& prefix, std::ostringstream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten_into(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten_into(j[i], prefix + "." + std::to_string(i), out);
    }
  } else {
    out << prefix << ',';
    if (j.is_string()) out << j.get<std::string>();
    else out << j.dump();
    out << '\n';
  }
}

}  // namespace

std::string flatten_csv(const json& j) {
  std::ostringstream out;
  out << "key,value\n";
  flatten_into(j, "", out);
  return out.str();
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Options {
  std::string input;
  std::string gen;
  std::string method = "gaussian";
  std::string out_path;
  std::string report_path;
  std::string format = "json";
  long k = 1;
  double eps = 0.5;
  double delta = 0.1;
  double const_c = 0.0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  // verify
  std::size_t n_random = 50;
  int lloyd_runs = 5;
  bool exhaustive = false;
  bool no_certify = false;
  std::size_t trials = 1;
  bool parallel = false;
  // certify
  bool assert_holds = false;
  // solve
  std::string task = "lowrank";
  std::string solver = "exhaustive";
  int iters = 50;
  // bench
  std::string methods = "gaussian,non-oblivious,leverage-residual,ridge-leverage,svd";
  // jl-moment
  std::string family = "gaussian";
  std::size_t d = 100;
  std::size_t width = 100;
  int ell = 2;
  std::size_t jl_trials = 100000;
};

SketchParams sketch_params(const Options& o) {
  SketchParams p;
  p.k = o.k;
  p.eps = o.eps;
  p.delta = o.delta;
  if (o.const_c > 0.0) p.const_c = o.const_c;
  if (o.m > 0) p.m_override = o.m;
  p.seed = o.seed;
  p.validate();
  return p;
}

Matrix load_input(const Options& o) {
  if (!o.input.empty() && !o.gen.empty()) throw ConfigError("use either --input or --gen, not both");
  if (!o.input.empty()) return load_matrix(o.input);
  if (!o.gen.empty()) return gen_synthetic(parse_generator_spec(o.gen, o.seed));
  throw ConfigError("an input matrix is required (--input PATH or --gen SPEC)");
}

void emit(const Options& o, const json& report, std::ostream& out) {
  std::string text;
  if (o.format == "json") text = report.dump(2) + "\n";
  else if (o.format == "csv") text = flatten_csv(report);
  else throw ConfigError("unknown report format '" + o.format + "'");
  if (o.report_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.report_path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + o.report_path + "' for writing");
  f << text;
}

json sketch_header(const Sketch& sk) {
  json j;
  j["method"] = std::string(to_string(sk.method));
  j["params"] = to_json(sk.params, sk.method);
  j["m"] = sk.m;
  j["c_const"] = sk.c_const;
  j["width_not_reducing"] = sk.width_not_reducing;
  return j;
}

int cmd_gen(const Options& o, std::ostream& out) {
  if (o.gen.empty()) throw ConfigError("gen requires --gen SPEC");
  const Matrix a = gen_synthetic(parse_generator_spec(o.gen, o.seed));
  if (o.out_path.empty()) write_csv(out, a);
  else save_matrix(o.out_path, a);
  return kExitOk;
}

int cmd_sketch(const Options& o, std::ostream& out, std::ostream& err) {
  const Matrix a = load_input(o);
  const SketchMethod method = parse_sketch_method(o.method);
  const auto t0 = Clock::now();
  const Sketch sk = build_sketch(a, method, sketch_params(o));
  const double t_sketch = ms_since(t0);
  if (sk.width_not_reducing) {
    err << "warning: sketch width " << sk.m << " does not reduce d = " << a.cols() << "\n";
  }
  json report = sketch_header(sk);
  report["n"] = a.rows();
  report["d"] = a.cols();
  report["timing_ms"] = {{"sketch", t_sketch}};
  if (!o.out_path.empty()) {
    save_matrix(o.out_path, sk.a_tilde);
    report["output"] = o.out_path;
    emit(o, report, out);
  } else if (!o.report_path.empty()) {
    emit(o, report, out);
  } else {
    write_csv(out, sk.a_tilde);
  }
  return kExitOk;
}

int cmd_certify(const Options& o, std::ostream& out) {
  const Matrix a = load_input(o);
  const SketchMethod method = parse_sketch_method(o.method);
  const auto t0 = Clock::now();
  const Sketch sk = build_sketch(a, method, sketch_params(o));
  const double t_sketch = ms_since(t0);
  const Matrix s = sk.operator_matrix();
  const auto t1 = Clock::now();
  const Certificate c1 = certify_theorem1(a, s, o.k, o.eps);
  const Certificate c2 = certify_theorem2(a, s, o.k, o.eps);
  json report = sketch_header(sk);
  report["certificate_t1"] = to_json(c1);
  report["certificate_t2"] = to_json(c2);
  report["timing_ms"] = {{"sketch", t_sketch}, {"certify", ms_since(t1)}};
  emit(o, report, out);
  if (o.assert_holds && !(c1.holds || c2.holds)) return kExitAssertionFailed;
  return kExitOk;
}

struct VerifyOutcome {
  json report;
  bool pass = false;
};

VerifyOutcome verify_once(const Matrix& a, SketchMethod method, const SketchParams& params,
                          const Options& o) {
  const auto t0 = Clock::now();
  const Sketch sk = build_sketch(a, method, params);
  const double t_sketch = ms_since(t0);
  json report = sketch_header(sk);
  json timing;
  timing["sketch"] = t_sketch;
  if (!o.no_certify) {
    const auto tc = Clock::now();
    const Matrix s = sk.operator_matrix();
    report["certificate_t1"] = to_json(certify_theorem1(a, s, params.k, params.eps));
    report["certificate_t2"] = to_json(certify_theorem2(a, s, params.k, params.eps));
    timing["certify"] = ms_since(tc);
  }
  const auto tp = Clock::now();
  ProbeOptions popts;
  popts.n_random = o.n_random;
  popts.lloyd_runs = o.lloyd_runs;
  popts.exhaustive_clusters = o.exhaustive;
  const ProbeSet probes = generate_probes(a, sk.a_tilde, params.k, params.seed, popts);
  const PcpReport pr = pcp_report(a, sk.a_tilde, sk.c_const, probes, params.eps);
  timing["probes"] = ms_since(tp);
  report["pcp"] = to_json(pr, o.trials <= 1);
  timing["total"] = ms_since(t0);
  report["timing_ms"] = std::move(timing);
  return {std::move(report), pr.pass};
}

int cmd_verify(const Options& o, std::ostream& out) {
  const Matrix a = load_input(o);
  const SketchMethod method = parse_sketch_method(o.method);
  const SketchParams base = sketch_params(o);
  if (o.trials <= 1) {
    VerifyOutcome v = verify_once(a, method, base, o);
    v.report["seed"] = base.seed;
    emit(o, v.report, out);
    return v.pass ? kExitOk : kExitAssertionFailed;
  }

  std::vector<VerifyOutcome> results(o.trials);
  auto run = [&](std::size_t t) {
    SketchParams p = base;
    p.seed = derive_seed(base.seed, t);
    results[t] = verify_once(a, method, p, o);
  };
  if (o.parallel) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(o.trials, std::thread::hardware_concurrency()));
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < o.trials; t = next++) {
          try {
            run(t);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::size_t t = 0; t < o.trials; ++t) run(t);
  }

  json report;
  report["method"] = o.method;
  report["seed"] = base.seed;
  json trials = json::array();
  std::size_t passed = 0;
  for (std::size_t t = 0; t < results.size(); ++t) {
    results[t].report["trial"] = t;
    passed += results[t].pass ? 1 : 0;
    trials.push_back(std::move(results[t].report));
  }
  report["trials"] = std::move(trials);
  report["pass_count"] = passed;
  report["pass_rate"] = static_cast<double>(passed) / static_cast<double>(results.size());
  emit(o, report, out);
  return passed == results.size() ? kExitOk : kExitAssertionFailed;
}

int cmd_solve(const Options& o, std::ostream& out) {
  const Matrix a = load_input(o);
  const SketchMethod method = parse_sketch_method(o.method);
  const SketchParams params = sketch_params(o);
  const auto t0 = Clock::now();
  const Sketch sk = build_sketch(a, method, params);

  SolveTask task;
  if (o.task == "lowrank") task = SolveTask::LowRank;
  else if (o.task == "kmeans") task = SolveTask::KMeans;
  else throw ConfigError("unknown task '" + o.task + "'");
  SolverParams sp;
  sp.k = o.k;
  sp.iters = o.iters;
  sp.seed = o.seed;
  if (o.solver == "exhaustive") sp.kmeans = KMeansSolver::Exhaustive;
  else if (o.solver == "lloyd") sp.kmeans = KMeansSolver::Lloyd;
  else throw ConfigError("unknown solver '" + o.solver + "'");

  const SolveResult res = sketch_and_solve(a, sk, task, sp);
  double optimum = 0.0;
  bool optimum_exact = true;
  if (task == SolveTask::LowRank) {
    optimum = projection_cost(a, best_rank_k_projection(a, o.k));
  } else if (a.rows() <= kMaxExhaustiveRows) {
    optimum = exhaustive_kmeans(a, static_cast<int>(o.k)).cost;
  } else {
    optimum = lloyd_kmeans(a, static_cast<int>(o.k), o.iters, o.seed).cost;
    optimum_exact = false;
  }

  json report = sketch_header(sk);
  json transfer;
  transfer["task"] = o.task;
  transfer["solver"] = task == SolveTask::KMeans ? o.solver : "svd";
  transfer["lhs"] = res.cost_on_a;
  transfer["cost_on_sketch"] = res.cost_on_sketch;
  transfer["optimum_on_a"] = optimum;
  transfer["optimum_exact"] = optimum_exact;
  bool holds = true;
  if (res.gamma) {
    const double gamma = *res.gamma;
    const double rhs = *res.certified_ratio * optimum + (1.0 - gamma) * sk.c_const / (1.0 - o.eps);
    holds = res.cost_on_a <= rhs + 1e-10 * frobenius_norm_sq(a);
    transfer["gamma"] = gamma;
    transfer["rhs"] = rhs;
    transfer["holds"] = optimum_exact ? json(holds) : json(nullptr);
    if (!optimum_exact) holds = true;
  } else {
    transfer["gamma"] = nullptr;
    transfer["rhs"] = nullptr;
    transfer["holds"] = nullptr;
  }
  if (res.clustering) transfer["assignment"] = res.clustering->assignment;
  report["transfer"] = std::move(transfer);
  report["timing_ms"] = {{"total", ms_since(t0)}};
  emit(o, report, out);
  return holds ? kExitOk : kExitAssertionFailed;
}

int cmd_bench(const Options& o, std::ostream& out) {
  const Matrix a = load_input(o);
  const SketchParams base = sketch_params(o);
  json report;
  report["n"] = a.rows();
  report["d"] = a.cols();
  report["seed"] = base.seed;
  json rows = json::array();
  std::stringstream names(o.methods);
  std::string name;
  const std::size_t reps = std::max<std::size_t>(1, o.trials);
  while (std::getline(names, name, ',')) {
    if (name.empty()) continue;
    const SketchMethod method = parse_sketch_method(name);
    double best = std::numeric_limits<double>::infinity();
    double total = 0.0;
    std::size_t m = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      SketchParams p = base;
      p.seed = derive_seed(base.seed, r);
      const auto t0 = Clock::now();
      const Sketch sk = build_sketch(a, method, p);
      const double t = ms_since(t0);
      best = std::min(best, t);
      total += t;
      m = sk.m;
    }
    rows.push_back({{"method", std::string(to_string(method))},
                    {"m", m},
                    {"repetitions", reps},
                    {"timing_ms", {{"min", best}, {"mean", total / static_cast<double>(reps)}}}});
  }
  report["methods"] = std::move(rows);
  emit(o, report, out);
  return kExitOk;
}

int cmd_jl_moment(const Options& o, std::ostream& out) {
  const auto t0 = Clock::now();
  const JlMomentEstimate est =
      jl_moment_estimate(parse_jl_family(o.family), o.d, o.width, o.ell, o.jl_trials, o.seed);
  json report;
  report["family"] = o.family;
  report["d"] = o.d;
  report["m"] = o.width;
  report["ell"] = est.ell;
  report["trials"] = est.trials;
  report["seed"] = o.seed;
  report["estimate"] = est.estimate;
  report["std_error"] = est.std_error;
  // E|χ²_m/m − 1|² = Var(χ²_m)/m² = 2/m.
  report["oracle"] = o.ell == 2 ? json(2.0 / static_cast<double>(o.width)) : json(nullptr);
  report["timing_ms"] = {{"total", ms_since(t0)}};
  emit(o, report, out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  if (const char* env = std::getenv("PCP_SEED"); env != nullptr && *env != '\0') {
    try {
      o.seed = std::stoull(env);
    } catch (const std::exception&) {
      err << "error: PCP_SEED must be a non-negative integer\n";
      return kExitError;
    }
  }

  CLI::App app{"Projection-cost-preserving sketches: build, certify, audit, solve"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "Input matrix (.csv, or .pcpm/.bin binary)");
    sub->add_option("--gen", o.gen, "Synthetic generator, e.g. powerlaw:n=40,d=200,alpha=1");
  };
  auto add_report = [&](CLI::App* sub) {
    sub->add_option("--report", o.report_path, "Write the report here instead of stdout");
    sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_sketch = [&](CLI::App* sub) {
    add_input(sub);
    add_report(sub);
    sub->add_option("--method", o.method,
                    "gaussian | non-oblivious | leverage | ridge | svd | orthogonal | identity");
    sub->add_option("--k", o.k, "Target rank");
    sub->add_option("--eps", o.eps, "Accuracy");
    sub->add_option("--delta", o.delta, "Failure probability");
    sub->add_option("--const-c", o.const_c, "Width constant (method default when omitted)");
    sub->add_option("--m", o.m, "Explicit sketch width");
  };

  app.add_option("--seed", o.seed, "Master seed (default 0, or $PCP_SEED)");

  CLI::App* gen = app.add_subcommand("gen", "Write a synthetic matrix");
  gen->add_option("--gen", o.gen, "Generator spec")->required();
  gen->add_option("--out", o.out_path, "Output path (stdout CSV when omitted)");

  CLI::App* sketch = app.add_subcommand("sketch", "Build a sketch and write Ã");
  add_sketch(sketch);
  sketch->add_option("--out", o.out_path, "Where to write Ã");

  CLI::App* certify = app.add_subcommand("certify", "Evaluate both sufficient-condition certificates");
  add_sketch(certify);
  certify->add_flag("--assert", o.assert_holds, "Exit 2 unless a certificate holds");

  CLI::App* verify = app.add_subcommand("verify", "Audit the sketch against the probe families");
  add_sketch(verify);
  verify->add_option("--n-random", o.n_random, "Random rank-k probes");
  verify->add_option("--lloyd-runs", o.lloyd_runs, "Seeded Lloyd runs per matrix");
  verify->add_flag("--exhaustive", o.exhaustive, "Add every k-cluster indicator probe (n <= 12)");
  verify->add_flag("--no-certify", o.no_certify, "Skip the certificates");
  verify->add_option("--trials", o.trials, "Independent seeded trials");
  verify->add_flag("--parallel", o.parallel, "Run trials concurrently");

  CLI::App* solve = app.add_subcommand("solve", "Sketch-and-solve with the transfer bound");
  add_sketch(solve);
  solve->add_option("--task", o.task, "lowrank | kmeans");
  solve->add_option("--solver", o.solver, "exhaustive | lloyd (kmeans only)");
  solve->add_option("--iters", o.iters, "Lloyd iterations");

  CLI::App* bench = app.add_subcommand("bench", "Time sketch construction");
  add_sketch(bench);
  bench->add_option("--methods", o.methods, "Comma separated methods");
  bench->add_option("--trials", o.trials, "Repetitions per method");

  CLI::App* jl = app.add_subcommand("jl-moment", "Monte-Carlo JL moment estimate");
  add_report(jl);
  jl->add_option("--family", o.family, "Random matrix family");
  jl->add_option("--d", o.d, "Ambient dimension");
  jl->add_option("--m", o.width, "Sketch width");
  jl->add_option("--ell", o.ell, "Moment order");
  jl->add_option("--trials", o.jl_trials, "Monte-Carlo trials");

  for (CLI::App* sub : {gen, sketch, certify, verify, solve, bench, jl}) {
    sub->add_option("--seed", o.seed, "Master seed");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }
  try {
    if (gen->parsed()) return cmd_gen(o, out);
    if (sketch->parsed()) return cmd_sketch(o, out, err);
    if (certify->parsed()) return cmd_certify(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    if (solve->parsed()) return cmd_solve(o, out);
    if (bench->parsed()) return cmd_bench(o, out);
    if (jl->parsed()) return cmd_jl_moment(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace pcp

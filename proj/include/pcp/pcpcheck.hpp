#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcp/linalg.hpp"
#include "pcp/matrix.hpp"
#include "pcp/primitives.hpp"

namespace pcp {

struct Probe {
  Projection projection;
  std::string tag;
};

/// Finite surrogate for "every rank-≤k orthogonal projection".
struct ProbeSet {
  std::vector<Probe> probes;
  long k = 1;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return probes.size(); }
};

struct ProbeOptions {
  std::size_t n_random = 50;
  int lloyd_runs = 5;
  int lloyd_iters = 25;
  /// Adds every k-block cluster indicator (Stirling S(n, k) probes); requires n ≤ 12.
  bool exhaustive_clusters = false;
};

/// Probe families, in order:
///   top-j left singular subspaces of A and of Ã (j = 1..k),
///   top-k left singular subspace of A with Ã's top-k subspace projected out,
///   Haar random rank-k subspaces,
///   the first k coordinate axes and the k axes of largest row norm,
///   cluster indicators from seeded Lloyd runs on the rows of A and of Ã,
///   optionally every k-block partition.
ProbeSet generate_probes(const Matrix& a, const Matrix& a_tilde, long k, std::uint64_t seed,
                         const ProbeOptions& options = {});

/// Every partition of n points into exactly k nonempty clusters, as indicator
/// projections. Throws TooLarge for n > 12.
std::vector<Probe> exhaustive_cluster_probes(std::size_t n, int k);

struct ProbeEvaluation {
  std::string tag;
  double cost_a = 0.0;
  double cost_sketch = 0.0;
  /// (cost_sketch + c − cost_a)/cost_a. For zero-cost probes this is 0 when
  /// |cost_sketch + c| ≤ 1e-8‖A‖²_F and +∞ otherwise.
  double signed_rel_err = 0.0;
  bool zero_cost = false;
};

/// Full evaluation of one probe against the two-sided cost bound.
ProbeEvaluation evaluate_probe(const Matrix& a, const Matrix& a_tilde, double c,
                               const Projection& p);
/// The signed relative error of `evaluate_probe`.
double pcp_error_on_probe(const Matrix& a, const Matrix& a_tilde, double c, const Projection& p);

struct PcpReport {
  std::vector<ProbeEvaluation> per_probe;
  double max_abs_rel_err = 0.0;
  double eps_target = 0.0;
  bool pass = false;
};

PcpReport pcp_report(const Matrix& a, const Matrix& a_tilde, double c, const ProbeSet& probes,
                     double eps_target);

struct ImplicationResult {
  Certificate certificate_t1;
  Certificate certificate_t2;
  PcpReport report;
  /// Both "certificate holds ⇒ observed error ≤ ε" implications are true.
  bool consistent = false;
};

/// Tests both sufficient-condition theorems as black boxes on Ã = AS, c = 0.
ImplicationResult implication_test(const Matrix& a, const Matrix& s, long k, double eps,
                                   const ProbeSet& probes);

struct TransferResult {
  bool bound_holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  std::size_t chosen = 0;
  double min_cost_a = 0.0;
  double min_cost_sketch = 0.0;
};

/// Picks P̃ among candidates whose sketch cost ‖Ã − PÃ‖²_F is within γ of the
/// smallest (the one with the largest true cost, ties to the lowest index) and
/// checks ‖A − P̃A‖²_F ≤ ((1+ε)γ/(1−ε))·min_P ‖A − PA‖²_F + (1−γ)c/(1−ε).
TransferResult approx_transfer_check(const Matrix& a, const Matrix& a_tilde, double c, long k,
                                     double eps, const std::vector<Projection>& candidates,
                                     double gamma);

}  // namespace pcp

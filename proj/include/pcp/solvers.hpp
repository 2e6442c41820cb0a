#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pcp/linalg.hpp"
#include "pcp/matrix.hpp"
#include "pcp/sketch.hpp"

namespace pcp {

/// Partition of the rows of a matrix. Points are rows; projections act on the
/// left, so a clustering of n points is a rank-≤k projection in ℝ^{n×n}.
struct Clustering {
  std::vector<int> assignment;
  int k = 0;
  double cost = 0.0;
  /// Objective after each Lloyd iteration (empty for exhaustive search).
  std::vector<double> cost_history;
};

inline constexpr std::size_t kMaxExhaustiveRows = 12;

/// Top-min(k, rank) left singular vectors of `m`.
Projection best_rank_k_projection(const Matrix& m, long k);

/// Normalized indicator basis of a clustering; empty clusters are dropped.
/// Throws InvalidInput for labels outside [0, k) or a length other than n.
Projection cluster_indicator_projection(std::span<const int> assignment, int k, std::size_t n);

/// Sum over clusters of squared distances of rows to their cluster mean.
double kmeans_cost(const Matrix& m, std::span<const int> assignment);

/// Relabels clusters in order of first appearance (0 for row 0's cluster, ...).
std::vector<int> canonical_labels(std::span<const int> assignment);

/// k-means++ seeding followed by Lloyd iterations until the assignment is
/// stable or `iters` is reached. A cluster that empties is re-seeded with the
/// row farthest from its current center. Deterministic per seed.
Clustering lloyd_kmeans(const Matrix& m, int k, int iters, std::uint64_t seed);

/// Visits every partition of {0..n-1} into at most `max_blocks` blocks as a
/// restricted growth string, in lexicographic order.
void enumerate_partitions(std::size_t n, int max_blocks,
                          const std::function<void(std::span<const int>)>& visit);

/// Minimum-cost clustering over all partitions into ≤ k nonempty clusters.
/// Ties keep the lexicographically smallest assignment. Throws TooLarge for
/// more than 12 rows.
Clustering exhaustive_kmeans(const Matrix& m, int k);

enum class SolveTask { LowRank, KMeans };
enum class KMeansSolver { Exhaustive, Lloyd };

struct SolverParams {
  long k = 1;
  KMeansSolver kmeans = KMeansSolver::Exhaustive;
  int iters = 50;
  std::uint64_t seed = 0;
};

struct SolveResult {
  Projection solution;
  std::optional<Clustering> clustering;
  double cost_on_a = 0.0;
  double cost_on_sketch = 0.0;
  /// γ of the sketch-side solver; unset for Lloyd, whose ratio is unknown.
  std::optional<double> gamma;
  /// (1+ε)γ/(1−ε) when γ is known.
  std::optional<double> certified_ratio;
};

/// Solves the task on Ã and evaluates the resulting projection on A.
SolveResult sketch_and_solve(const Matrix& a, const Sketch& sketch, SolveTask task,
                             const SolverParams& params);

}  // namespace pcp

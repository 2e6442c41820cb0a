#include "pcp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pcp/error.hpp"
#include "pcp/random.hpp"

namespace pcp {

Projection best_rank_k_projection(const Matrix& m, long k) {
  if (k < 1) throw InvalidRank("k must be at least 1");
  const SvdFactorization f = svd(m);
  return Projection{leading_columns(f.u, static_cast<std::size_t>(k)),
                    ProjectionKind::TopSingularOfA};
}

Projection cluster_indicator_projection(std::span<const int> assignment, int k, std::size_t n) {
  if (k < 1) throw InvalidInput("cluster count must be at least 1");
  if (assignment.size() != n) throw InvalidInput("assignment length differs from n");
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int label : assignment) {
    if (label < 0 || label >= k) throw InvalidInput("cluster label out of range");
    ++sizes[static_cast<std::size_t>(label)];
  }
  std::vector<int> column(static_cast<std::size_t>(k), -1);
  int used = 0;
  for (int c = 0; c < k; ++c)
    if (sizes[static_cast<std::size_t>(c)] > 0) column[static_cast<std::size_t>(c)] = used++;
  Matrix basis(n, static_cast<std::size_t>(used));
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(assignment[i]);
    basis(i, static_cast<std::size_t>(column[c])) = 1.0 / std::sqrt(static_cast<double>(sizes[c]));
  }
  return Projection{std::move(basis), ProjectionKind::ClusterIndicator};
}

double kmeans_cost(const Matrix& m, std::span<const int> assignment) {
  if (assignment.size() != m.rows()) throw InvalidInput("assignment length differs from rows");
  int k = 0;
  for (int label : assignment) {
    if (label < 0) throw InvalidInput("negative cluster label");
    k = std::max(k, label + 1);
  }
  const std::size_t d = m.cols();
  Matrix centers(static_cast<std::size_t>(k), d);
  std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto c = static_cast<std::size_t>(assignment[i]);
    counts[c] += 1.0;
    for (std::size_t j = 0; j < d; ++j) centers(c, j) += m(i, j);
  }
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] > 0)
      for (std::size_t j = 0; j < d; ++j) centers(c, j) /= counts[c];
  double cost = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto c = static_cast<std::size_t>(assignment[i]);
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = m(i, j) - centers(c, j);
      cost += diff * diff;
    }
  }
  return cost;
}

std::vector<int> canonical_labels(std::span<const int> assignment) {
  std::vector<int> relabel;
  std::vector<int> out(assignment.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const int label = assignment[i];
    if (label >= static_cast<int>(relabel.size())) relabel.resize(label + 1, -1);
    if (relabel[label] < 0) {
      relabel[label] = static_cast<int>(std::count_if(relabel.begin(), relabel.end(),
                                                      [](int x) { return x >= 0; }));
    }
    out[i] = relabel[label];
  }
  return out;
}

namespace {

double sq_dist(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = x[j] - y[j];
    s += diff * diff;
  }
  return s;
}

Matrix cluster_means(const Matrix& m, const std::vector<int>& assignment, int k,
                     std::vector<std::size_t>& counts) {
  Matrix centers(static_cast<std::size_t>(k), m.cols());
  counts.assign(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto c = static_cast<std::size_t>(assignment[i]);
    ++counts[c];
    for (std::size_t j = 0; j < m.cols(); ++j) centers(c, j) += m(i, j);
  }
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] > 0)
      for (std::size_t j = 0; j < m.cols(); ++j)
        centers(c, j) /= static_cast<double>(counts[c]);
  return centers;
}

}  // namespace

Clustering lloyd_kmeans(const Matrix& m, int k, int iters, std::uint64_t seed) {
  require_input(m);
  if (k < 1) throw InvalidInput("k must be at least 1");
  if (iters < 1) throw InvalidInput("iters must be at least 1");
  const std::size_t n = m.rows();
  if (n < static_cast<std::size_t>(k)) {
    throw InvalidInput("lloyd_kmeans: " + std::to_string(n) + " rows cannot form " +
                       std::to_string(k) + " clusters");
  }
  const auto kk = static_cast<std::size_t>(k);

  // k-means++ seeding.
  CounterRng rng(seed);
  std::vector<std::size_t> chosen;
  chosen.push_back(static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)) % n);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(m.row(i), m.row(chosen[0]));
  while (chosen.size() < kk) {
    double total = 0.0;
    for (double x : d2) total += x;
    std::size_t pick = n;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && u < acc) {
          pick = i;
          break;
        }
      }
      if (pick == n) {
        for (std::size_t i = n; i-- > 0;)
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
      }
    } else {
      // All remaining points coincide with a center: take the first unused row.
      for (std::size_t i = 0; i < n && pick == n; ++i)
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) pick = i;
    }
    chosen.push_back(pick);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(m.row(i), m.row(pick)));
  }
  Matrix centers(kk, m.cols());
  for (std::size_t c = 0; c < kk; ++c)
    for (std::size_t j = 0; j < m.cols(); ++j) centers(c, j) = m(chosen[c], j);

  Clustering out;
  out.k = k;
  out.assignment.assign(n, -1);
  std::vector<std::size_t> counts;
  for (int it = 0; it < iters; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = out.assignment[i];
      double best_d = best >= 0 ? sq_dist(m.row(i), centers.row(static_cast<std::size_t>(best)))
                                : std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < kk; ++c) {
        const double dc = sq_dist(m.row(i), centers.row(c));
        if (dc < best_d) {
          best_d = dc;
          best = static_cast<int>(c);
        }
      }
      if (best != out.assignment[i]) {
        out.assignment[i] = best;
        changed = true;
      }
    }
    // Re-seed empty clusters with the point farthest from its own center.
    counts.assign(kk, 0);
    for (int label : out.assignment) ++counts[static_cast<std::size_t>(label)];
    for (std::size_t c = 0; c < kk; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto own = static_cast<std::size_t>(out.assignment[i]);
        if (counts[own] < 2) continue;
        const double di = sq_dist(m.row(i), centers.row(own));
        if (di > far_d) {
          far_d = di;
          far = i;
        }
      }
      if (far == n) continue;
      --counts[static_cast<std::size_t>(out.assignment[far])];
      out.assignment[far] = static_cast<int>(c);
      ++counts[c];
      changed = true;
    }
    centers = cluster_means(m, out.assignment, k, counts);
    out.cost_history.push_back(kmeans_cost(m, out.assignment));
    if (!changed && it > 0) break;
  }
  out.assignment = canonical_labels(out.assignment);
  out.cost = out.cost_history.back();
  return out;
}

void enumerate_partitions(std::size_t n, int max_blocks,
                          const std::function<void(std::span<const int>)>& visit) {
  if (n == 0 || max_blocks < 1) return;
  std::vector<int> rgs(n, 0);
  // prefix_max[i] = max(rgs[0..i]).
  std::vector<int> prefix_max(n, 0);
  while (true) {
    visit(rgs);
    std::size_t i = n - 1;
    while (i > 0) {
      const int bound = std::min(prefix_max[i - 1] + 1, max_blocks - 1);
      if (rgs[i] < bound) break;
      --i;
    }
    if (i == 0) return;
    ++rgs[i];
    prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      rgs[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
}

Clustering exhaustive_kmeans(const Matrix& m, int k) {
  require_input(m);
  if (k < 1) throw InvalidInput("k must be at least 1");
  if (m.rows() > kMaxExhaustiveRows) {
    throw TooLarge("exhaustive_kmeans: " + std::to_string(m.rows()) + " rows exceeds the cap of " +
                   std::to_string(kMaxExhaustiveRows));
  }
  const double scale = frobenius_norm_sq(m);
  Clustering best;
  best.k = k;
  best.cost = std::numeric_limits<double>::infinity();
  enumerate_partitions(m.rows(), k, [&](std::span<const int> rgs) {
    const double c = kmeans_cost(m, rgs);
    if (c < best.cost - 1e-12 * scale) {
      best.cost = c;
      best.assignment.assign(rgs.begin(), rgs.end());
    }
  });
  return best;
}

SolveResult sketch_and_solve(const Matrix& a, const Sketch& sketch, SolveTask task,
                             const SolverParams& params) {
  require_input(a);
  if (params.k < 1) throw InvalidRank("k must be at least 1");
  if (sketch.a_tilde.rows() != a.rows()) throw DimensionError("sketch and A differ in rows");
  const Matrix& at = sketch.a_tilde;
  SolveResult out;
  if (task == SolveTask::LowRank) {
    out.solution = best_rank_k_projection(at, params.k);
    out.solution.kind = ProjectionKind::TopSingularOfSketch;
    out.gamma = 1.0;
  } else {
    const int k = static_cast<int>(params.k);
    Clustering c = params.kmeans == KMeansSolver::Exhaustive
                       ? exhaustive_kmeans(at, k)
                       : lloyd_kmeans(at, k, params.iters, params.seed);
    out.solution = cluster_indicator_projection(c.assignment, k, a.rows());
    if (params.kmeans == KMeansSolver::Exhaustive) out.gamma = 1.0;
    out.clustering = std::move(c);
  }
  out.cost_on_a = projection_cost(a, out.solution);
  out.cost_on_sketch = projection_cost(at, out.solution);
  if (out.gamma) {
    const double eps = sketch.params.eps;
    out.certified_ratio = (1.0 + eps) * *out.gamma / (1.0 - eps);
  }
  return out;
}

}  // namespace pcp

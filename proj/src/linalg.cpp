#include "pcp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pcp/error.hpp"
#include "pcp/random.hpp"

namespace pcp {

namespace {

constexpr int kMaxSweeps = 80;
constexpr double kJacobiEps = 1e-15;

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void rotate(std::vector<double>& x, std::vector<double>& y, double c, double s) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

/// I − τ·vvᵀ acting on the coordinates of a vector from `offset` onward.
struct Reflector {
  std::size_t offset = 0;
  std::vector<double> v;
  double tau = 0.0;

  void apply(std::vector<double>& x) const {
    if (tau == 0.0) return;
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * x[offset + i];
    s *= tau;
    for (std::size_t i = 0; i < v.size(); ++i) x[offset + i] -= s * v[i];
  }
};

/// In-place Householder QR of the column set `cols`; leaves R in the leading
/// entries and returns Q as a product of reflectors.
std::vector<Reflector> householder_qr(std::vector<std::vector<double>>& cols) {
  const std::size_t q = cols.size();
  const std::size_t p = q == 0 ? 0 : cols[0].size();
  std::vector<Reflector> out;
  out.reserve(q);
  for (std::size_t j = 0; j < q; ++j) {
    Reflector h;
    h.offset = j;
    h.v.assign(cols[j].begin() + static_cast<std::ptrdiff_t>(j), cols[j].end());
    double norm = 0.0;
    for (double x : h.v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      const double alpha = h.v[0] >= 0.0 ? -norm : norm;
      h.v[0] -= alpha;
      double vv = 0.0;
      for (double x : h.v) vv += x * x;
      h.tau = vv > 0.0 ? 2.0 / vv : 0.0;
    }
    for (std::size_t c = j; c < q; ++c) h.apply(cols[c]);
    for (std::size_t i = j + 1; i < p; ++i) cols[j][i] = 0.0;
    out.push_back(std::move(h));
  }
  return out;
}

/// Orthogonalizes the columns `w` by plane rotations accumulated into `v`.
/// The stopping threshold scales with √length to sit above rounding noise.
void one_sided_jacobi(std::vector<std::vector<double>>& w, std::vector<std::vector<double>>& v,
                      std::vector<double>& norms) {
  const std::size_t q = w.size();
  const double threshold =
      kJacobiEps * std::max(1.0, std::sqrt(static_cast<double>(q == 0 ? 0 : w[0].size())));
  for (std::size_t j = 0; j < q; ++j) norms[j] = dot(w[j], w[j]);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < q; ++i) {
      for (std::size_t j = i + 1; j < q; ++j) {
        const double alpha = norms[i];
        const double beta = norms[j];
        if (alpha == 0.0 || beta == 0.0) continue;
        const double gamma = dot(w[i], w[j]);
        if (std::abs(gamma) <= threshold * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        rotate(w[i], w[j], c, s);
        rotate(v[i], v[j], c, s);
        norms[i] = dot(w[i], w[i]);
        norms[j] = dot(w[j], w[j]);
      }
    }
    if (!rotated) break;
  }
}

}  // namespace

double SvdFactorization::tail_energy(std::size_t r) const noexcept {
  double s = 0.0;
  for (std::size_t i = r; i < sigma.size(); ++i) s += sigma[i] * sigma[i];
  return s;
}

SvdFactorization svd(const Matrix& a, double tol) {
  require_input(a, "svd input");
  if (!(tol >= 0.0 && tol < 1.0)) throw InvalidInput("svd tolerance must lie in [0, 1)");

  // Work on W (p x q, p >= q) stored as q columns of length p.
  const bool transposed = a.rows() < a.cols();
  const std::size_t p = transposed ? a.cols() : a.rows();
  const std::size_t q = transposed ? a.rows() : a.cols();

  std::vector<std::vector<double>> w(q, std::vector<double>(p));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (transposed) w[i][j] = a(i, j);
      else w[j][i] = a(i, j);
    }
  // Tall inputs are first reduced to their q x q triangular factor.
  std::vector<Reflector> reflectors;
  if (p > q) {
    reflectors = householder_qr(w);
    for (auto& col : w) col.resize(q);
  }
  std::vector<std::vector<double>> v(q, std::vector<double>(q, 0.0));
  for (std::size_t j = 0; j < q; ++j) v[j][j] = 1.0;
  std::vector<double> norms(q);
  one_sided_jacobi(w, v, norms);

  std::vector<double> sv(q);
  for (std::size_t j = 0; j < q; ++j) sv[j] = std::sqrt(norms[j]);
  std::vector<std::size_t> order(q);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sv[x] > sv[y]; });

  const double cutoff = q == 0 ? 0.0 : tol * sv[order[0]];
  std::size_t rank = 0;
  while (rank < q && sv[order[rank]] > cutoff && sv[order[rank]] > 0.0) ++rank;

  // Left factor of W is w/σ, right factor is v.
  Matrix left(p, rank);
  Matrix right(q, rank);
  SvdFactorization f;
  f.sigma.resize(rank);
  for (std::size_t r = 0; r < rank; ++r) {
    const std::size_t j = order[r];
    const double s = sv[j];
    f.sigma[r] = s;
    std::vector<double> col(p, 0.0);
    for (std::size_t i = 0; i < w[j].size(); ++i) col[i] = w[j][i] / s;
    for (std::size_t h = reflectors.size(); h-- > 0;) reflectors[h].apply(col);
    for (std::size_t i = 0; i < p; ++i) left(i, r) = col[i];
    for (std::size_t i = 0; i < q; ++i) right(i, r) = v[j][i];
  }
  f.u = transposed ? std::move(right) : std::move(left);
  f.v = transposed ? std::move(left) : std::move(right);
  f.rank = rank;
  f.tol = tol;
  return f;
}

SymmetricEigen sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("sym_eig: matrix is not square");
  if (!all_finite(a)) throw InvalidMatrix("sym_eig: non-finite entries");
  const std::size_t n = a.rows();
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) s(i, j) = s(j, i) = a(i, j);
  Matrix vec = Matrix::identity(n);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diag += s(i, i) * s(i, i);
      for (std::size_t j = i + 1; j < n; ++j) off += s(i, j) * s(i, j);
    }
    if (off <= 1e-32 * diag || off == 0.0) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = s(p, q);
        if (apq == 0.0) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double skp = s(k, p);
          const double skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double spk = s(p, k);
          const double sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
        s(p, q) = s(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = vec(k, p);
          const double vkq = vec(k, q);
          vec(k, p) = c * vkp - sn * vkq;
          vec(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return s(x, x) > s(y, y); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    out.values[r] = s(order[r], order[r]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, r) = vec(k, order[r]);
  }
  return out;
}

HeadTailSplit head_tail_split(const SvdFactorization& fact, const Matrix& m, long r) {
  if (r < 0) throw InvalidRank("head_tail_split: r must be non-negative");
  if (fact.u.rows() != m.rows() || fact.v.rows() != m.cols()) {
    throw DimensionError("head_tail_split: factorization does not match matrix");
  }
  const std::size_t kept = std::min<std::size_t>(static_cast<std::size_t>(r), fact.rank);
  HeadTailSplit split;
  split.r = static_cast<std::size_t>(r);
  split.u_r = leading_columns(fact.u, kept);
  split.v_r = leading_columns(fact.v, kept);
  if (kept == fact.rank) {
    split.head = m;
    split.tail = Matrix(m.rows(), m.cols());
  } else {
    split.head = matmul(split.u_r, matmul_tn(split.u_r, m));
    split.tail = m - split.head;
  }
  return split;
}

std::size_t tail_index_p(const SvdFactorization& fact, long k) {
  if (k < 1) throw InvalidRank("tail_index_p: k must be at least 1");
  const auto kk = static_cast<std::size_t>(k);
  const double tail = fact.tail_energy(kk);
  if (tail == 0.0) return fact.rank;
  const double threshold = tail / static_cast<double>(kk);
  std::size_t p = 0;
  for (std::size_t i = 0; i < fact.rank; ++i) {
    if (fact.sigma[i] * fact.sigma[i] >= threshold) p = i + 1;
  }
  return p;
}

std::string_view to_string(ProjectionKind kind) noexcept {
  switch (kind) {
    case ProjectionKind::RandomSubspace: return "random-subspace";
    case ProjectionKind::TopSingularOfA: return "top-singular-of-A";
    case ProjectionKind::TopSingularOfSketch: return "top-singular-of-sketch";
    case ProjectionKind::ClusterIndicator: return "cluster-indicator";
    case ProjectionKind::BasisAxes: return "basis-axes";
    case ProjectionKind::Custom: return "custom";
  }
  return "custom";
}

Projection make_projection(Matrix basis, ProjectionKind kind) {
  if (!all_finite(basis)) throw InvalidMatrix("projection basis has non-finite entries");
  if (basis.cols() > basis.rows()) throw InvalidRank("projection basis has more columns than rows");
  if (orthonormality_defect(basis) > 1e-8) {
    throw InvalidInput("projection basis columns are not orthonormal");
  }
  return Projection{std::move(basis), kind};
}

double projection_cost(const Matrix& a, const Projection& p) {
  if (p.basis.rows() != a.rows()) {
    throw DimensionError("projection_cost: basis has " + std::to_string(p.basis.rows()) +
                         " rows, matrix has " + std::to_string(a.rows()));
  }
  const double total = frobenius_norm_sq(a);
  if (p.rank() == 0) return total;
  const Matrix qta = matmul_tn(p.basis, a);
  const double cost = total - frobenius_norm_sq(qta);
  // Cancellation dominates the Pythagorean form once the residual is small;
  // recompute those directly from the n x d residual.
  if (cost < 1e-4 * total) return frobenius_norm_sq(a - matmul(p.basis, qta));
  return cost;
}

Matrix orthonormalize(const Matrix& a, double drop_tol) {
  const std::size_t n = a.rows();
  std::vector<std::vector<double>> kept;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    std::vector<double> x = a.col(j);
    const double original = std::sqrt(dot(x, x));
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : kept) {
        const double h = dot(q, x);
        for (std::size_t i = 0; i < n; ++i) x[i] -= h * q[i];
      }
    }
    const double norm = std::sqrt(dot(x, x));
    if (norm <= drop_tol * original) continue;
    for (double& xi : x) xi /= norm;
    kept.push_back(std::move(x));
  }
  Matrix q(n, kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) q(i, j) = kept[j][i];
  return q;
}

Projection haar_subspace(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 1 || k > n) {
    throw InvalidRank("haar_subspace: need 1 <= k <= n, got k=" + std::to_string(k) +
                      ", n=" + std::to_string(n));
  }
  CounterRng rng(seed);
  Matrix basis = orthonormalize(gaussian_matrix(n, k, rng), 0.0);
  return Projection{std::move(basis), ProjectionKind::RandomSubspace};
}

Matrix haar_orthogonal(std::size_t n, std::uint64_t seed) {
  return haar_subspace(n, n, seed).basis;
}

}  // namespace pcp

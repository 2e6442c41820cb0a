#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "pcp/matrix.hpp"

namespace pcp {

inline constexpr double kDefaultSvdTol = 1e-10;

/// Thin SVD truncated at the numerical rank.
struct SvdFactorization {
  Matrix u;                   ///< n x rank, orthonormal columns
  std::vector<double> sigma;  ///< strictly positive, non-increasing
  Matrix v;                   ///< d x rank, orthonormal columns
  std::size_t rank = 0;
  double tol = kDefaultSvdTol;

  /// Σ_{i>r} σ_i², the squared Frobenius norm of the rank-r residual.
  double tail_energy(std::size_t r) const noexcept;
  double total_energy() const noexcept { return tail_energy(0); }
};

/// One-sided (Hestenes) Jacobi SVD applied to the thinner orientation of `a`.
///
/// Singular values at or below tol·σ₁ are dropped. Deterministic for a fixed
/// input. Throws InvalidMatrix on non-finite or empty input.
SvdFactorization svd(const Matrix& a, double tol = kDefaultSvdTol);

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;  ///< column i pairs with values[i]
};

/// Cyclic Jacobi eigensolver. Only the upper triangle is read.
SymmetricEigen sym_eig(const Matrix& a);

/// M = head + tail with head = U_r U_rᵀ M the best rank-r approximation.
struct HeadTailSplit {
  std::size_t r = 0;
  Matrix head;
  Matrix tail;
  Matrix u_r;
  Matrix v_r;
};

/// Splits `m` using its factorization `fact`. Ranks beyond rank(M) keep the
/// whole matrix in the head. Throws InvalidRank for r < 0.
HeadTailSplit head_tail_split(const SvdFactorization& fact, const Matrix& m, long r);

/// Largest p with σ_p² ≥ ‖A − A_k‖²_F / k, or rank(A) when the residual
/// vanishes. Ties go to the head. Throws InvalidRank for k < 1.
std::size_t tail_index_p(const SvdFactorization& fact, long k);

enum class ProjectionKind {
  RandomSubspace,
  TopSingularOfA,
  TopSingularOfSketch,
  ClusterIndicator,
  BasisAxes,
  Custom,
};

std::string_view to_string(ProjectionKind kind) noexcept;

/// Orthogonal projection P = QQᵀ, carried by its orthonormal basis Q (n x k').
struct Projection {
  Matrix basis;
  ProjectionKind kind = ProjectionKind::Custom;

  std::size_t dim() const noexcept { return basis.rows(); }
  std::size_t rank() const noexcept { return basis.cols(); }
};

/// Wraps a caller-supplied basis; throws InvalidInput unless ‖QᵀQ − I‖_max ≤ 1e-8.
Projection make_projection(Matrix basis, ProjectionKind kind = ProjectionKind::Custom);

/// ‖A − QQᵀA‖²_F. Throws DimensionError when Q and A disagree on n.
double projection_cost(const Matrix& a, const Projection& p);

/// Modified Gram-Schmidt with one re-orthogonalization pass. Columns whose
/// residual norm falls below `drop_tol` times their original norm are dropped.
Matrix orthonormalize(const Matrix& a, double drop_tol = 1e-10);

/// Span of an n x k standard-normal matrix, orthonormalized. Throws InvalidRank
/// unless 1 ≤ k ≤ n.
Projection haar_subspace(std::size_t n, std::size_t k, std::uint64_t seed);

/// Haar-distributed n x n orthogonal matrix.
Matrix haar_orthogonal(std::size_t n, std::uint64_t seed);

}  // namespace pcp

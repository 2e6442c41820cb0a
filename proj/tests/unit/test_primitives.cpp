#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "pcp/error.hpp"
#include "pcp/linalg.hpp"
#include "pcp/primitives.hpp"
#include "pcp/random.hpp"
#include "pcp/sketch.hpp"

using namespace pcp;

namespace {

Matrix normal_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  CounterRng rng(seed);
  return gaussian_matrix(n, d, rng);
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

Matrix scaled_gaussian(std::size_t d, std::size_t m, std::uint64_t seed) {
  return (1.0 / std::sqrt(static_cast<double>(m))) * normal_matrix(d, m, seed);
}

double min_eigenvalue(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  return es.eigenvalues()(0);
}

}  // namespace

TEST(SubspaceEmbedding, Examples) {
  EXPECT_NEAR(subspace_embedding_error(normal_matrix(3, 5, 1), Matrix::identity(5)), 0.0, 1e-12);
  const Matrix s = Matrix::from_rows({{std::sqrt(2.0)}, {0.0}});
  EXPECT_NEAR(subspace_embedding_error(Matrix::identity(2), s), 1.0, 1e-12);
  EXPECT_THROW(subspace_embedding_error(Matrix(2, 2), Matrix::identity(2)), ZeroMatrix);
  EXPECT_THROW(subspace_embedding_error(Matrix::identity(2), Matrix::identity(3)), DimensionError);
}

TEST(SubspaceEmbedding, WitnessAttainsAndBoundsProbes) {
  CounterRng rng(3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix m = normal_matrix(4, 6, seed);
    const Matrix s = scaled_gaussian(6, 5, seed + 100);
    const EmbeddingWitness w = subspace_embedding_witness(m, s);
    const Eigen::MatrixXd em = to_eigen(m), es = to_eigen(s);
    auto ratio = [&](const Eigen::VectorXd& x) {
      const double base = (x.transpose() * em).squaredNorm();
      return std::abs(base - (x.transpose() * em * es).squaredNorm()) / base;
    };
    Eigen::VectorXd x(4);
    for (int t = 0; t < 500; ++t) {
      for (int i = 0; i < 4; ++i) x(i) = rng.normal();
      EXPECT_LE(ratio(x), w.error * (1.0 + 1e-10) + 1e-14);
    }
    const Eigen::VectorXd wx = Eigen::Map<const Eigen::VectorXd>(w.x.data(), 4);
    EXPECT_NEAR(ratio(wx), w.error, 1e-9);
  }
}

TEST(Amm, Examples) {
  const Matrix m = normal_matrix(4, 6, 1);
  const Matrix n = normal_matrix(6, 3, 2);
  EXPECT_NEAR(amm_error(m, n, Matrix::identity(6)), 0.0, 1e-14);
  const double zero_s = amm_error(m, n, Matrix(6, 2));
  EXPECT_NEAR(zero_s, frobenius_norm(matmul(m, n)) / (frobenius_norm(m) * frobenius_norm(n)),
              1e-14);
  EXPECT_LE(zero_s, 1.0);
  EXPECT_THROW(amm_error(m, normal_matrix(5, 3, 1), Matrix::identity(6)), DimensionError);
}

TEST(Amm, MatchesDirectTripleProduct) {
  const Matrix m = normal_matrix(4, 6, 1);
  const Matrix n = normal_matrix(6, 3, 2);
  const Matrix s = normal_matrix(6, 2, 3);
  const Eigen::MatrixXd em = to_eigen(m), en = to_eigen(n), es = to_eigen(s);
  const double direct =
      (em * en - em * es * es.transpose() * en).norm() / (em.norm() * en.norm());
  EXPECT_NEAR(amm_error(m, n, s), direct, 1e-10);
}

TEST(FrobeniusPreservation, Examples) {
  const Matrix m = normal_matrix(3, 5, 1);
  EXPECT_NEAR(frobenius_preservation_error(m, haar_orthogonal(5, 4)), 0.0, 1e-13);
  EXPECT_NEAR(frobenius_preservation_error(m, Matrix(5, 3)), 1.0, 1e-15);
  const Matrix s = normal_matrix(5, 4, 2);
  const Eigen::MatrixXd em = to_eigen(m), es = to_eigen(s);
  EXPECT_NEAR(frobenius_preservation_error(m, s),
              std::abs(em.squaredNorm() - (em * es).squaredNorm()) / em.squaredNorm(), 1e-12);
}

TEST(SpectralApprox, Examples) {
  const Matrix a = normal_matrix(4, 6, 1);
  EXPECT_NEAR(spectral_approx_error(a, haar_orthogonal(6, 3), 0.7), 0.0, 1e-12);
  const double d[] = {2.0, 1.0};
  EXPECT_NEAR(spectral_approx_error(Matrix::diagonal(d), Matrix(2, 1), 1.0), 0.75, 1e-14);
}

TEST(SpectralApprox, CertifiedBySandwichEigenvalues) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const Matrix a = normal_matrix(5, 8, seed);
    const Matrix s = scaled_gaussian(8, 6, seed + 50);
    const double lambda = 0.3 * frobenius_norm_sq(a) / 5.0;
    const double e = spectral_approx_error(a, s, lambda);
    const Eigen::MatrixXd ea = to_eigen(a), es = to_eigen(s);
    const Eigen::MatrixXd aat = ea * ea.transpose();
    const Eigen::MatrixXd ass = ea * es * es.transpose() * ea.transpose();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(5, 5);
    auto sandwich_min = [&](double eps) {
      return std::min(min_eigenvalue(ass - (1.0 - eps) * aat + lambda * id),
                      min_eigenvalue((1.0 + eps) * aat + lambda * id - ass));
    };
    EXPECT_GE(sandwich_min(e + 1e-8), -1e-8);
    if (e > 1e-4) EXPECT_LT(sandwich_min(e - 1e-4), 0.0);
  }
}

TEST(Certificates, OrthogonalSketchHoldsEverywhere) {
  const Matrix a = normal_matrix(6, 9, 2);
  const Matrix s = haar_orthogonal(9, 7);
  for (long k : {1L, 3L}) {
    const Certificate c1 = certify_theorem1(a, s, k, 0.1);
    EXPECT_TRUE(c1.holds);
    for (const auto& c : c1.conditions) EXPECT_NEAR(c.measured, 0.0, 1e-12) << c.name;
    const Certificate c2 = certify_theorem2(a, s, k, 0.1);
    EXPECT_TRUE(c2.holds);
    EXPECT_NEAR(c2.condition("spectral_eps").measured, 0.0, 1e-12);
    EXPECT_NEAR(c2.condition("frob_tail_p").measured, 0.0, 1e-12);
  }
}

TEST(Certificates, ZeroSketchFails) {
  const Matrix a = normal_matrix(5, 7, 3);
  const Certificate c1 = certify_theorem1(a, Matrix(7, 2), 2, 0.5);
  EXPECT_FALSE(c1.holds);
  EXPECT_NEAR(c1.condition("se_err").measured, 1.0, 1e-14);
  EXPECT_FALSE(certify_theorem2(a, Matrix(7, 2), 2, 0.5).holds);
}

TEST(Certificates, MatrixApproxComposesPrimitives) {
  const Matrix a = normal_matrix(6, 10, 4);
  const Matrix s = scaled_gaussian(10, 400, 5);
  const long k = 2;
  const Certificate c = certify_theorem1(a, s, k, 0.5);
  const SvdFactorization f = svd(a);
  const HeadTailSplit split = head_tail_split(f, a, k);
  EXPECT_EQ(c.condition("se_err").measured, subspace_embedding_error(split.head, s));
  EXPECT_EQ(c.condition("amm_tail_tail").measured, amm_error(split.tail, transpose(split.tail), s));
  EXPECT_EQ(c.condition("amm_tail_vk").measured, amm_error(split.tail, split.v_r, s));
  EXPECT_EQ(c.condition("frob_tail").measured, frobenius_preservation_error(split.tail, s));
  EXPECT_DOUBLE_EQ(c.condition("amm_tail_vk").threshold, 0.5 / (6.0 * std::sqrt(2.0)));
  EXPECT_DOUBLE_EQ(c.condition("se_err").threshold, 0.5 / 3.0);
}

TEST(Certificates, SpectralComposesPrimitives) {
  const Matrix a = normal_matrix(6, 10, 4);
  SketchParams p;
  p.k = 2;
  p.eps = 0.5;
  p.seed = 3;
  p.m_override = 5000;
  const Matrix s = ridge_leverage_sample(a, p).operator_matrix();
  const Certificate c = certify_theorem2(a, s, 2, 0.5);
  const SvdFactorization f = svd(a);
  const double lambda = 0.5 * f.tail_energy(2) / 48.0;
  EXPECT_DOUBLE_EQ(c.lambda_used, lambda);
  EXPECT_EQ(c.p_used, tail_index_p(f, 2));
  EXPECT_EQ(c.condition("spectral_eps").measured, spectral_approx_error(a, s, lambda));
  const HeadTailSplit split = head_tail_split(f, a, static_cast<long>(c.p_used));
  EXPECT_EQ(c.condition("frob_tail_p").measured, frobenius_preservation_error(split.tail, s));
  EXPECT_DOUBLE_EQ(c.condition("spectral_eps").threshold, 0.5 / 24.0);
}

TEST(Certificates, Errors) {
  EXPECT_THROW(certify_theorem1(Matrix::identity(3), Matrix::identity(2), 1, 0.5), DimensionError);
  EXPECT_THROW(certify_theorem1(Matrix::identity(3), Matrix::identity(3), 0, 0.5), InvalidRank);
}

TEST(JlMoment, SecondMomentMatchesChiSquare) {
  const JlMomentEstimate est = jl_moment_estimate(JlFamily::Gaussian, 50, 100, 2, 100000, 1);
  EXPECT_NEAR(est.estimate, 0.02, 0.002);
}

TEST(JlMoment, StandardErrorShrinks) {
  const auto small = jl_moment_estimate(JlFamily::Gaussian, 10, 20, 2, 100, 4);
  const auto large = jl_moment_estimate(JlFamily::Gaussian, 10, 20, 2, 100000, 4);
  const double ratio = small.std_error / large.std_error;
  EXPECT_GT(ratio, std::sqrt(1000.0) / 2.0);
  EXPECT_LT(ratio, std::sqrt(1000.0) * 2.0);
}

TEST(JlMoment, Errors) {
  EXPECT_THROW(parse_jl_family("sparse"), Unsupported);
  EXPECT_THROW(jl_moment_estimate(JlFamily::Gaussian, 10, 10, 1, 1000, 0), InvalidInput);
  EXPECT_THROW(jl_moment_estimate(JlFamily::Gaussian, 10, 10, 2, 10, 0), InvalidInput);
}

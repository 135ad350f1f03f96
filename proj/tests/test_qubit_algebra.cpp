#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <bellmix/error.hpp>
#include <bellmix/harness.hpp>
#include <bellmix/qubit_algebra.hpp>
#include <bellmix/states.hpp>

#include "test_support.hpp"

namespace bellmix {
namespace {

double reconstruction_error(const ComplexMatrix& m, const HermitianEigen& e) {
  const ComplexMatrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  return max_abs_diff(back, m);
}

double unitarity_error(const ComplexMatrix& v) {
  return max_abs_diff(v.adjoint() * v, ComplexMatrix::Identity(v.rows(), v.cols()));
}

TEST(HermitianEigen, Identity) {
  const auto e = hermitian_eigen(ComplexMatrix::Identity(4, 4));
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(e.values(k), 1.0, 1e-15);
  EXPECT_LE(unitarity_error(e.vectors), 1e-12);
}

TEST(HermitianEigen, DiagonalIsSortedDescending) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 0.2;
  m(1, 1) = 0.0;
  m(2, 2) = 0.5;
  m(3, 3) = 0.3;
  const auto e = hermitian_eigen(m);
  EXPECT_DOUBLE_EQ(e.values(0), 0.5);
  EXPECT_DOUBLE_EQ(e.values(1), 0.3);
  EXPECT_DOUBLE_EQ(e.values(2), 0.2);
  EXPECT_DOUBLE_EQ(e.values(3), 0.0);
}

TEST(HermitianEigen, DutyCycleQuarterSpectrum) {
  // HH/VV block [[1/2, -1/4], [-1/4, 1/2]] has eigenvalues 1/2 +- 1/4.
  const auto e = hermitian_eigen(mix_duty_cycle(0.25).matrix());
  EXPECT_NEAR(e.values(0), 0.75, 1e-14);
  EXPECT_NEAR(e.values(1), 0.25, 1e-14);
  EXPECT_NEAR(e.values(2), 0.0, 1e-14);
  EXPECT_NEAR(e.values(3), 0.0, 1e-14);
}

TEST(HermitianEigen, RejectsNonHermitian) {
  ComplexMatrix m = ComplexMatrix::Identity(4, 4);
  m(0, 1) = Complex(0.0, 1e-6);
  try {
    hermitian_eigen(m);
    FAIL() << "expected NonHermitianInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonHermitianInput);
  }
}

TEST(HermitianEigen, RejectsUnsupportedShapeAndNaN) {
  EXPECT_THROW(hermitian_eigen(ComplexMatrix::Identity(3, 3)), Error);
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 0) = std::nan("");
  EXPECT_THROW(hermitian_eigen(m), Error);
}

TEST(HermitianEigen, RandomReconstructionProperty) {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = (trial % 4 == 0) ? 2 : 4;
    const ComplexMatrix m = testing::random_hermitian(rng, dim);
    const auto e = hermitian_eigen(m);
    worst = std::max(worst, reconstruction_error(m, e));
    ASSERT_LE(unitarity_error(e.vectors), 1e-10) << "trial " << trial;
    for (int k = 1; k < dim; ++k) ASSERT_GE(e.values(k - 1), e.values(k));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(HermitianEigen, AgreesWithEigenSelfAdjointSolver) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const ComplexMatrix m = testing::random_hermitian(rng, 4);
    const Eigen::VectorXd reference = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(m).eigenvalues().reverse();
    EXPECT_LE((hermitian_eigen(m).values - reference).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(HermitianEigen, DegenerateSpectrumStillReconstructs) {
  std::mt19937_64 rng(3);
  const ComplexMatrix u = testing::random_unitary(rng, 4);
  Eigen::Vector4d d(0.4, 0.4, 0.1, 0.1);
  const ComplexMatrix m = u * d.cast<Complex>().asDiagonal() * u.adjoint();
  const auto e = hermitian_eigen(0.5 * (m + m.adjoint()));
  EXPECT_LE(reconstruction_error(m, e), 1e-12);
  EXPECT_NEAR(e.values(1), 0.4, 1e-12);
  EXPECT_NEAR(e.values(2), 0.1, 1e-12);
}

TEST(MatrixSqrt, IdentityAndDiagonal) {
  EXPECT_LE(max_abs_diff(matrix_sqrt(ComplexMatrix::Identity(4, 4)), ComplexMatrix::Identity(4, 4)), 1e-15);
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 4.0 / 5.0;
  m(1, 1) = 1.0 / 5.0;
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(0, 0) = 2.0 / std::sqrt(5.0);
  expected(1, 1) = 1.0 / std::sqrt(5.0);
  EXPECT_LE(max_abs_diff(matrix_sqrt(m), expected), 1e-15);
}

TEST(MatrixSqrt, PureProjectorIsIdempotent) {
  const Matrix4c p = bell_state(BellKind::PhiPlus).projector();
  EXPECT_LE(max_abs_diff(matrix_sqrt(p), p), 1e-14);
}

TEST(MatrixSqrt, SquaresBackForRandomPsd) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int rank = 1 + trial % 4;
    const DensityMatrix rho = testing::random_state(rng, rank);
    const ComplexMatrix r = matrix_sqrt(rho.matrix());
    ASSERT_LE(max_abs_diff(r * r, rho.matrix()), 1e-8);
    ASSERT_LE(hermiticity_defect(r), 1e-14);
    ASSERT_GE(hermitian_eigen(r).values.minCoeff(), -1e-12);
  }
}

TEST(MatrixSqrt, ClipsRoundoffNegativesRejectsRealOnes) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 1) = -1e-11;
  EXPECT_NO_THROW(matrix_sqrt(m));
  m(1, 1) = -1e-3;
  try {
    matrix_sqrt(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidState);
  }
}

TEST(NearestPhysical, PhysicalInputUnchanged) {
  const DensityMatrix rho = mix_duty_cycle(0.5);
  EXPECT_LE(max_abs_diff(nearest_physical(rho.matrix()).matrix(), rho.matrix()), 1e-12);
}

TEST(NearestPhysical, ClipsAndRenormalizes) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 1.01;
  m(1, 1) = -0.01;
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(0, 0) = 1.0;
  EXPECT_LE(max_abs_diff(nearest_physical(m).matrix(), expected), 1e-12);
}

TEST(NearestPhysical, PrintedQuarterMatrixMovesLittle) {
  // The printed matrix has one eigenvalue near -0.0017 from 3-decimal rounding.
  const ComplexMatrix printed = printed_rho_quarter();
  EXPECT_LT(hermitian_eigen(printed).values.minCoeff(), 0.0);
  const DensityMatrix rho = nearest_physical(printed);
  EXPECT_LE(max_abs_diff(rho.matrix(), printed), 0.01);
  EXPECT_GE(hermitian_eigen(rho.matrix()).values.minCoeff(), -1e-15);
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
}

TEST(NearestPhysical, ZeroTrace) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = -0.5;
  try {
    nearest_physical(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroTrace);
  }
}

TEST(NearestPhysical, IdempotentOnRandomHermitian) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    ComplexMatrix h = testing::random_hermitian(rng, 4) + 3.0 * ComplexMatrix::Identity(4, 4);
    const DensityMatrix once = nearest_physical(h);
    const DensityMatrix twice = nearest_physical(once.matrix());
    ASSERT_LE(max_abs_diff(once.matrix(), twice.matrix()), 1e-12);
  }
}

TEST(DensityMatrix, FromMatrixValidates) {
  ComplexMatrix m = ComplexMatrix::Identity(4, 4) * 0.5;
  EXPECT_THROW(DensityMatrix::from_matrix(m), Error);  // trace 2
  ComplexMatrix neg = ComplexMatrix::Zero(4, 4);
  neg(0, 0) = 1.1;
  neg(1, 1) = -0.1;
  EXPECT_THROW(DensityMatrix::from_matrix(neg), Error);
  ComplexMatrix small = ComplexMatrix::Zero(4, 4);
  small(0, 0) = 1.0 + 1e-11;
  small(1, 1) = -1e-11;
  const DensityMatrix ok = DensityMatrix::from_matrix(small);
  EXPECT_GE(hermitian_eigen(ok.matrix()).values.minCoeff(), 0.0);
}

TEST(DensityMatrix, StoredInvariants) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const DensityMatrix rho = testing::random_state(rng, 1 + trial % 4);
    ASSERT_LE(hermiticity_defect(rho.matrix()), 1e-12);
    ASSERT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
    ASSERT_GE(hermitian_eigen(rho.matrix()).values.minCoeff(), -1e-10);
  }
}

TEST(PureState, RejectsUnnormalized) {
  Vector4c a = Vector4c::Zero();
  a(0) = 1.0;
  a(1) = 1e-5;
  try {
    PureState::from_amplitudes(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotNormalized);
  }
}

TEST(MatrixJson, RoundTripsRandomMatrices) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix m = testing::ginibre(rng, trial % 2 ? 4 : 2, trial % 2 ? 4 : 2);
    const auto text = matrix_to_json(m).dump();
    EXPECT_EQ(matrix_from_json(nlohmann::json::parse(text)), m);
  }
}

TEST(MatrixJson, Schema) {
  const auto j = matrix_to_json(ComplexMatrix::Identity(2, 2));
  EXPECT_EQ(j.at("dim"), 2);
  EXPECT_EQ(j.at("re")[0][0], 1.0);
  EXPECT_EQ(j.at("im")[1][0], 0.0);
  EXPECT_THROW(matrix_from_json(nlohmann::json::parse(R"({"dim":3,"re":[],"im":[]})")), Error);
  EXPECT_THROW(matrix_from_json(nlohmann::json::parse(R"({"dim":2,"re":[[1,0]],"im":[[0,0],[0,0]]})")), Error);
}

}  // namespace
}  // namespace bellmix

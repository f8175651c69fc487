#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cwm/core/basis.hpp"
#include "cwm/core/density.hpp"
#include "cwm/harness/config.hpp"
#include "oracles.hpp"

namespace cwm {
namespace {

ComplexMatrix diag(std::initializer_list<double> values) {
  RealVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double x : values) v(i++) = x;
  return v.cast<Complex>().asDiagonal();
}

ComplexMatrix random_hermitian(std::mt19937_64& gen, Eigen::Index d, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  ComplexMatrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(n(gen), n(gen));
  return hermitize(m);
}

DensityMatrix random_state(std::mt19937_64& gen, Eigen::Index d, Eigen::Index rank) {
  std::normal_distribution<double> n;
  ComplexMatrix g(d, rank);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < rank; ++j) g(i, j) = Complex(n(gen), n(gen));
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(hermitize(rho));
}

TEST(Vectorize, StacksColumns) {
  ComplexMatrix m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;  // [[a,b],[c,d]] with a=1 b=2 c=3 d=4
  const ComplexVector v = vectorize(m);
  EXPECT_EQ(v(0), Complex(1.0));
  EXPECT_EQ(v(1), Complex(3.0));
  EXPECT_EQ(v(2), Complex(2.0));
  EXPECT_EQ(v(3), Complex(4.0));

  const ComplexVector id = vectorize(identity(2));
  EXPECT_EQ(id(0), Complex(1.0));
  EXPECT_EQ(id(1), Complex(0.0));
  EXPECT_EQ(id(2), Complex(0.0));
  EXPECT_EQ(id(3), Complex(1.0));
}

TEST(Vectorize, InitialStateColumns) {
  const ComplexVector v = vectorize(default_initial_state().matrix());
  const double s = std::sqrt(3.0) / 4.0;
  EXPECT_NEAR(v(0).real(), 0.75, 1e-15);
  EXPECT_NEAR(v(1).real(), -s, 1e-15);
  EXPECT_NEAR(v(2).real(), -s, 1e-15);
  EXPECT_NEAR(v(3).real(), 0.25, 1e-15);
}

TEST(Vectorize, DevectorizeIsInverse) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> n;
  for (const Eigen::Index d : {2, 3, 4}) {
    ComplexVector v(d * d);
    for (auto& x : v) x = Complex(n(gen), n(gen));
    EXPECT_EQ((vectorize(devectorize(v)) - v).norm(), 0.0);
  }
  EXPECT_THROW(devectorize(ComplexVector::Zero(5)), ConfigError);
}

TEST(Expectation, Examples) {
  EXPECT_NEAR(expectation(pauli_z(), default_initial_state()), 0.5, 1e-15);
  EXPECT_NEAR(expectation(identity(2), default_initial_state()), 1.0, 1e-15);
  EXPECT_NEAR(expectation(pauli_x(), DensityMatrix::maximally_mixed(2)), 0.0, 1e-15);
  EXPECT_THROW(expectation(identity(3), default_initial_state()), ConfigError);
}

TEST(Expectation, MatchesUnconjugatedInnerProductWithTranspose) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const ComplexMatrix m = random_hermitian(gen, d);
    const DensityMatrix rho = random_state(gen, d, 1 + trial % d);
    const Complex inner = vectorize(m.transpose()).transpose() * vectorize(rho.matrix());
    EXPECT_NEAR(expectation(m, rho), inner.real(), 1e-12);
  }
}

TEST(Fidelity, Examples) {
  const DensityMatrix zero(diag({1.0, 0.0}));
  const DensityMatrix one(diag({0.0, 1.0}));
  EXPECT_NEAR(fidelity(zero, zero), 1.0, 1e-12);
  EXPECT_NEAR(fidelity(zero, one), 0.0, 1e-12);
  // commuting diagonal states: sum_i sqrt(p_i q_i) = sqrt(1 * 1/2)
  EXPECT_NEAR(fidelity(zero, DensityMatrix::maximally_mixed(2)), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Fidelity, SymmetricBoundedAndSelfOne) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const auto a = random_state(gen, d, 1 + trial % d);
    const auto b = random_state(gen, d, 1 + (trial / 3) % d);
    const double fab = fidelity(a, b);
    EXPECT_GE(fab, 0.0);
    EXPECT_LE(fab, 1.0);
    EXPECT_NEAR(fab, fidelity(b, a), 1e-9);
    EXPECT_NEAR(fidelity(a, a), 1.0, 1e-9);
  }
}

TEST(DensityMatrixInvariants, RejectsInvalidInput) {
  EXPECT_THROW(DensityMatrix(diag({1.2, -0.2})), NumericalError);
  EXPECT_THROW(DensityMatrix(diag({0.6, 0.6})), NumericalError);
  ComplexMatrix skew = diag({0.5, 0.5});
  skew(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix{skew}, NumericalError);
  EXPECT_THROW(DensityMatrix(ComplexMatrix::Identity(1, 1)), ConfigError);
}

TEST(Bloch, Examples) {
  // The initial matrix [[3/4, -sqrt(3)/4], [-sqrt(3)/4, 1/4]] is the pure
  // state with |x| = sqrt(3)/2; with rho = (I + r.sigma)/2 its sign is negative.
  const BlochVector r = bloch_from_density(default_initial_state());
  EXPECT_NEAR(r.x, -std::sqrt(3.0) / 2.0, 1e-15);
  EXPECT_NEAR(r.norm(), 1.0, 1e-15);
  EXPECT_NEAR(r.y, 0.0, 1e-15);
  EXPECT_NEAR(r.z, 0.5, 1e-15);

  const BlochVector mixed = bloch_from_density(DensityMatrix::maximally_mixed(2));
  EXPECT_DOUBLE_EQ(mixed.norm(), 0.0);

  const BlochVector up = bloch_from_density(DensityMatrix(diag({1.0, 0.0})));
  EXPECT_DOUBLE_EQ(up.z, 1.0);

  EXPECT_THROW(bloch_from_density(DensityMatrix::maximally_mixed(4)), ConfigError);
}

TEST(Bloch, RoundTripAndPauliTraces) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto rho = random_state(gen, 2, 1 + trial % 2);
    const BlochVector r = bloch_from_density(rho);
    EXPECT_LE(r.norm(), 1.0 + 1e-9);
    EXPECT_NEAR(r.x, expectation(pauli_x(), rho), 1e-12);
    EXPECT_NEAR(r.y, expectation(pauli_y(), rho), 1e-12);
    EXPECT_NEAR(r.z, expectation(pauli_z(), rho), 1e-12);
    EXPECT_LE((density_from_bloch(r).matrix() - rho.matrix()).norm(), 1e-10);
  }
}

TEST(ProjectToDensity, DiagonalExamplesMatchSimplexOracle) {
  const auto expected = oracle::simplex_projection({1.2, -0.2});
  const DensityMatrix p = project_to_density(diag({1.2, -0.2}));
  EXPECT_NEAR(expected[0], 1.0, 1e-12);
  EXPECT_NEAR(expected[1], 0.0, 1e-12);
  EXPECT_LE((p.matrix() - diag({expected[0], expected[1]})).norm(), 1e-12);

  const auto uniform = oracle::simplex_projection({0.5, 0.5, 0.5, 0.5});
  for (const double v : uniform) EXPECT_NEAR(v, 0.25, 1e-12);
  const DensityMatrix q = project_to_density(diag({0.5, 0.5, 0.5, 0.5}));
  EXPECT_LE((q.matrix() - 0.25 * identity(4)).norm(), 1e-12);
}

TEST(ProjectToDensity, ValidStateIsFixedPoint) {
  const auto rho = default_initial_state();
  EXPECT_LE((project_to_density(rho.matrix()).matrix() - rho.matrix()).norm(), 1e-12);
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_state(gen, 3, 2);
    EXPECT_LE((project_to_density(s.matrix()).matrix() - s.matrix()).norm(), 1e-12);
  }
}

TEST(ProjectToDensity, SimplexMatchesOracleOnRandomVectors) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n(0.2, 0.7);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 6;
    std::vector<double> v(static_cast<std::size_t>(d));
    for (auto& x : v) x = n(gen);
    const auto expected = oracle::simplex_projection(v);
    const RealVector got = project_to_simplex(Eigen::Map<const RealVector>(v.data(), d));
    for (int i = 0; i < d; ++i) EXPECT_NEAR(got(i), expected[static_cast<std::size_t>(i)], 1e-12);
  }
}

TEST(ProjectToDensity, IdempotentAndPhysical) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = 2 + trial % 4;
    ComplexMatrix x = random_hermitian(gen, d);
    x(0, 1) += Complex(0.3, -0.1);  // non-Hermitian input is Hermitized first
    const DensityMatrix p = project_to_density(x);
    EXPECT_LE(hermiticity_defect(p.matrix()), 1e-10);
    EXPECT_NEAR(p.matrix().trace().real(), 1.0, 1e-12);
    EXPECT_GE(eigh(p.matrix()).values.minCoeff(), -1e-9);
    EXPECT_LE((project_to_density(p.matrix()).matrix() - p.matrix()).norm(), 1e-10);
  }
}

TEST(ProjectToDensity, EigenDecompositionResidual) {
  std::mt19937_64 gen(13);
  for (const Eigen::Index d : {2, 4, 8, 16}) {
    const ComplexMatrix m = random_hermitian(gen, d);
    const auto e = eigh(m);
    const ComplexMatrix lhs = m * e.vectors;
    const ComplexMatrix rhs = e.vectors * e.values.cast<Complex>().asDiagonal();
    EXPECT_LE((lhs - rhs).norm(), 1e-10) << "d = " << d;
  }
}

TEST(PsdSqrt, Examples) {
  EXPECT_LE((psd_sqrt(identity(2)) - identity(2)).norm(), 1e-14);
  EXPECT_LE((psd_sqrt(diag({4.0, 9.0})) - diag({2.0, 3.0})).norm(), 1e-13);
  const ComplexMatrix rho0 = default_initial_state().matrix();
  const ComplexMatrix root = psd_sqrt(rho0);
  EXPECT_LE((root * root - rho0).norm(), 1e-10);
  EXPECT_GE(eigh(root).values.minCoeff(), -1e-12);
}

TEST(PsdSqrt, ClipsTinyNegativesAndRejectsLargeOnes) {
  EXPECT_NO_THROW(psd_sqrt(diag({1.0, -5e-10})));
  EXPECT_THROW(psd_sqrt(diag({1.0, -1e-6})), NumericalError);
}

TEST(HermitianBasis, Orthonormal) {
  for (const Eigen::Index d : {2, 3, 4}) {
    const auto basis = hermitian_basis(d);
    ASSERT_EQ(basis.size(), static_cast<std::size_t>(d * d));
    for (std::size_t i = 0; i < basis.size(); ++i) {
      EXPECT_TRUE(is_hermitian(basis[i], 1e-15));
      if (i > 0) {
        EXPECT_NEAR(std::abs(basis[i].trace()), 0.0, 1e-15);
      }
      for (std::size_t j = 0; j < basis.size(); ++j)
        EXPECT_NEAR(std::abs((basis[i] * basis[j]).trace() - (i == j ? 1.0 : 0.0)), 0.0, 1e-14);
    }
  }
}

TEST(PauliProduct, TwoQubitKronecker) {
  const ComplexMatrix xz = pauli_product(2, 1 * 4 + 3);
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected.block(0, 2, 2, 2) = pauli_z();
  expected.block(2, 0, 2, 2) = pauli_z();
  EXPECT_EQ((xz - expected).norm(), 0.0);
  EXPECT_EQ((pauli_product(1, 2) - pauli_y()).norm(), 0.0);
}

}  // namespace
}  // namespace cwm

#include <gtest/gtest.h>

#include <cmath>

#include "npdt/npdt.hpp"
#include "support/oracles.hpp"
#include "support/random_models.hpp"

using namespace npdt;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Matrix circulant3() {
  Matrix m(3, 3);
  m << -1, 1, 0, 0, -1, 1, 1, 0, -1;
  return m;
}

}  // namespace

// ---- Measure / inner product ----------------------------------------------------

TEST(Measure, RejectsNonPositiveWeights) {
  EXPECT_THROW(Measure(vec({1.0, 0.0})), Error);
  EXPECT_THROW(Measure(vec({1.0, -2.0})), Error);
  EXPECT_THROW(Measure{Vector()}, Error);
}

TEST(Measure, TotalIsSumOfWeights) {
  const Measure m(vec({0.5, 0.25, 2.0}));
  EXPECT_NEAR(m.total(), 2.75, 1e-15);
}

TEST(InnerProduct, ConstantCase) { EXPECT_DOUBLE_EQ(inner_product(vec({1, 1}), vec({1, 1}), Measure::unit(2)), 2.0); }

TEST(InnerProduct, Orthogonality) { EXPECT_DOUBLE_EQ(inner_product(vec({1, -1}), vec({1, 1}), Measure::unit(2)), 0.0); }

TEST(InnerProduct, WeightedSum) {
  EXPECT_DOUBLE_EQ(inner_product(vec({2, 3}), vec({1, 4}), Measure(vec({0.5, 0.25}))), 4.0);
}

TEST(InnerProduct, LengthMismatchIsDimensionError) {
  try {
    inner_product(vec({1, 2}), vec({1, 2, 3}), Measure::unit(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dimension);
  }
}

TEST(InnerProduct, SymmetricAndBilinear) {
  gen::Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = rng.integer(1, 8);
    const Measure m(rng.positive(n));
    const Vector u = Vector::Random(n), v = Vector::Random(n), z = Vector::Random(n);
    const double a = rng.uniform(-2, 2);
    EXPECT_NEAR(inner_product(u, v, m), inner_product(v, u, m), 1e-14);
    EXPECT_NEAR(inner_product(a * u + z, v, m), a * inner_product(u, v, m) + inner_product(z, v, m), 1e-13);
  }
}

TEST(Norms, InducedByInnerProduct) {
  const Measure m(vec({0.5, 2.0}));
  const Vector u = vec({-2.0, 3.0});
  EXPECT_DOUBLE_EQ(norm1(u, m), 0.5 * 2 + 2.0 * 3);
  EXPECT_DOUBLE_EQ(norm2(u, m), std::sqrt(0.5 * 4 + 2.0 * 9));
}

TEST(Power, IntegerAndRealExponents) {
  EXPECT_DOUBLE_EQ(signed_power(3.0, 2.0), 9.0);
  EXPECT_NEAR(signed_power(2.0, 1.5), std::pow(2.0, 1.5), 1e-15);
  EXPECT_NEAR(signed_power(-1e-20, 1.5), -std::pow(1e-20, 1.5), 1e-40);
}

// ---- Structure checks -------------------------------------------------------------

TEST(Structure, StrongConnectivity) {
  EXPECT_TRUE(is_strongly_connected(circulant3()));
  Matrix r(2, 2);
  r << -1, 1, 0, 0;
  EXPECT_FALSE(is_strongly_connected(r));
  EXPECT_TRUE(is_strongly_connected(Matrix::Zero(1, 1)));
}

// ---- Adjoint ------------------------------------------------------------------------

TEST(Adjoint, SymmetricUnitWeightsIsIdentityMap) {
  Matrix a(2, 2);
  a << 1, 2, 2, 3;
  EXPECT_TRUE(adjoint(a, Measure::unit(2)).isApprox(a));
}

TEST(Adjoint, TransposeForUnitWeights) {
  Matrix a(2, 2);
  a << 0, 1, 0, 0;
  Matrix expected(2, 2);
  expected << 0, 0, 1, 0;
  EXPECT_EQ(adjoint(a, Measure::unit(2)), expected);
}

TEST(Adjoint, DefiningIdentityOnRandomPairs) {
  gen::Rng rng(3);
  const Eigen::Index n = 5;
  const Matrix a = Matrix::Random(n, n);
  const Measure m(rng.positive(n));
  const Matrix as = adjoint(a, m);
  for (int k = 0; k < 100; ++k) {
    const Vector u = Vector::Random(n), v = Vector::Random(n);
    EXPECT_NEAR(inner_product(a * u, v, m), inner_product(u, as * v, m), 1e-12);
  }
}

TEST(Adjoint, Involution) {
  gen::Rng rng(4);
  const Matrix a = Matrix::Random(6, 6);
  const Measure m(rng.positive(6));
  EXPECT_LE((adjoint(adjoint(a, m), m) - a).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Adjoint, DimensionMismatch) { EXPECT_THROW(adjoint(Matrix::Zero(2, 2), Measure::unit(3)), Error); }

// ---- Spectrum ------------------------------------------------------------------------

TEST(Spectrum, CirculantPublishedValues) {
  const auto s = spectrum(-circulant3());
  ASSERT_EQ(s.eigenvalues.size(), 3u);
  std::vector<Complex> expected{{0, 0}, {1.5, std::sqrt(3.0) / 2}, {1.5, -std::sqrt(3.0) / 2}};
  EXPECT_LE(oracle::multiset_distance(s.eigenvalues, expected), 1e-12);
}

TEST(Spectrum, ZeroMatrix) {
  const auto s = spectrum(Matrix::Zero(4, 4));
  ASSERT_EQ(s.eigenvalues.size(), 4u);
  for (const auto& z : s.eigenvalues) EXPECT_EQ(std::abs(z), 0.0);
}

TEST(Spectrum, MatchesCharacteristicPolynomialOracle) {
  gen::Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    Matrix a(5, 5);
    for (Eigen::Index i = 0; i < 5; ++i)
      for (Eigen::Index j = 0; j < 5; ++j) a(i, j) = rng.uniform(-1, 1);
    const auto s = spectrum(a);
    EXPECT_LE(oracle::multiset_distance(s.eigenvalues, oracle::eigenvalues_via_polynomial(a)), 1e-7);
  }
}

TEST(Spectrum, ResidualContractAndConjugateSymmetry) {
  gen::Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = rng.integer(2, 12);
    const Matrix a = Matrix::Random(n, n);
    const auto s = spectrum(a);
    EXPECT_EQ(static_cast<Eigen::Index>(s.eigenvalues.size()), n);
    EXPECT_LE(s.max_residual, 1e-8 * s.matrix_norm);
    std::vector<Complex> conj;
    for (const auto& z : s.eigenvalues) conj.push_back(std::conj(z));
    EXPECT_LE(oracle::multiset_distance(s.eigenvalues, conj), 1e-12);
  }
}

TEST(Spectrum, FellerContainsZeroAndOthersInRightHalfPlane) {
  gen::Rng rng(7);
  for (int t = 0; t < 30; ++t) {
    const auto s = spectrum(-gen::feller(rng, rng.integer(2, 8)));
    double closest = INFINITY;
    int near_zero = 0;
    for (const auto& z : s.eigenvalues) {
      closest = std::min(closest, std::abs(z));
      if (std::abs(z) <= 1e-9) ++near_zero;
      else EXPECT_GT(z.real(), 0.0);
    }
    EXPECT_LE(closest, 1e-9);
    EXPECT_EQ(near_zero, 1);
  }
}

TEST(Spectrum, SelfAdjointHasRealSpectrum) {
  gen::Rng rng(8);
  const auto s = spectrum(gen::symmetric_feller(rng, 7));
  for (const auto& z : s.eigenvalues) EXPECT_LE(std::abs(z.imag()), 1e-9);
}

// ---- Principal eigenpair ----------------------------------------------------------------

TEST(PrincipalEigenpair, Scalar) {
  const auto p = principal_eigenpair(Matrix::Constant(1, 1, -2.0), Measure::unit(1));
  EXPECT_DOUBLE_EQ(p.lambda1, -2.0);
  EXPECT_DOUBLE_EQ(p.eigvec[0], 1.0);
}

TEST(PrincipalEigenpair, TwoByTwo) {
  Matrix m(2, 2);
  m << -1, 1, 1, -1;
  const Matrix a = -m - Matrix::Identity(2, 2);
  const auto p = principal_eigenpair(a, Measure::unit(2));
  EXPECT_NEAR(p.lambda1, -1.0, 1e-12);
  EXPECT_NEAR(p.eigvec[0], 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(p.eigvec[1], 1 / std::sqrt(2.0), 1e-12);
}

TEST(PrincipalEigenpair, InstabilityTwoEquilibriumDirection) {
  const ModelSpec spec = instability_two();
  const auto p = principal_eigenpair(stationary_operator(spec), spec.measure());
  EXPECT_NEAR(p.lambda1, -1000.2, 1e-9 * 1000.2);
  const Vector u = instability_two_equilibrium();
  EXPECT_LE((p.eigvec - u / u.norm()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PrincipalEigenpair, MatchesMinimalRealPartOfSpectrum) {
  gen::Rng rng(9);
  for (int t = 0; t < 40; ++t) {
    const Eigen::Index n = rng.integer(2, 9);
    const Measure mu(rng.positive(n));
    Matrix a = -gen::feller(rng, n);
    a.diagonal() -= rng.positive(n);
    const auto p = principal_eigenpair(a, mu);
    EXPECT_NEAR(p.lambda1, spectrum(a, false).min_real_part, 1e-8 * std::max(1.0, std::abs(p.lambda1)));
    EXPECT_GT(p.eigvec.minCoeff(), 0.0);
    EXPECT_NEAR(norm2(p.eigvec, mu), 1.0, 1e-12);
  }
}

TEST(PrincipalEigenpair, ReducibleGivesStructuralError) {
  // Two decoupled blocks with different rates: the principal vector vanishes on one.
  Matrix a(2, 2);
  a << -1, 0, 0, -3;
  try {
    principal_eigenpair(a, Measure::unit(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::structural);
  }
}

TEST(PrincipalEigenpair, PositiveOffDiagonalRejected) {
  Matrix a(2, 2);
  a << -1, 1, 1, -1;
  EXPECT_THROW(principal_eigenpair(a, Measure::unit(2)), Error);
}

// ---- Normality ---------------------------------------------------------------------------

TEST(Normality, SymmetricIsNormal) {
  gen::Rng rng(10);
  EXPECT_LE(normality_defect(gen::symmetric_feller(rng, 6), Measure::unit(6)), 1e-14);
}

TEST(Normality, CirculantIsNormal) { EXPECT_LE(normality_defect(circulant3(), Measure::unit(3)), 1e-12); }

TEST(Normality, WeightedSelfAdjointIsNormal) {
  gen::Rng rng(12);
  const auto g = gen::grid_symmetric(rng, 30);
  EXPECT_LE(normality_defect(g.entries(), g.measure()), 1e-13);
  EXPECT_LE(self_adjointness_defect(g.entries(), g.measure()), 1e-13);
}

// ---- Resolvent -------------------------------------------------------------------------------

TEST(Resolvent, FellerAtUnitShift) {
  gen::Rng rng(13);
  const Matrix m = gen::feller(rng, 5);
  // (-M + 1) v = 1 has v = 1; in the (A - shift) convention the shift is -1.
  const Vector v = resolvent_solve(-m, -1.0, Vector::Ones(5));
  EXPECT_LE((v - Vector::Ones(5)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Resolvent, Scalar) {
  const Vector v = resolvent_solve(Matrix::Zero(1, 1), 2.0, Vector::Constant(1, 3.0));
  EXPECT_DOUBLE_EQ(v[0], -1.5);
}

TEST(Resolvent, StrongPositivity) {
  gen::Rng rng(14);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index n = rng.integer(2, 8);
    const Matrix m = gen::feller(rng, n);
    Vector f = Vector::Zero(n);
    f[rng.integer(0, static_cast<int>(n) - 1)] = rng.uniform(0.1, 1.0);
    if (rng.uniform() < 0.5) f += rng.positive(n, 0.0, 1.0);
    const Vector v = resolvent_solve(-m, -rng.uniform(0.1, 3.0), f);
    EXPECT_GT(v.minCoeff(), 0.0);
  }
}

TEST(Resolvent, ResidualContract) {
  gen::Rng rng(15);
  const Matrix a = Matrix::Random(6, 6);
  const CVector f = CVector::Random(6);
  const Complex shift(0.3, -0.7);
  const CVector v = resolvent_solve(a, shift, f);
  CMatrix s = a.cast<Complex>();
  s.diagonal().array() -= shift;
  EXPECT_LE((s * v - f).norm(), 1e-10 * f.norm());
}

TEST(Resolvent, SingularShift) {
  try {
    resolvent_solve(-circulant3(), Complex(0.0, 0.0), CVector::Ones(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::singularity);
  }
}

TEST(Resolvent, HessenbergFrameAgreesWithDenseSolve) {
  gen::Rng rng(16);
  const Matrix a = -gen::feller(rng, 9);
  const CVector f = CVector::Random(9);
  const HessenbergResolvent h(a);
  for (const Complex z : {Complex(0.4, 1.0), Complex(-2.0, 0.1), Complex(5.0, -3.0)}) {
    const auto fac = h.factor(z);
    ASSERT_TRUE(fac.ok);
    const CVector y = h.from_frame(fac.solve(h.to_frame(f)));
    EXPECT_LE((y - resolvent_solve(a, z, f)).norm(), 1e-10 * y.norm());
  }
}

#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "cstate/hilbert.hpp"
#include "cstate/quadrature.hpp"

using namespace cstate;

namespace {

cplx ip_raw(const QuantModel& m, Eigen::Index a, Eigen::Index b) { return gram_matrix(m)(a, b); }

}  // namespace

TEST(CircleRule, ConstantIntegratesToOne) {
  const auto r = circle_rule(8);
  EXPECT_NEAR(std::abs(integrate(r, [](const ChartPoint&) { return 1.0; }) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(integrate(circle_rule(4), [](const ChartPoint&) { return 1.0; }) - 1.0), 0.0, 1e-15);
}

TEST(CircleRule, CharactersAreOrthogonal) {
  const auto r = circle_rule(8);
  EXPECT_LT(std::abs(integrate(r, [](const ChartPoint& z) { return z(0); })), 1e-14);
  const cplx unit = integrate(r, [](const ChartPoint& z) { return std::pow(z(0), 3) * std::pow(std::conj(z(0)), 3); });
  EXPECT_NEAR(std::abs(unit - 1.0), 0.0, 1e-14);
}

TEST(CircleRule, ParamsMatchNodes) {
  const auto r = circle_rule(6);
  const cplx v = integrate_params(r, [](std::span<const double> t) { return std::cos(t[0]) * std::cos(t[0]); });
  EXPECT_NEAR(v.real(), 0.5, 1e-15);
}

TEST(ChartRule, UnitMassOnCp1AndCp2) {
  EXPECT_NEAR(cpn_chart_rule(1, 64, 16).total_mass(), 1.0, 1e-12);
  EXPECT_NEAR(cpn_chart_rule(2, 32, 8).total_mass(), 1.0, 1e-12);
}

TEST(ChartRule, ZeroIntegrandGivesZero) {
  EXPECT_EQ(integrate(cpn_chart_rule(1, 8, 4), [](const ChartPoint&) { return 0.0; }), cplx(0.0));
}

TEST(ChartRule, RejectsUnsupportedDimension) {
  try {
    cpn_chart_rule(3, 8, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unsupported_dimension);
  }
}

TEST(ChartRule, BetaIntegralOracle) {
  // <z, z> at k = 2 is B(2,2) = 1/6; <1, z> vanishes for every k
  const auto m = cpn_model(1, 2);
  EXPECT_NEAR(std::abs(ip_raw(m, 1, 1) - 1.0 / 6.0), 0.0, 1e-12);
  for (int k = 1; k <= 5; ++k) EXPECT_LT(std::abs(ip_raw(cpn_model(1, k), 0, 1)), 1e-14);
}

TEST(DiskRule, BetaIntegralOracle) {
  const auto r = disk_rule(8, 8, 0.5);
  EXPECT_NEAR(r.total_mass(), 1.0, 1e-10);
  const cplx zz = integrate(r, [](const ChartPoint& z) { return std::norm(z(0)); });
  EXPECT_NEAR(zz.real(), 0.5, 1e-10);
  EXPECT_LT(std::abs(integrate(r, [](const ChartPoint& z) { return z(0); })), 1e-14);
}

TEST(GaussJacobi, ExactForPolynomialsUpToDegree2nMinus1) {
  // int_0^1 (1-t)^a t^j dt = B(j+1, a+1)
  for (double a : {0.0, 1.0, 2.5}) {
    const auto g = gauss_jacobi_unit(6, a);
    for (int j = 0; j <= 11; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], j);
      const double exact = std::exp(std::lgamma(j + 1.0) + std::lgamma(a + 1.0) - std::lgamma(j + a + 2.0));
      EXPECT_NEAR(s, exact, 1e-14 * (1.0 + exact)) << "a=" << a << " j=" << j;
    }
  }
}

TEST(GaussJacobi, RejectsBadArguments) {
  EXPECT_THROW(gauss_jacobi_unit(0, 0.0), Error);
  EXPECT_THROW(gauss_jacobi_unit(4, -1.0), Error);
}

TEST(MonomialBasis, CountsAndOrder) {
  const auto b1 = monomial_basis(1, 2);
  ASSERT_EQ(b1.size(), 3u);
  EXPECT_EQ(b1[0].exponents, std::vector<int>{0});
  EXPECT_EQ(b1[2].exponents, std::vector<int>{2});
  const auto b2 = monomial_basis(2, 1);
  ASSERT_EQ(b2.size(), 3u);
  EXPECT_EQ(b2[0].exponents, (std::vector<int>{0, 0}));
  EXPECT_EQ(b2[1].exponents, (std::vector<int>{0, 1}));
  EXPECT_EQ(b2[2].exponents, (std::vector<int>{1, 0}));
  EXPECT_EQ(monomial_basis(2, 2).size(), 6u);
}

TEST(Gram, Cp1ClosedForm) {
  const CMatrix G = gram_matrix(cpn_model(1, 2));
  const double expect[3] = {1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(std::abs(G(a, b) - (a == b ? expect[a] : 0.0)), 0.0, 1e-12);
  const CMatrix G0 = gram_matrix(cpn_model(1, 0));
  ASSERT_EQ(G0.rows(), 1);
  EXPECT_NEAR(std::abs(G0(0, 0) - 1.0), 0.0, 1e-14);
}

TEST(Orthonormalize, IdentityAndDiagonalOracles) {
  EXPECT_LT((orthonormalize(CMatrix::Identity(4, 4)) - CMatrix::Identity(4, 4)).norm(), 1e-15);
  const CMatrix T = orthonormalize(gram_matrix(cpn_model(1, 2)));
  const double expect[3] = {std::sqrt(3.0), std::sqrt(6.0), std::sqrt(3.0)};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(std::abs(T(a, b) - (a == b ? expect[a] : 0.0)), 0.0, 1e-12);
  EXPECT_LT((orthonormalize(0.25 * CMatrix::Identity(3, 3)) - 2.0 * CMatrix::Identity(3, 3)).norm(), 1e-15);
}

TEST(Orthonormalize, DegenerateGramIsRejected) {
  CMatrix G = CMatrix::Ones(3, 3);
  try {
    orthonormalize(G);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_basis);
  }
  const SubspaceTransform sub = orthonormalize_subspace(G);
  EXPECT_EQ(sub.ortho.cols(), 1);
  EXPECT_EQ(sub.discarded.size(), 2u);
  EXPECT_LT((sub.ortho.adjoint() * G * sub.ortho - CMatrix::Identity(1, 1)).norm(), 1e-14);
}

TEST(Orthonormalize, RandomHermitianPositive) {
  Rng rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix A(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) A(i, j) = {nd(rng), nd(rng)};
    const CMatrix G = A.adjoint() * A + 0.1 * CMatrix::Identity(5, 5);
    const CMatrix T = orthonormalize(G);
    EXPECT_LT((T.adjoint() * G * T - CMatrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Orthonormality, Cp1AndCp2AtRadialOrder64) {
  for (int k = 0; k <= 8; ++k) EXPECT_LT(orthonormality_deviation(cpn_model(1, k)), 1e-8) << "k=" << k;
  for (int k = 1; k <= 2; ++k) EXPECT_LT(orthonormality_deviation(cpn_model(2, k)), 1e-8) << "k=" << k;
}

TEST(Orthonormality, Cp1ConstantsMatchBinomialClosedForm) {
  for (int k = 0; k <= 8; ++k) {
    const auto m = cpn_model(1, k);
    const auto c = cp1_orthonormal_constants(k);
    for (int a = 0; a <= k; ++a) EXPECT_NEAR(std::abs(m.ortho(a, a)), c[a], 1e-10 * c[a]);
  }
}

TEST(EvalBasis, ValuesAtOriginAndWeight) {
  const auto m = cpn_model(1, 2);
  const BasisValues at0 = eval_basis(m, detail::point1(0.0));
  EXPECT_NEAR(std::abs(at0.values(0) - std::sqrt(3.0)), 0.0, 1e-12);
  EXPECT_LT(std::abs(at0.values(1)), 1e-15);
  EXPECT_LT(std::abs(at0.values(2)), 1e-15);
  EXPECT_DOUBLE_EQ(at0.weight, 1.0);
  EXPECT_DOUBLE_EQ(eval_basis(m, detail::point1(1.0)).weight, 0.25);
}

TEST(EvalBasis, RejectsNonFiniteAndWrongDimension) {
  const auto m = cpn_model(1, 2);
  EXPECT_THROW(eval_basis(m, detail::point1({std::nan(""), 0.0})), Error);
  try {
    eval_basis(m, ChartPoint::Zero(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
}

TEST(InnerProduct, Antilinear) {
  SectionVec e0 = SectionVec::Zero(3), e1 = SectionVec::Zero(3);
  e0(0) = 1.0;
  e1(1) = 1.0;
  EXPECT_EQ(inner_product(e0, e0), cplx(1.0));
  EXPECT_EQ(inner_product(e0, e1), cplx(0.0));
  const cplx a(0.3, 2.0);
  EXPECT_NEAR(std::abs(inner_product(a * e0, e0) - std::conj(a)), 0.0, 1e-15);
}

TEST(InnerProduct, QuadratureAgreesWithCoefficients) {
  const auto m = cpn_model(2, 2);
  Rng rng(3);
  for (int t = 0; t < 5; ++t) {
    const SectionVec a = random_unit_section(m.dim(), rng), b = random_unit_section(m.dim(), rng);
    EXPECT_LT(std::abs(quadrature_inner_product(m, a, b) - inner_product(a, b)), 1e-12);
  }
}

TEST(RandomSection, UnitNormAndSeeded) {
  Rng a(11), b(11);
  const SectionVec s = random_unit_section(6, a);
  EXPECT_NEAR(s.norm(), 1.0, 1e-15);
  EXPECT_EQ(s, random_unit_section(6, b));
}

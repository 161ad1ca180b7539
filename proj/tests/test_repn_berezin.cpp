#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "cstate/berezin.hpp"
#include "cstate/repn.hpp"

using namespace cstate;

namespace {

ChartPoint pt(cplx z) { return detail::point1(z); }

double max_abs(const CMatrix& A) { return A.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Generators, ValidationRejectsCenterAndNonSkew) {
  const CMatrix center = cplx(0.0, 1.0) * CMatrix::Identity(2, 2);
  try {
    validate_generator(center, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_generator);
  }
  CMatrix herm(2, 2);
  herm << 1, 0, 0, -1;
  EXPECT_THROW(validate_generator(herm, 1), Error);
  EXPECT_THROW(validate_generator(CMatrix::Zero(3, 3), 1), Error);
}

TEST(Generators, Su2StructureConstants) {
  const auto b = su2_basis();
  EXPECT_LT(max_abs(b[0].lambda * b[1].lambda - b[1].lambda * b[0].lambda - b[2].lambda), 1e-15);
  const auto a = structure_constants(su3_basis());
  ASSERT_EQ(a.size(), 8u);
}

TEST(Spin, SpectraMatchLadderOracle) {
  // tau-hat_z at k = 1 has {-1/2, 1/2}, at k = 2 {-1, 0, 1}
  const auto b = su2_basis();
  const Eigen::VectorXd s1 = sorted_hermitian_spectrum(prequantum_op(b[2].lambda, 1, 1));
  EXPECT_NEAR(s1(0), -0.5, 1e-12);
  EXPECT_NEAR(s1(1), 0.5, 1e-12);
  const Eigen::VectorXd s2 = sorted_hermitian_spectrum(prequantum_op(b[2].lambda, 1, 2));
  EXPECT_NEAR(s2(0), -1.0, 1e-12);
  EXPECT_NEAR(s2(1), 0.0, 1e-12);
  EXPECT_NEAR(s2(2), 1.0, 1e-12);
  for (int k = 1; k <= 8; ++k) EXPECT_LT(spin_spectrum_deviation(cpn_model(1, k)), 1e-8) << "k=" << k;
}

TEST(Spin, OperatorsAreHermitian) {
  for (const auto& g : su3_basis()) {
    const CMatrix T = prequantum_op(g.lambda, 2, 2);
    EXPECT_LT(max_abs(T - T.adjoint()), 1e-12) << g.name;
  }
}

TEST(Commutation, Su2AndSu3) {
  for (int k = 1; k <= 8; ++k) EXPECT_LT(commutation_report(1, k), 1e-10) << "k=" << k;
  EXPECT_LT(commutation_report(2, 1), 1e-10);
  EXPECT_LT(commutation_report(2, 2), 1e-10);
  const auto m = cpn_model(1, 3);
  const CMatrix X = represented_generator(m, su2_basis()[0].lambda);
  EXPECT_EQ(max_abs(X * X - X * X), 0.0);
}

TEST(Kostant, PointwiseMatchesOperator) {
  const SuiteResult r = verify_repn(cpn_model(1, 3));
  for (const char* name : {"kostant-pointwise", "theta-unitarity", "equivariance"}) {
    const Check* c = r.find_check(name);
    ASSERT_NE(c, nullptr) << name;
    EXPECT_TRUE(c->pass) << name << " = " << c->value;
  }
}

TEST(Group, IdentityAndUnitarity) {
  const auto m = cpn_model(1, 2);
  SectionVec e0 = SectionVec::Zero(3);
  e0(0) = 1.0;
  EXPECT_LT((perelomov_state(m, CMatrix::Identity(2, 2)) - e0).norm(), 1e-15);
  EXPECT_NEAR(rawnsley_perelomov_overlap(m, CMatrix::Identity(2, 2)), 1.0, 1e-15);
  Rng rng(12);
  for (int s = 0; s < 50; ++s) {
    const CMatrix g = random_special_unitary(2, rng);
    EXPECT_NEAR(perelomov_state(m, g).norm(), 1.0, 1e-12);
  }
}

TEST(Group, RejectsNonUnitary) {
  CMatrix g = 2.0 * CMatrix::Identity(2, 2);
  try {
    represented_group_element(cpn_model(1, 1), g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_unitary);
  }
}

TEST(Group, ExpPathAgreesWithPolynomialAction) {
  Rng rng(13);
  const auto m = cpn_model(2, 2);
  const CMatrix g = random_special_unitary(3, rng);
  EXPECT_LT(max_abs(represented_group_element_exp(m, g) - represented_group_element(m, g)), 1e-10);
}

TEST(Group, RawnsleyPerelomovEquivalence) {
  Rng rng(14);
  for (int k : {1, 2, 4}) {
    const auto m = cpn_model(1, k);
    for (int s = 0; s < 100; ++s)
      EXPECT_NEAR(rawnsley_perelomov_overlap(m, random_special_unitary(2, rng)), 1.0, 1e-8) << "k=" << k;
  }
  const auto m2 = cpn_model(2, 1);
  for (int s = 0; s < 20; ++s) EXPECT_NEAR(rawnsley_perelomov_overlap(m2, random_special_unitary(3, rng)), 1.0, 1e-7);
}

TEST(Group, ChartExitIsReported) {
  CMatrix g(2, 2);
  g << 0, -1, 1, 0;
  try {
    group_image_of_origin(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::chart_exit);
  }
}

TEST(VerifyRepn, AllChecksPass) {
  for (const QuantModel& m : {cpn_model(1, 4), cpn_model(2, 1)}) {
    const SuiteResult r = verify_repn(m);
    for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << m.name << " " << c.name << " = " << c.value;
  }
}

TEST(Symbol, IdentityAndProjector) {
  const auto m = cpn_model(1, 2);
  const ChartPoint p = pt({0.2, -0.5}), q = pt({-0.7, 0.1});
  EXPECT_NEAR(std::abs(cpn_symbol(m, CMatrix::Identity(3, 3), p, q) - 1.0), 0.0, 1e-14);
  const SectionVec c = coherent_state(m, p).coeffs;
  const CMatrix P = c * c.adjoint();
  EXPECT_NEAR(std::abs(cpn_symbol(m, P, p) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(star_symbol(m, P, P, p) - 1.0), 0.0, 1e-14);
}

TEST(Symbol, DiagonalOperatorMatchesBruteForce) {
  const auto m = cpn_model(1, 2);
  CMatrix A = CMatrix::Zero(3, 3);
  A.diagonal() << 1.0, 2.0, 3.0;
  const ChartPoint p = pt(std::polar(1.0, 0.4)), q = pt(std::polar(1.0, 1.9));
  const SectionVec cp = coherent_state(m, p).coeffs, cq = coherent_state(m, q).coeffs;
  cplx num = 0.0, den = 0.0;
  for (int i = 0; i < 3; ++i) {
    num += std::conj(cp(i)) * A(i, i) * cq(i);
    den += std::conj(cp(i)) * cq(i);
  }
  EXPECT_LT(std::abs(cpn_symbol(m, A, p, q) - num / den), 1e-14);
}

TEST(Symbol, AntipodalPairIsAnError) {
  const auto m = cpn_model(1, 2);
  try {
    cpn_symbol(m, CMatrix::Identity(3, 3), pt(1.0), pt(-1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::antipodal_pair);
  }
}

TEST(Star, UnitAndNonCommutingSpins) {
  const auto m = cpn_model(1, 4);
  const auto b = su2_basis();
  const CMatrix X = prequantum_op(m, b[0].lambda), Y = prequantum_op(m, b[1].lambda);
  const ChartPoint p = pt({0.3, 0.1});
  EXPECT_LT(std::abs(star_symbol(m, X, CMatrix::Identity(5, 5), p) - cpn_symbol(m, X, p)), 1e-14);
  const cplx diff = star_symbol(m, X, Y, p) - cpn_symbol(m, X, p) * cpn_symbol(m, Y, p);
  EXPECT_GT(std::abs(diff), 1e-3);
  const SectionVec c = coherent_state(m, p).coeffs;
  EXPECT_LT(std::abs(star_symbol(m, X, Y, p) - c.dot(X * Y * c)), 1e-13);
}

TEST(Lift, RoundTripOnCircle) {
  const auto m = cpn_model(1, 3);
  Rng rng(15);
  CMatrix A(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) = random_unit_section(2, rng)(0);
  const Restriction r = restriction(circle_sub(4), m);
  const LiftResult lift = lift_recovery(r, sample_action(r, A));
  EXPECT_LT(max_abs(lift.op - A), 1e-8);
  EXPECT_GT(lift.sigma_min, 1e-8);
  EXPECT_NEAR(lift.sigma_max / lift.sigma_min, 1.0, 1e-10);
  const LiftResult zero = lift_recovery(r, sample_action(r, CMatrix::Zero(4, 4)));
  EXPECT_EQ(max_abs(zero.op), 0.0);
}

TEST(Lift, TooFewNodesIsNotDetermining) {
  const auto m = cpn_model(1, 3);
  try {
    restriction(circle_sub(2), m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_determining_set);
  }
}

TEST(Poisson, AntisymmetryAndConstants) {
  const auto b = su2_basis();
  const SymbolFunction F = moment_symbol(b[0].lambda);
  const SymbolFunction one{[](const ChartPoint&) { return cplx(1.0); }, {}, {}};
  const ChartPoint p = pt({0.4, -0.2});
  EXPECT_LT(std::abs(poisson_fs(F, F, p)), 1e-14);
  EXPECT_LT(std::abs(poisson_fs(F, one, p)), 1e-9);
}

TEST(Poisson, MomentMapCalibration) {
  Rng rng(16);
  std::normal_distribution<double> nd;
  const auto b = su2_basis();
  for (int s = 0; s < 20; ++s) {
    const ChartPoint p = pt({nd(rng), nd(rng)});
    const cplx br = poisson_fs(moment_symbol(b[0].lambda), moment_symbol(b[1].lambda), p);
    EXPECT_LT(std::abs(br - moment_symbol(b[2].lambda).f(p)), 1e-12);
    EXPECT_LT(std::abs(fs_poisson_calibration(p) - kPoissonKappa), 1e-10);
  }
}

TEST(Correspondence, CommutingPairHasZeroCommutatorColumn) {
  const Table t = correspondence_table(catalog_pair("xx"), pt({0.3, 0.1}), {8, 16, 32});
  for (const auto& row : t.rows) EXPECT_LT(row[2], 1e-12);
}

TEST(Correspondence, StarColumnHalvesForSpinPair) {
  const Table t = correspondence_table(catalog_pair("xy"), pt({0.3, 0.1}), {8, 16, 32, 64});
  ASSERT_EQ(t.rows.size(), 4u);
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    EXPECT_LT(t.rows[r][1], t.rows[r - 1][1]);
    EXPECT_NEAR(t.rows[r][1] / t.rows[r - 1][1], 0.5, 0.05);
  }
}

TEST(Correspondence, SpinPairCommutatorIsExactAtEveryLevel) {
  // linear moment maps satisfy the Dirac rule with no O(hbar) remainder, so the
  // commutator column sits at rounding level instead of halving
  const Table t = correspondence_table(catalog_pair("xy"), pt({0.3, 0.1}), {8, 16, 32, 64});
  for (const auto& row : t.rows) EXPECT_LT(row[2], 1e-12);
  EXPECT_FALSE(assess_correspondence(t).ratio_in_window);
}

TEST(Correspondence, QuadraticPairShowsFirstOrderDecay) {
  const Table t = correspondence_table(catalog_pair("x2y"), pt({0.3, 0.1}), {8, 16, 32, 64});
  const CorrespondenceVerdict v = assess_correspondence(t);
  EXPECT_TRUE(v.col1_decreasing);
  EXPECT_TRUE(v.col2_decreasing);
  EXPECT_TRUE(v.ratio_in_window) << v.min_ratio << " " << v.max_ratio;
}

TEST(Correspondence, UnknownPairIsConfigError) {
  try {
    catalog_pair("zz");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_config);
  }
}

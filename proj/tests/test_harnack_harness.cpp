#include "pxlap/harnack_harness.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace pxlap;
using pxtest::vec;

namespace {

GridFunction parabola(const Grid& g) {
  return GridFunction::sample(g, [](const Point& x) { return x[0] * (1.0 - x[0]); });
}

}  // namespace

TEST(HarnackMu, Examples) {
  const Grid g = pxtest::line(-1.0, 1.0, 256);
  const GridFunction one = GridFunction::constant(g, 1.0);
  const ExponentField p2 = ExponentField::constant(2.0);
  const Ball ball(vec({0.0}), 0.25);
  EXPECT_EQ(harnack_mu(GridFunction::constant(g, 0.0), ball, 2.0, p2), 0.0);
  // [R^{1 - 1/2} ||1||_{L^2(-1, 1)}]^1 = 0.5 sqrt(2)
  EXPECT_NEAR(harnack_mu(one, ball, 2.0, p2), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(harnack_mu(one, ball, INFINITY, p2), 0.25, 1e-14);
  // p = 3: power 1/2
  EXPECT_NEAR(harnack_mu(one, ball, INFINITY, ExponentField::constant(3.0)), 0.5, 1e-14);
}

TEST(HarnackMu, Preconditions) {
  const Grid g = pxtest::square(-1.0, 1.0, 32);
  const GridFunction one = GridFunction::constant(g, 1.0);
  const ExponentField p = ExponentField::constant(1.5);  // N/p = 4/3
  const Ball ball(vec({0.0, 0.0}), 0.25);
  EXPECT_THROW((void)harnack_mu(one, ball, 1.2, p), std::invalid_argument);
  EXPECT_NO_THROW((void)harnack_mu(one, ball, 1.5, p));
  EXPECT_THROW((void)harnack_mu(one, Ball(vec({0.5, 0.0}), 0.25), 2.0, p), std::invalid_argument);
  const Grid big = pxtest::line(-5.0, 5.0, 32);
  EXPECT_THROW((void)harnack_mu(GridFunction::constant(big, 1.0), Ball(vec({0.0}), 1.1), 2.0, p),
               std::invalid_argument);
}

TEST(HarnackCheck, ParabolaValues) {
  const Grid g = pxtest::line(0.0, 1.0, 256);
  const GridFunction u = parabola(g);
  const Ball ball(vec({0.5}), 0.125);
  const HarnackReport r = harnack_check(u, ball, 0.25, ExponentField::constant(2.0));
  EXPECT_DOUBLE_EQ(r.sup_u, 0.25);
  EXPECT_DOUBLE_EQ(r.inf_u, 0.375 * 0.625);
  EXPECT_DOUBLE_EQ(r.c_emp, 0.25 / (0.234375 + 0.125 + 0.125 * 0.25));
  EXPECT_DOUBLE_EQ(r.reduced_ratio(), 0.25 / (0.234375 + 0.125 * 0.25));
  ASSERT_TRUE(r.p_band.has_value());
  EXPECT_EQ(r.p_band->p_minus, 2.0);
}

TEST(HarnackCheck, NegativeValueInDilatedBallIsRejected) {
  const Grid g = pxtest::line(0.0, 1.0, 64);
  GridFunction u = parabola(g);
  u.values()[4] = -1e-3;  // x = 1/16, inside B_{1/2}(1/2)
  EXPECT_THROW((void)harnack_check(u, Ball(vec({0.5}), 0.125), 0.0), std::domain_error);
  EXPECT_NO_THROW((void)harnack_check(u, Ball(vec({0.5}), 0.0625), 0.0));
}

TEST(HarnackCheck, ReducedRatioIsScaleInvariantForConstantP) {
  const Grid g = pxtest::line(0.0, 1.0, 128);
  const ExponentField p = ExponentField::constant(3.0);
  const GridFunction u = parabola(g);
  const GridFunction f = GridFunction::constant(g, 0.7);
  const Ball ball(vec({0.5}), 0.125);
  const double base = harnack_check(u, ball, harnack_mu(f, ball, INFINITY, p)).reduced_ratio();
  for (double t : {0.1, 10.0, 100.0}) {
    const GridFunction tf = std::pow(t, 2.0) * f;
    const double scaled = harnack_check(t * u, ball, harnack_mu(tf, ball, INFINITY, p)).reduced_ratio();
    EXPECT_NEAR(scaled, base, 1e-12 * base) << "t = " << t;
  }
}

TEST(ScaleSweep, ParabolaIsStable) {
  const Grid g = pxtest::line(0.0, 1.0, 512);
  const ScaleSweep s = harnack_scale_sweep(parabola(g), GridFunction::constant(g, -2.0), vec({0.5}), 0.125,
                                           INFINITY, ExponentField::constant(2.0), 3);
  ASSERT_EQ(s.reports.size(), 3U);
  EXPECT_DOUBLE_EQ(s.reports[2].ball.radius, 0.125 / 4.0);
  EXPECT_LE(s.drift, 2.0);
  EXPECT_FALSE(s.anomaly);
  EXPECT_THROW((void)harnack_scale_sweep(parabola(g), GridFunction::constant(g, -2.0), vec({0.5}), 0.125, INFINITY,
                                         ExponentField::constant(2.0), 1),
               std::invalid_argument);
}

TEST(ClassifyTrend, Examples) {
  EXPECT_EQ(classify_trend({1.0, 2.0, 2.0, 3.0}), "nondecreasing");
  EXPECT_EQ(classify_trend({3.0, 1.0, 0.5}), "nonincreasing");
  EXPECT_EQ(classify_trend({2.0, 2.0}), "constant");
  EXPECT_EQ(classify_trend({1.0, 3.0, 2.0}), "mixed");
}

TEST(DependenceProbe, RecordsBothFamilies) {
  const Grid g = pxtest::line(0.0, 1.0, 64);
  ProblemSpec base{g, ExponentField::piecewise(0, 0.5, 2.0, 3.0), GridFunction::constant(g, -1.0),
                   GridFunction::constant(g, 1.0)};
  const DependenceProbe probe = dependence_probe(base, Ball(vec({0.5}), 0.1), {1.0, 4.0});
  ASSERT_EQ(probe.c_scaled.size(), 2U);
  ASSERT_EQ(probe.c_resolved.size(), 2U);
  for (double c : probe.c_resolved) EXPECT_GT(c, 0.0);
  EXPECT_NE(probe.trend_scaled, "");

  const auto path = std::filesystem::temp_directory_path() / "pxlap_trend_test.csv";
  write_trend_csv(path.string(), probe);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "k,c_emp_scaled,c_emp_resolved");
  std::string line;
  int rows = 0;
  bool trend_line = false;
  while (std::getline(in, line)) {
    if (line.rfind("# trend_scaled", 0) == 0) trend_line = true;
    else if (!line.empty() && line[0] != '#') ++rows;
  }
  EXPECT_EQ(rows, 2);
  EXPECT_TRUE(trend_line);
  std::filesystem::remove(path);
}

TEST(WeakHarnack, Policies) {
  const Grid g = pxtest::line(-2.0, 2.0, 400);
  const GridFunction three = GridFunction::constant(g, 3.0);
  const WeakHarnackResult c = weak_harnack_check(three, vec({0.0}), 1.0, 0.5);
  EXPECT_DOUBLE_EQ(c.lhs, 3.0);
  EXPECT_NEAR(c.rhs, 3.0, 1e-12);
  EXPECT_NEAR(c.ratio, 1.0, 1e-12);

  const GridFunction lin = GridFunction::sample(g, [](const Point& x) { return 1.0 + x[0] / 2.0; });
  EXPECT_THROW((void)weak_harnack_check(lin, vec({0.0}), 1.0), std::domain_error);
  const WeakHarnackResult s = weak_harnack_check(lin, vec({0.0}), 1.0, 1.0, HypothesisPolicy::shift);
  EXPECT_TRUE(s.shifted);
  EXPECT_NEAR(s.lhs, 1.5, 1e-12);  // min of 2 + x/2 on [-1, 1]
  EXPECT_NEAR(s.rhs, 2.0, 1e-12);  // mean of 2 + x/2 on [-2, 2]
  const WeakHarnackResult a = weak_harnack_check(lin, vec({0.0}), 1.0, 1.0, HypothesisPolicy::assume);
  EXPECT_NEAR(a.lhs, 0.5, 1e-12);
  EXPECT_NEAR(a.rhs, 1.0, 1e-12);

  EXPECT_THROW((void)weak_harnack_check(three, vec({0.0}), 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW((void)weak_harnack_check(three, vec({1.0}), 1.0), std::invalid_argument);
}

TEST(WeakHarnack, ImprovedRangeLimit) {
  EXPECT_DOUBLE_EQ(improved_t_limit(3, 2.0), 3.0);
  EXPECT_DOUBLE_EQ(improved_t_limit(3, 1.5), 1.0);
  EXPECT_TRUE(std::isinf(improved_t_limit(2, 2.0)));
  EXPECT_TRUE(std::isinf(improved_t_limit(1, 1.5)));
}

TEST(Cutoffs, Values) {
  const Grid g = pxtest::line(0.0, 2.0, 8);
  const GridFunction bump = bump_cutoff(g, vec({1.0}), 0.5);
  const GridFunction hat = hat_cutoff(g, vec({1.0}), 0.5);
  EXPECT_DOUBLE_EQ(bump[4], 1.0);
  EXPECT_DOUBLE_EQ(hat[4], 1.0);
  EXPECT_DOUBLE_EQ(hat[3], 0.5);
  EXPECT_DOUBLE_EQ(bump[3], 0.5625);
  EXPECT_DOUBLE_EQ(hat[2], 0.0);
  EXPECT_DOUBLE_EQ(bump[6], 0.0);
}

TEST(Caccioppoli, ConstantFunctionHasZeroLeftSide) {
  const Grid g = pxtest::square(-1.0, 1.0, 32);
  const Ball ball(vec({0.0, 0.0}), 0.5);
  const CaccioppoliResult r =
      caccioppoli_check(GridFunction::constant(g, 1.0), 2.0, bump_cutoff(g, ball.center, 0.5),
                        GridFunction::constant(g, 0.0), ExponentField::constant(2.5), 0.1, ball);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_GT(r.rhs, 0.0);
  EXPECT_TRUE(r.holds);
}

TEST(Caccioppoli, LinearFunctionAgainstExactIntegrals) {
  const Grid g = pxtest::line(0.0, 2.0, 1024);
  const Ball ball(vec({1.0}), 0.5);
  const GridFunction u = GridFunction::sample(g, [](const Point& x) { return 1.0 + x[0]; });
  const CaccioppoliResult r = caccioppoli_check(u, 1.0, hat_cutoff(g, ball.center, 0.5),
                                                GridFunction::constant(g, 0.0), ExponentField::constant(2.0), 1.0, ball);
  // int eta^2 = 1/3; int (1 + x)^2 |eta'|^2 over [1/2, 3/2] = 4 (2.5^3 - 1.5^3) / 3
  const double cutoff = 4.0 * (std::pow(2.5, 3.0) - std::pow(1.5, 3.0)) / 3.0;
  EXPECT_NEAR(r.lhs, 1.0 / 3.0, 1e-5);
  EXPECT_NEAR(r.base_term, 1.0 / 3.0, 1e-5);
  EXPECT_NEAR(r.cutoff_term, cutoff, 1e-4);
  EXPECT_EQ(r.source_term, 0.0);
  EXPECT_NEAR(r.rhs, 1.0 / 3.0 + cutoff, 1e-4);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.p_minus, 2.0);
}

TEST(Caccioppoli, Preconditions) {
  const Grid g = pxtest::line(0.0, 2.0, 64);
  const Ball ball(vec({1.0}), 0.5);
  const GridFunction zero = GridFunction::constant(g, 0.0);
  const GridFunction eta = hat_cutoff(g, ball.center, 0.5);
  const ExponentField p = ExponentField::constant(2.0);
  EXPECT_THROW((void)caccioppoli_check(GridFunction::constant(g, 0.5), 1.0, eta, zero, p, 1.0, ball),
               std::domain_error);
  EXPECT_THROW((void)caccioppoli_check(GridFunction::constant(g, 2.0), 1.0, hat_cutoff(g, ball.center, 0.75), zero,
                                       p, 1.0, ball),
               std::invalid_argument);
  EXPECT_THROW((void)caccioppoli_check(GridFunction::constant(g, 2.0), 0.0, eta, zero, p, 1.0, ball),
               std::invalid_argument);
}

TEST(LocalBound, Examples) {
  const Grid g = pxtest::line(0.0, 1.0, 64);
  const Region outer{Box(vec({0.0}), vec({1.0}))};
  const Region inner{Ball(vec({0.5}), 0.25)};
  const LocalBoundResult z = local_bound_check(GridFunction::constant(g, 0.0), inner, outer, 2.0, 0.0);
  EXPECT_EQ(z.sup_inner, 0.0);
  EXPECT_TRUE(z.holds);
  const LocalBoundResult five = local_bound_check(GridFunction::constant(g, 5.0), inner, outer, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(five.sup_inner, 5.0);
  EXPECT_NEAR(five.norm_outer, 5.0, 1e-12);
  EXPECT_NEAR(five.bound, 6.0, 1e-12);
  EXPECT_TRUE(five.holds);
  EXPECT_THROW((void)local_bound_check(GridFunction::constant(g, 5.0), outer, outer, 1.0, 1.0),
               std::invalid_argument);
}

TEST(CompactlyInside, Examples) {
  const Region box{Box(vec({-1.0, -1.0}), vec({1.0, 1.0}))};
  EXPECT_TRUE(compactly_inside(Region{Ball(vec({0.0, 0.0}), 0.5)}, box));
  EXPECT_FALSE(compactly_inside(Region{Ball(vec({0.0, 0.0}), 1.0)}, box));
  EXPECT_TRUE(compactly_inside(Region{Box(vec({-0.5, -0.5}), vec({0.5, 0.5}))}, Region{Ball(vec({0.0, 0.0}), 1.0)}));
  EXPECT_FALSE(compactly_inside(Region{Box(vec({-0.8, -0.8}), vec({0.8, 0.8}))}, Region{Ball(vec({0.0, 0.0}), 1.0)}));
  EXPECT_TRUE(compactly_inside(Region{Ball(vec({0.0, 0.0}), 0.2)}, Region{Ball(vec({0.1, 0.0}), 0.5)}));
}

TEST(Holder, PowerFunctionsHaveExactExponent) {
  const Grid g = pxtest::line(-1.0, 1.0, 2048);
  for (double beta : {0.25, 0.5, 1.0}) {
    const GridFunction u = GridFunction::sample(g, [beta](const Point& x) { return std::pow(std::abs(x[0]), beta); });
    const OscillationTrace t = holder_estimate(u, vec({0.0}), {0.5, 0.25, 0.125, 0.0625, 0.03125});
    EXPECT_NEAR(t.fitted_exponent, beta, 1e-9);
    EXPECT_NEAR(t.fit_residual, 0.0, 1e-9);
    EXPECT_FALSE(t.constant);
  }
}

TEST(Holder, ConstantAndInvalidInputs) {
  const Grid g = pxtest::line(-1.0, 1.0, 256);
  const OscillationTrace c = holder_estimate(GridFunction::constant(g, 2.0), vec({0.0}), {0.5, 0.25, 0.125, 0.0625});
  EXPECT_TRUE(c.constant);
  const GridFunction x = GridFunction::sample(g, [](const Point& p) { return p[0]; });
  EXPECT_THROW((void)holder_estimate(x, vec({0.0}), {0.5, 0.25, 0.125}), std::invalid_argument);
  EXPECT_THROW((void)holder_estimate(x, vec({0.0}), {0.5, 0.25, 0.25, 0.125}), std::invalid_argument);
  EXPECT_THROW((void)holder_estimate(x, vec({0.0}), {2.0, 0.25, 0.125, 0.0625}), std::invalid_argument);
}

TEST(Holder, DeltaCandidate) {
  EXPECT_DOUBLE_EQ(holder_delta_candidate(1, INFINITY, 2.0, 3.0), 1.5);
  EXPECT_NEAR(holder_delta_candidate(2, 1.5, 2.0, 3.0), 1.0 + (1.0 - 4.0 / 3.0), 1e-15);
}

#include "pxlap/barriers.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace pxlap;
using pxtest::vec;

namespace {

BarrierParams params(double mu, double delta = 1.0, double a = 1.0, Point x0 = vec({0.0, 0.0})) {
  return {std::move(x0), delta, mu, a};
}

// Laplacian of M e^{-mu |x|^2 / d^2}: (2 mu / d^2) e^{..} M (2 mu |x|^2 / d^2 - N), up to the positive scale.
double gaussian_laplacian_sign(double mu, double r, double d, int n) { return 2.0 * mu * r * r / (d * d) - n; }

}  // namespace

TEST(Barrier, ValueAtThreeQuarters) {
  const double expected = (std::exp(-0.5625) - std::exp(-1.0)) / (std::exp(-0.25) - std::exp(-1.0));
  EXPECT_NEAR(barrier_eval(params(1.0), vec({0.75, 0.0})).value, expected, 1e-15);
  EXPECT_NEAR(barrier_eval(params(1.0), vec({0.0, -0.75})).value, 0.49134314276777913, 1e-15);
}

TEST(Barrier, BoundaryValuesAreExact) {
  const Point x0 = vec({0.0, 0.0, 0.0});
  for (double mu : {1.0, 4.0, 16.0, 64.0}) {
    for (double delta : {1.0, 0.5, 0.1}) {
      const BarrierParams bp = params(mu, delta, 2.5, x0);
      for (const Point& dir : {vec({1.0, 0.0, 0.0}), vec({0.0, -1.0, 0.0}), vec({0.6, 0.0, 0.8})}) {
        EXPECT_LE(std::abs(barrier_eval(bp, x0 + bp.delta * dir).value), 1e-14 * bp.a_level);
        EXPECT_LE(std::abs(barrier_eval(bp, x0 + 0.5 * bp.delta * dir).value - bp.a_level), 1e-14 * bp.a_level);
      }
    }
  }
}

TEST(Barrier, BoundaryValuesWithOffsetCenter) {
  // x0 + r dir is rounded, and the exponent amplifies that by about mu / 2.
  const Point x0 = vec({0.3, -0.2, 0.1});
  for (double mu : {1.0, 4.0, 16.0, 64.0}) {
    const BarrierParams bp = params(mu, 0.1, 2.5, x0);
    const double tol = 1e-14 * std::max(1.0, mu / 4.0) * bp.a_level;
    for (const Point& dir : {vec({1.0, 0.0, 0.0}), vec({0.0, -1.0, 0.0}), vec({0.6, 0.0, 0.8})}) {
      EXPECT_LE(std::abs(barrier_eval(bp, x0 + bp.delta * dir).value), tol);
      EXPECT_LE(std::abs(barrier_eval(bp, x0 + 0.5 * bp.delta * dir).value - bp.a_level), tol);
    }
  }
}

TEST(Barrier, StrictlyDecreasingInRadius) {
  // Out to 2 delta; beyond that e^{-mu r^2} is below the rounding of e^{-mu}.
  const BarrierParams bp = params(6.0, 0.5);
  double prev = INFINITY;
  for (int i = 1; i <= 100; ++i) {
    const double v = barrier_eval(bp, vec({0.01 * i, 0.0})).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Barrier, GradientAndHessianMatchFiniteDifferences) {
  const BarrierParams bp = params(3.0, 0.8, 1.5, vec({0.1, 0.2}));
  const ClosedForm w = barrier(bp);
  const Point x = vec({0.5, -0.1});
  const double h = 1e-6;
  for (int k = 0; k < 2; ++k) {
    const Point e = Point::Unit(2, k);
    EXPECT_NEAR(w.gradient(x)[k], (w.value(x + h * e) - w.value(x - h * e)) / (2.0 * h), 1e-8);
    const Point dg = (w.gradient(x + h * e) - w.gradient(x - h * e)) / (2.0 * h);
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(w.hessian(x)(j, k), dg[j], 1e-7);
  }
  EXPECT_EQ(barrier_eval(bp, x).gradient, w.gradient(x));
}

TEST(Barrier, InvalidParameters) {
  EXPECT_THROW((void)barrier(params(0.0)), std::invalid_argument);
  EXPECT_THROW((void)barrier(params(1.0, -1.0)), std::invalid_argument);
  EXPECT_THROW((void)barrier(params(1.0, 1.0, -1.0)), std::invalid_argument);
}

TEST(AnnulusSamples, CoverBothSpheres) {
  const Point x0 = vec({1.0, 2.0});
  const auto pts = annulus_samples(x0, 0.25, 0.5, 16);
  ASSERT_FALSE(pts.empty());
  double rmin = INFINITY;
  double rmax = 0.0;
  for (const Point& p : pts) {
    const double r = (p - x0).norm();
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  EXPECT_NEAR(rmin, 0.25, 1e-15);
  EXPECT_NEAR(rmax, 0.5, 1e-15);
  EXPECT_THROW((void)annulus_samples(x0, 0.5, 0.25, 16), std::invalid_argument);
}

TEST(SubsolutionScan, LaplaceThresholdSigns) {
  const ExponentField p2 = ExponentField::constant(2.0);
  const BarrierScan above = barrier_subsolution_scan(params(8.0), p2, 32);
  EXPECT_GT(above.min_operator_value, 0.0);
  const BarrierScan below = barrier_subsolution_scan(params(1.0), p2, 32);
  EXPECT_LT(below.min_operator_value, 0.0);
  EXPECT_LT(gaussian_laplacian_sign(1.0, 0.5, 1.0, 2), 0.0);
  const double r = (below.argmin - below.params.x0).norm();
  EXPECT_NEAR(r, 0.5, 1e-12);
  EXPECT_GT(above.samples, 100U);
}

TEST(SubsolutionScan, ThresholdIsIndependentOfDelta) {
  const ExponentField p2 = ExponentField::constant(2.0);
  for (double delta : {0.1, 1.0, 3.0}) {
    EXPECT_LT(barrier_subsolution_scan(params(3.99, delta), p2, 16).min_operator_value, 0.0);
    EXPECT_GT(barrier_subsolution_scan(params(4.01, delta), p2, 16).min_operator_value, 0.0);
  }
}

TEST(SubsolutionScan, ArgminStaysInTheAnnulus) {
  const Box dom(vec({-1.0, -1.0}), vec({1.0, 1.0}));
  const ExponentField p = ExponentField::affine(2.0, vec({0.05, 0.0}), dom);
  const BarrierScan s = barrier_subsolution_scan(params(2.0, 0.4, 1.0, vec({0.2, 0.1})), p, 16);
  const double r = (s.argmin - s.params.x0).norm();
  EXPECT_GE(r, 0.2 - 1e-12);
  EXPECT_LE(r, 0.4 + 1e-12);
}

TEST(LogBarrierBound, ConstantPReducesToShiftedLinearFunction) {
  const ExponentField p2 = ExponentField::constant(2.0);
  for (double mu : {4.0, 8.0, 16.0}) {
    const LogBarrierBound r = log_barrier_bound(1.0, mu, p2, 2, 0.5, 1.0, 32);
    EXPECT_NEAR(r.lhs_min, 2.0 * (mu / 2.0 - 2.0), 1e-9);
    EXPECT_EQ(r.grad_p_sup, 0.0);
    EXPECT_EQ(r.abs_log_m, 0.0);
  }
  EXPECT_NEAR(log_barrier_bound(3.0, 8.0, p2, 3, 0.5, 1.0, 8).lhs_min, 2.0 * (8.0 / 2.0 - 3.0), 1e-9);
  EXPECT_NEAR(log_barrier_bound(std::exp(2.0), 1.0, p2, 2, 0.5, 1.0, 8).abs_log_m, 2.0, 1e-15);
  EXPECT_THROW((void)log_barrier_bound(1.0, 4.0, p2, 2, 0.0, 1.0, 8), std::invalid_argument);
}

TEST(LogBarrierBound, VariablePGrowsWithMu) {
  const Box dom(vec({-1.0, -1.0}), vec({1.0, 1.0}));
  const ExponentField p = ExponentField::affine(2.0, vec({0.3, 0.2}), dom);
  double prev = -INFINITY;
  for (double mu : {8.0, 16.0, 32.0}) {
    const LogBarrierBound r = log_barrier_bound(1.0, mu, p, 2, 0.5, 1.0, 16);
    EXPECT_GT(r.lhs_min, prev);
    EXPECT_NEAR(r.grad_p_sup, std::sqrt(0.13), 1e-6);
    prev = r.lhs_min;
  }
}

TEST(MaxPrinciple, Classifications) {
  const Grid g = pxtest::square(0.0, 1.0, 16);
  EXPECT_EQ(strong_max_principle_check(GridFunction::constant(g, 0.0), 0.125).classification,
            MaxPrincipleClass::identically_zero);
  const GridFunction bump = GridFunction::sample(g, [](const Point& x) { return 1.0 + x[0]; });
  const MaxPrincipleResult pos = strong_max_principle_check(bump, 0.125);
  EXPECT_EQ(pos.classification, MaxPrincipleClass::strictly_positive);
  EXPECT_DOUBLE_EQ(pos.interior_min, 1.125);

  GridFunction plateau = bump;
  for (Index i = 0; i < g.node_count(); ++i) {
    const Point x = g.node(i);
    if (std::abs(x[0] - 0.5) <= 0.125 && std::abs(x[1] - 0.5) <= 0.125) plateau.values()[i] = 0.0;
  }
  const MaxPrincipleResult v = strong_max_principle_check(plateau, 0.125);
  EXPECT_EQ(v.classification, MaxPrincipleClass::violation);
  EXPECT_EQ(v.interior_min, 0.0);
  EXPECT_EQ(to_string(v.classification), "violation");

  GridFunction neg = bump;
  neg.values()[5] = -0.01;
  EXPECT_THROW((void)strong_max_principle_check(neg, 0.125), std::domain_error);
  EXPECT_THROW((void)strong_max_principle_check(bump, 0.6), std::invalid_argument);
}

TEST(MaxPrinciple, SolvedHarmonicProblemIsPositive) {
  const Grid g = pxtest::square(-1.0, 1.0, 16);
  const ProblemSpec spec{g, ExponentField::constant(2.0), GridFunction::constant(g, 0.0),
                         GridFunction::sample(g, [](const Point& x) { return std::max(0.0, x[0]); })};
  const SolveResult res = solve_dirichlet(spec);
  ASSERT_TRUE(res.converged);
  EXPECT_EQ(strong_max_principle_check(res.solution, 0.125).classification, MaxPrincipleClass::strictly_positive);
}

TEST(Hopf, ConeHasUnitSlope) {
  const Grid g = pxtest::square(-1.0, 1.0, 64);
  const GridFunction cone = GridFunction::sample(g, [](const Point& x) { return 1.0 - x.norm(); });
  const HopfResult h = hopf_slope(cone, vec({1.0, 0.0}), vec({-1.0, 0.0}), {0.5, 0.25, 0.125, 0.0625});
  ASSERT_EQ(h.slopes.size(), 4U);
  for (double s : h.slopes) EXPECT_EQ(s, 1.0);
  EXPECT_EQ(h.c0, 1.0);
}

TEST(Hopf, ZeroFunctionAndErrors) {
  const Grid g = pxtest::square(-1.0, 1.0, 8);
  const GridFunction zero = GridFunction::constant(g, 0.0);
  const HopfResult h = hopf_slope(zero, vec({1.0, 0.0}), vec({-1.0, 0.0}), {0.5, 0.25});
  EXPECT_EQ(h.c0, 0.0);
  EXPECT_THROW((void)hopf_slope(zero, vec({1.0, 0.0}), vec({-1.0, 0.0}), {2.5}), std::out_of_range);
  EXPECT_THROW((void)hopf_slope(zero, vec({1.0, 0.0}), vec({-2.0, 0.0}), {0.5}), std::invalid_argument);
  EXPECT_THROW((void)hopf_slope(GridFunction::constant(g, 1.0), vec({1.0, 0.0}), vec({-1.0, 0.0}), {0.5}),
               std::domain_error);
}

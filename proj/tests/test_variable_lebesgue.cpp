#include "pxlap/variable_lebesgue.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace pxlap;
using pxtest::vec;

namespace {

// Root of (1/l)^2 + (1/l)^4 = 1, i.e. 1/l^2 = (sqrt(5) - 1)/2.
const double kQuarticRoot = 1.0 / std::sqrt((std::sqrt(5.0) - 1.0) / 2.0);

ExponentField two_four() { return ExponentField::piecewise(0, 1.0, 2.0, 4.0); }

GridFunction wavy(const Grid& g) {
  return GridFunction::sample(g, [](const Point& x) { return std::sin(3.0 * x[0]) + 0.5 * std::cos(2.0 * x[1]) + 0.2; });
}

}  // namespace

TEST(NormConfig, Validates) {
  EXPECT_THROW((NormConfig{0.0, 10}.validate()), std::invalid_argument);
  EXPECT_THROW((NormConfig{1e-8, 0}.validate()), std::invalid_argument);
}

TEST(Modular, UnitFunctionOnUnitDomain) {
  const Grid g = pxtest::line(0.0, 1.0, 16);
  const ExponentField p([](const Point& x) { return 2.0 + x[0]; }, 2.0, 3.0);
  EXPECT_NEAR(modular(GridFunction::constant(g, 1.0), p, 1.0), 1.0, 1e-15);
  EXPECT_EQ(modular(GridFunction::constant(g, 0.0), p, 0.3), 0.0);
  EXPECT_THROW((void)modular(GridFunction::constant(g, 1.0), p, 0.0), std::invalid_argument);
  EXPECT_THROW((void)modular(GridFunction::constant(g, 1.0), p, -1.0), std::invalid_argument);
}

TEST(Modular, PiecewiseExponentExactIntegral) {
  const Grid g = pxtest::line(0.0, 2.0, 64);
  EXPECT_NEAR(modular(GridFunction::constant(g, 1.0), two_four(), 2.0), 0.3125, 1e-14);
}

TEST(Luxemburg, TrivialCases) {
  const Grid g = pxtest::line(0.0, 1.0, 32);
  const ExponentField p2 = ExponentField::constant(2.0);
  EXPECT_EQ(luxemburg_norm(GridFunction::constant(g, 0.0), p2), 0.0);
  EXPECT_NEAR(luxemburg_norm(GridFunction::constant(g, 3.0), p2), 3.0, 3e-12);
}

TEST(Luxemburg, PiecewiseExponentQuarticRoot) {
  const Grid g = pxtest::line(0.0, 2.0, 64);
  EXPECT_NEAR(kQuarticRoot, 1.272019649514069, 1e-15);
  EXPECT_NEAR(luxemburg_norm(GridFunction::constant(g, 1.0), two_four()), kQuarticRoot, 1e-10);
}

TEST(Luxemburg, BracketFailureCarriesTheBracket) {
  const Grid g = pxtest::line(0.0, 1.0, 4);
  try {
    (void)luxemburg_norm(GridFunction::constant(g, 1e6), ExponentField::constant(2.0), NormConfig{1e-12, 3});
    FAIL() << "expected BracketError";
  } catch (const BracketError& e) {
    EXPECT_LT(e.lower(), e.upper());
    EXPECT_GT(modular(GridFunction::constant(g, 1e6), ExponentField::constant(2.0), e.upper()), 1.0);
  }
}

TEST(Luxemburg, ConstantExponentMatchesClassicalNorm) {
  const Grid g = pxtest::square(0.0, 1.0, 32);
  const GridFunction u = wavy(g);
  for (double p : {1.5, 2.0, 3.0, 4.5}) {
    const double lux = luxemburg_norm(u, ExponentField::constant(p));
    const double lp = lq_norm(u, p, Region{g.box()});
    EXPECT_NEAR(lux, lp, 10.0 * 1e-12 * lp) << "p = " << p;
  }
}

TEST(Luxemburg, HomogeneityProperty) {
  const Grid g = pxtest::square(0.0, 1.0, 24);
  const ExponentField p([](const Point& x) { return 1.5 + x[0] + 0.5 * x[1] * x[1]; }, 1.5, 3.0);
  const GridFunction u = wavy(g);
  const double base = luxemburg_norm(u, p);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> logt(-3.0, 3.0);
  std::bernoulli_distribution sign(0.5);
  for (int i = 0; i < 25; ++i) {
    const double t = (sign(rng) ? -1.0 : 1.0) * std::pow(10.0, logt(rng));
    EXPECT_NEAR(luxemburg_norm(t * u, p), std::abs(t) * base, 1e-8 * std::abs(t) * base) << "t = " << t;
  }
}

TEST(Luxemburg, UnitBallProperty) {
  const Grid g = pxtest::square(0.0, 1.0, 24);
  const ExponentField p([](const Point& x) { return 2.0 + std::sin(4.0 * x[0]) * 0.5; }, 1.5, 2.5);
  const GridFunction u = wavy(g);
  const double lam = luxemburg_norm(u, p);
  EXPECT_NEAR(modular(u, p, lam), 1.0, 1e-10);
}

TEST(Sobolev, LinearFunctionWithPEqualsTwo) {
  const Grid g = pxtest::line(0.0, 1.0, 1024);
  const GridFunction u = GridFunction::sample(g, [](const Point& x) { return x[0]; });
  EXPECT_NEAR(sobolev_norm(u, ExponentField::constant(2.0)), 1.0 / std::sqrt(3.0) + 1.0, 1e-6);
}

TEST(Sobolev, ConstantFunctionOnUnitDomain) {
  const Grid g = pxtest::square(0.0, 1.0, 8);
  EXPECT_NEAR(sobolev_norm(GridFunction::constant(g, 2.5), ExponentField::constant(3.0)), 2.5, 1e-11);
  EXPECT_EQ(sobolev_norm(GridFunction::constant(g, 0.0), ExponentField::constant(3.0)), 0.0);
}

TEST(LqNorm, InfinityIsTheNodalMaximumOverTheRegion) {
  const Grid g = pxtest::line(-1.0, 1.0, 8);
  const GridFunction u = GridFunction::sample(g, [](const Point& x) { return x[0] * x[0]; });
  EXPECT_DOUBLE_EQ(lq_norm(u, INFINITY, Region{Ball(vec({0.0}), 0.5)}), 0.25);
  EXPECT_DOUBLE_EQ(lq_norm(u, INFINITY, Region{g.box()}), 1.0);
}

TEST(LtAverage, Examples) {
  const Grid g = pxtest::line(0.0, 1.0, 1024);
  const GridFunction x = GridFunction::sample(g, [](const Point& p) { return p[0]; });
  const Ball ball(vec({0.5}), 0.5);
  EXPECT_NEAR(lt_average(GridFunction::constant(g, 4.0), 0.7, ball), 4.0, 1e-12);
  EXPECT_NEAR(lt_average(x, 1.0, ball), 0.5, 1e-12);
  EXPECT_NEAR(lt_average(x, 2.0, ball), std::sqrt(1.0 / 3.0), 1e-3);
  EXPECT_THROW((void)lt_average(x, 0.0, ball), std::invalid_argument);
  EXPECT_THROW((void)lt_average(x, 1.0, Ball(vec({3.0}), 0.1)), std::invalid_argument);
}

TEST(LtAverage, PowerMeanMonotoneInT) {
  const Grid g = pxtest::square(0.0, 1.0, 16);
  const GridFunction u = wavy(g);
  const Ball ball(vec({0.5, 0.5}), 0.4);
  double prev = 0.0;
  for (double t : {0.25, 0.5, 1.0, 2.0, 3.0, 8.0}) {
    const double v = lt_average(u, t, ball);
    EXPECT_GE(v, prev * (1.0 - 1e-14));
    prev = v;
  }
}

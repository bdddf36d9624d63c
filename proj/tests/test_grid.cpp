#include "pxlap/grid.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace pxlap;
using pxtest::vec;

TEST(Box, RejectsDegenerateCorners) {
  EXPECT_THROW(Box(vec({0.0}), vec({0.0})), std::invalid_argument);
  EXPECT_THROW(Box(vec({0.0, 0.0}), vec({1.0})), std::invalid_argument);
}

TEST(Ball, ClosedMembershipIncludesTheSphere) {
  const Ball b(vec({0.0, 0.0}), 0.5);
  EXPECT_TRUE(b.contains(vec({0.5, 0.0})));
  EXPECT_TRUE(b.contains(vec({std::sqrt(0.125), std::sqrt(0.125)})));
  EXPECT_FALSE(b.contains(vec({0.5001, 0.0})));
  EXPECT_THROW(Ball(vec({0.0}), 0.0), std::invalid_argument);
}

TEST(Grid, IndexingIsRowMajorLastAxisFastest) {
  const Grid g = Grid::over(Box(vec({0.0, 0.0}), vec({2.0, 1.0})), std::vector<int>{4, 2});
  EXPECT_EQ(g.node_count(), 15);
  EXPECT_EQ(g.cell_count(), 8);
  EXPECT_EQ(g.stride(0), 3);
  EXPECT_EQ(g.stride(1), 1);
  const int mi[] = {2, 1};
  const Index flat = g.flat_node(mi);
  EXPECT_EQ(flat, 7);
  EXPECT_EQ(g.node_multi_index(flat), (std::vector<int>{2, 1}));
  EXPECT_TRUE(g.node(flat).isApprox(vec({1.0, 0.5})));
  EXPECT_FALSE(g.on_boundary(flat));
  EXPECT_TRUE(g.on_boundary(0));
}

TEST(Grid, NodalVolumesSumToTheBoxVolume) {
  const Grid g = Grid::over(Box(vec({-1.0, 0.0}), vec({1.0, 3.0})), std::vector<int>{8, 6});
  double total = 0.0;
  for (Index i = 0; i < g.node_count(); ++i) total += g.nodal_volume(i);
  EXPECT_NEAR(total, 6.0, 1e-12);
}

TEST(Grid, CellCornersAndCenters) {
  const Grid g = pxtest::square(0.0, 1.0, 4);
  const Index cell = 5;  // row 1, column 1
  EXPECT_TRUE(g.cell_center(cell).isApprox(vec({0.375, 0.375})));
  EXPECT_EQ(g.cell_corner(cell, 0), g.cell_origin_node(cell));
  EXPECT_EQ(g.cell_corner(cell, 3), g.cell_origin_node(cell) + g.stride(0) + g.stride(1));
}

TEST(Grid, NodesInBallIncludeRimNodes) {
  const Grid g = pxtest::line(0.0, 1.0, 8);
  const auto nodes = g.nodes_in(Ball(vec({0.5}), 0.25));
  EXPECT_EQ(nodes.size(), 5U);
}

TEST(GridFunction, RejectsNonFiniteValues) {
  const Grid g = pxtest::line(0.0, 1.0, 2);
  EXPECT_THROW(GridFunction(g, Eigen::Vector3d(0.0, NAN, 1.0)), std::invalid_argument);
  EXPECT_THROW(GridFunction(g, Eigen::Vector2d(0.0, 1.0)), std::invalid_argument);
}

TEST(GridFunction, InterpolationReproducesMultilinearFunctions) {
  const Grid g = Grid::over(Box(vec({0.0, 0.0}), vec({1.0, 2.0})), std::vector<int>{5, 7});
  const auto f = [](const Point& x) { return 1.0 + 2.0 * x[0] - 3.0 * x[1] + 0.5 * x[0] * x[1]; };
  const GridFunction u = GridFunction::sample(g, f);
  for (const Point& x : {vec({0.13, 1.71}), vec({1.0, 2.0}), vec({0.0, 0.0}), vec({0.5, 0.33})}) {
    EXPECT_NEAR(u.interpolate(x), f(x), 1e-13);
  }
  EXPECT_THROW((void)u.interpolate(vec({1.1, 0.0})), std::out_of_range);
}

TEST(GridFunction, CornerGradientsOfLinearFunctionsAreExact) {
  const Grid g = pxtest::square(0.0, 1.0, 3);
  const GridFunction u = GridFunction::sample(g, [](const Point& x) { return 2.0 * x[0] - x[1]; });
  for (Index c = 0; c < g.cell_count(); ++c) {
    for (unsigned m = 0; m < g.corner_count(); ++m) {
      EXPECT_TRUE(u.corner_gradient(c, m).isApprox(vec({2.0, -1.0}), 1e-12));
    }
  }
}

TEST(CellQuadrature, BallWeightsApproximateTheBallArea) {
  const Grid g = pxtest::square(-1.0, 1.0, 64);
  double area = 0.0;
  for (const auto& s : cell_quadrature(g, Region{Ball(vec({0.0, 0.0}), 0.75)})) area += s.weight;
  EXPECT_NEAR(area, M_PI * 0.5625, 2e-3);
  double full = 0.0;
  for (const auto& s : cell_quadrature(g)) full += s.weight;
  EXPECT_NEAR(full, 4.0, 1e-12);
}

TEST(Pxgrid, RoundTripIsBitExact) {
  const Grid g = Grid::over(Box(vec({-0.3, 0.1}), vec({0.7, 2.0})), std::vector<int>{3, 4});
  const GridFunction u = GridFunction::sample(g, [](const Point& x) { return std::sin(7.0 * x[0]) / 3.0 + x[1]; });
  std::stringstream buf;
  write_pxgrid(buf, u);
  const GridFunction v = read_pxgrid(buf);
  EXPECT_TRUE(v.grid().same_lattice(g));
  EXPECT_EQ(v.grid().origin(), g.origin());
  EXPECT_EQ(v.grid().spacing(), g.spacing());
  for (Index i = 0; i < g.node_count(); ++i) EXPECT_EQ(v[i], u[i]);
}

TEST(Pxgrid, RejectsMalformedInput) {
  std::stringstream bad_header("PXGRID v2 1 3 0 0.5\n1 2 3\n");
  EXPECT_THROW((void)read_pxgrid(bad_header), std::runtime_error);
  std::stringstream short_body("PXGRID v1 1 3 0 0.5\n1 2\n");
  EXPECT_THROW((void)read_pxgrid(short_body), std::runtime_error);
  std::stringstream trailing("PXGRID v1 1 3 0 0.5\n1 2 3 4\n");
  EXPECT_THROW((void)read_pxgrid(trailing), std::runtime_error);
}

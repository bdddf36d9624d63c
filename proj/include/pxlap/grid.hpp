#pragma once

// Uniform tensor lattices, nodal grid functions and cell quadrature.

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pxlap {

using Point = Eigen::VectorXd;
using Index = Eigen::Index;

/// Axis-aligned box [lower, upper].
struct Box {
  Point lower;
  Point upper;

  Box(Point lower_corner, Point upper_corner);

  [[nodiscard]] int dim() const { return static_cast<int>(lower.size()); }
  [[nodiscard]] double volume() const;
  [[nodiscard]] bool contains(const Point& x, double slack = 0.0) const;
  /// True when `other` lies inside this box, boundaries allowed to touch.
  [[nodiscard]] bool contains(const Box& other, double slack = 0.0) const;
};

/// Closed Euclidean ball. Membership tests carry a 1e-12 relative slack so
/// that points placed analytically on the sphere count as inside.
struct Ball {
  Point center;
  double radius;

  Ball(Point c, double r);

  [[nodiscard]] int dim() const { return static_cast<int>(center.size()); }
  [[nodiscard]] bool contains(const Point& x) const;
  [[nodiscard]] Ball dilated(double factor) const { return {center, radius * factor}; }
  [[nodiscard]] Box bounding_box() const;
};

using Region = std::variant<Box, Ball>;

[[nodiscard]] bool region_contains(const Region& region, const Point& x);
[[nodiscard]] Box region_bounds(const Region& region);
/// Ball fully inside box (closed containment with tiny slack).
[[nodiscard]] bool inside(const Ball& ball, const Box& box);

/// Node lattice: dims[k] nodes along axis k, node i sits at origin + i*spacing.
/// Flat node indices are row-major (last axis fastest).
class Grid {
 public:
  Grid(std::vector<int> dims, Point origin, Point spacing);

  /// Lattice over `box` with `cells[k]` cells along axis k.
  static Grid over(const Box& box, const std::vector<int>& cells);
  /// Same, with an equal cell count on every axis.
  static Grid over(const Box& box, int cells_per_axis);

  [[nodiscard]] int dim() const { return static_cast<int>(dims_.size()); }
  [[nodiscard]] const std::vector<int>& dims() const { return dims_; }
  [[nodiscard]] const Point& origin() const { return origin_; }
  [[nodiscard]] const Point& spacing() const { return spacing_; }
  [[nodiscard]] Index node_count() const { return node_count_; }
  [[nodiscard]] Index cell_count() const { return cell_count_; }
  [[nodiscard]] Box box() const;
  [[nodiscard]] double cell_volume() const;

  [[nodiscard]] std::vector<int> node_multi_index(Index flat) const;
  [[nodiscard]] Index flat_node(std::span<const int> multi) const;
  [[nodiscard]] Point node(Index flat) const;
  [[nodiscard]] bool on_boundary(Index flat) const;
  /// Trapezoid weight of a node: cell volume times 2^-(number of boundary axes).
  [[nodiscard]] double nodal_volume(Index flat) const;

  /// Node index of the lower corner of a cell.
  [[nodiscard]] Index cell_origin_node(Index cell) const;
  /// Node index of the cell corner selected by `mask` (bit k set = upper along axis k).
  [[nodiscard]] Index cell_corner(Index cell, unsigned mask) const {
    return cell_origin_node(cell) + corner_offsets_[mask];
  }
  [[nodiscard]] Point cell_center(Index cell) const;
  [[nodiscard]] unsigned corner_count() const { return 1U << dims_.size(); }
  [[nodiscard]] Index stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  /// Nodes inside the closed ball.
  [[nodiscard]] std::vector<Index> nodes_in(const Ball& ball) const;
  [[nodiscard]] std::vector<Index> nodes_in(const Region& region) const;

  [[nodiscard]] bool same_lattice(const Grid& other) const;

 private:
  std::vector<int> dims_;
  Point origin_;
  Point spacing_;
  std::vector<Index> strides_;
  std::vector<Index> cell_strides_;
  std::vector<Index> corner_offsets_;
  Index node_count_ = 0;
  Index cell_count_ = 0;
};

/// Scalar field sampled at the nodes of a Grid.
class GridFunction {
 public:
  GridFunction(Grid grid, Eigen::VectorXd values);

  static GridFunction constant(const Grid& grid, double value);
  static GridFunction sample(const Grid& grid, const std::function<double(const Point&)>& fn);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const Eigen::VectorXd& values() const { return values_; }
  [[nodiscard]] Eigen::VectorXd& values() { return values_; }
  [[nodiscard]] double operator[](Index i) const { return values_[i]; }

  /// Multilinear interpolation; throws outside the grid box.
  [[nodiscard]] double interpolate(const Point& x) const;
  /// Value at each cell center (mean of the cell corners).
  [[nodiscard]] Eigen::VectorXd cell_averages() const;
  /// Forward-difference gradient of one cell taken from the corner `mask`:
  /// component k is the difference along the cell edge on axis k incident to that corner.
  [[nodiscard]] Point corner_gradient(Index cell, unsigned mask) const;
  /// Mean of the corner gradients, i.e. the cell-centered gradient.
  [[nodiscard]] Point cell_gradient(Index cell) const;

  [[nodiscard]] double max_value() const { return values_.maxCoeff(); }
  [[nodiscard]] double min_value() const { return values_.minCoeff(); }

 private:
  Grid grid_;
  Eigen::VectorXd values_;
};

GridFunction operator*(double scale, const GridFunction& u);

/// One midpoint-rule sample: a cell center and its weight (cell volume times
/// the fraction of the cell inside the integration region).
struct CellSample {
  Index cell;
  Point center;
  double weight;
};

/// Cells meeting `region`, weighted by the contained fraction. Cells cut by the
/// region boundary are subsampled with `subsamples` points per axis.
[[nodiscard]] std::vector<CellSample> cell_quadrature(const Grid& grid, const Region& region,
                                                      int subsamples = 8);
[[nodiscard]] std::vector<CellSample> cell_quadrature(const Grid& grid);

// PXGRID v1 text format:
//   PXGRID v1 N <dims...> <origin...> <spacing...>
//   <values, row-major, whitespace separated>
// Numbers are written with 17 significant digits so a round trip is bit-exact.
void write_pxgrid(std::ostream& out, const GridFunction& u);
[[nodiscard]] GridFunction read_pxgrid(std::istream& in);
void save_pxgrid(const std::string& path, const GridFunction& u);
[[nodiscard]] GridFunction load_pxgrid(const std::string& path);

}  // namespace pxlap

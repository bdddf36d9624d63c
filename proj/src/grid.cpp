#include "pxlap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pxlap {

namespace {

constexpr double kBallSlack = 1e-12;

void require_same_dim(const Point& a, const Point& b, const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

Box::Box(Point lower_corner, Point upper_corner)
    : lower(std::move(lower_corner)), upper(std::move(upper_corner)) {
  require_same_dim(lower, upper, "Box");
  if (lower.size() == 0) throw std::invalid_argument("Box: zero dimension");
  if ((upper.array() <= lower.array()).any()) {
    throw std::invalid_argument("Box: upper corner must exceed lower corner on every axis");
  }
}

double Box::volume() const { return (upper - lower).prod(); }

bool Box::contains(const Point& x, double slack) const {
  return (x.array() >= lower.array() - slack).all() && (x.array() <= upper.array() + slack).all();
}

bool Box::contains(const Box& other, double slack) const {
  return contains(other.lower, slack) && contains(other.upper, slack);
}

Ball::Ball(Point c, double r) : center(std::move(c)), radius(r) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("Ball: radius must be positive and finite");
  }
  if (center.size() == 0) throw std::invalid_argument("Ball: zero dimension");
}

bool Ball::contains(const Point& x) const {
  return (x - center).norm() <= radius * (1.0 + kBallSlack);
}

Box Ball::bounding_box() const {
  const Point r = Point::Constant(center.size(), radius);
  return {center - r, center + r};
}

bool region_contains(const Region& region, const Point& x) {
  return std::visit(
      [&](const auto& r) {
        if constexpr (std::is_same_v<std::decay_t<decltype(r)>, Box>) {
          return r.contains(x, 1e-12 * (r.upper - r.lower).maxCoeff());
        } else {
          return r.contains(x);
        }
      },
      region);
}

Box region_bounds(const Region& region) {
  if (const auto* box = std::get_if<Box>(&region)) return *box;
  return std::get<Ball>(region).bounding_box();
}

bool inside(const Ball& ball, const Box& box) {
  const Box bb = ball.bounding_box();
  return box.contains(bb, kBallSlack * std::max(1.0, ball.radius));
}

// ---------------------------------------------------------------------------

Grid::Grid(std::vector<int> dims, Point origin, Point spacing)
    : dims_(std::move(dims)), origin_(std::move(origin)), spacing_(std::move(spacing)) {
  const auto n = dims_.size();
  if (n == 0) throw std::invalid_argument("Grid: zero dimension");
  if (origin_.size() != static_cast<Index>(n) || spacing_.size() != static_cast<Index>(n)) {
    throw std::invalid_argument("Grid: origin/spacing dimension mismatch");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (dims_[k] < 2) throw std::invalid_argument("Grid: every extent must be >= 2");
    if (!(spacing_[static_cast<Index>(k)] > 0.0) ||
        !std::isfinite(spacing_[static_cast<Index>(k)])) {
      throw std::invalid_argument("Grid: spacing must be positive and finite");
    }
  }
  if (!origin_.allFinite()) throw std::invalid_argument("Grid: origin must be finite");

  strides_.assign(n, 1);
  cell_strides_.assign(n, 1);
  for (std::size_t k = n - 1; k-- > 0;) {
    strides_[k] = strides_[k + 1] * dims_[k + 1];
    cell_strides_[k] = cell_strides_[k + 1] * (dims_[k + 1] - 1);
  }
  node_count_ = strides_[0] * dims_[0];
  cell_count_ = cell_strides_[0] * (dims_[0] - 1);

  corner_offsets_.resize(std::size_t{1} << n);
  for (unsigned mask = 0; mask < corner_offsets_.size(); ++mask) {
    Index off = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (1U << k)) off += strides_[k];
    }
    corner_offsets_[mask] = off;
  }
}

Grid Grid::over(const Box& box, const std::vector<int>& cells) {
  if (static_cast<int>(cells.size()) != box.dim()) {
    throw std::invalid_argument("Grid::over: cell count per axis must match box dimension");
  }
  std::vector<int> dims(cells.size());
  Point spacing(box.dim());
  for (int k = 0; k < box.dim(); ++k) {
    if (cells[static_cast<std::size_t>(k)] < 1) {
      throw std::invalid_argument("Grid::over: need at least one cell per axis");
    }
    dims[static_cast<std::size_t>(k)] = cells[static_cast<std::size_t>(k)] + 1;
    spacing[k] = (box.upper[k] - box.lower[k]) / cells[static_cast<std::size_t>(k)];
  }
  return {std::move(dims), box.lower, std::move(spacing)};
}

Grid Grid::over(const Box& box, int cells_per_axis) {
  return over(box, std::vector<int>(static_cast<std::size_t>(box.dim()), cells_per_axis));
}

Box Grid::box() const {
  Point upper = origin_;
  for (int k = 0; k < dim(); ++k) upper[k] += (dims_[static_cast<std::size_t>(k)] - 1) * spacing_[k];
  return {origin_, upper};
}

double Grid::cell_volume() const { return spacing_.prod(); }

std::vector<int> Grid::node_multi_index(Index flat) const {
  std::vector<int> multi(dims_.size());
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    multi[k] = static_cast<int>(flat / strides_[k]);
    flat %= strides_[k];
  }
  return multi;
}

Index Grid::flat_node(std::span<const int> multi) const {
  Index flat = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) flat += multi[k] * strides_[k];
  return flat;
}

Point Grid::node(Index flat) const {
  Point x(dim());
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    const auto i = flat / strides_[k];
    flat %= strides_[k];
    x[static_cast<Index>(k)] = origin_[static_cast<Index>(k)] + static_cast<double>(i) * spacing_[static_cast<Index>(k)];
  }
  return x;
}

bool Grid::on_boundary(Index flat) const {
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    const auto i = flat / strides_[k];
    flat %= strides_[k];
    if (i == 0 || i == dims_[k] - 1) return true;
  }
  return false;
}

double Grid::nodal_volume(Index flat) const {
  double w = cell_volume();
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    const auto i = flat / strides_[k];
    flat %= strides_[k];
    if (i == 0 || i == dims_[k] - 1) w *= 0.5;
  }
  return w;
}

Index Grid::cell_origin_node(Index cell) const {
  Index node = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    const auto i = cell / cell_strides_[k];
    cell %= cell_strides_[k];
    node += i * strides_[k];
  }
  return node;
}

Point Grid::cell_center(Index cell) const {
  Point x = node(cell_origin_node(cell));
  x += 0.5 * spacing_;
  return x;
}

std::vector<Index> Grid::nodes_in(const Ball& ball) const { return nodes_in(Region{ball}); }

std::vector<Index> Grid::nodes_in(const Region& region) const {
  const Box bounds = region_bounds(region);
  if (bounds.dim() != dim()) throw std::invalid_argument("Grid::nodes_in: dimension mismatch");
  // Index range of nodes inside the bounding box, then filter.
  std::vector<int> lo(dims_.size());
  std::vector<int> hi(dims_.size());
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    const auto kk = static_cast<Index>(k);
    const double a = (bounds.lower[kk] - origin_[kk]) / spacing_[kk];
    const double b = (bounds.upper[kk] - origin_[kk]) / spacing_[kk];
    lo[k] = std::max(0, static_cast<int>(std::floor(a - 1e-9)));
    hi[k] = std::min(dims_[k] - 1, static_cast<int>(std::ceil(b + 1e-9)));
    if (lo[k] > hi[k]) return {};
  }
  std::vector<Index> out;
  std::vector<int> idx = lo;
  while (true) {
    const Index flat = flat_node(idx);
    if (region_contains(region, node(flat))) out.push_back(flat);
    std::size_t k = dims_.size();
    while (k-- > 0) {
      if (++idx[k] <= hi[k]) break;
      idx[k] = lo[k];
      if (k == 0) return out;
    }
  }
}

bool Grid::same_lattice(const Grid& other) const {
  if (dims_ != other.dims_) return false;
  const double scale = spacing_.maxCoeff();
  return (origin_ - other.origin_).cwiseAbs().maxCoeff() <= 1e-9 * scale &&
         (spacing_ - other.spacing_).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

// ---------------------------------------------------------------------------

GridFunction::GridFunction(Grid grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.node_count()) {
    throw std::invalid_argument("GridFunction: value count does not match lattice");
  }
  if (!values_.allFinite()) throw std::invalid_argument("GridFunction: values must be finite");
}

GridFunction GridFunction::constant(const Grid& grid, double value) {
  return {grid, Eigen::VectorXd::Constant(grid.node_count(), value)};
}

GridFunction GridFunction::sample(const Grid& grid, const std::function<double(const Point&)>& fn) {
  Eigen::VectorXd v(grid.node_count());
  for (Index i = 0; i < grid.node_count(); ++i) v[i] = fn(grid.node(i));
  return {grid, std::move(v)};
}

double GridFunction::interpolate(const Point& x) const {
  const int n = grid_.dim();
  if (x.size() != n) throw std::invalid_argument("interpolate: dimension mismatch");
  const Box box = grid_.box();
  if (!box.contains(x, 1e-12 * (box.upper - box.lower).maxCoeff())) {
    throw std::out_of_range("interpolate: point outside the grid box");
  }
  std::vector<int> base(static_cast<std::size_t>(n));
  Point frac(n);
  for (int k = 0; k < n; ++k) {
    const double t = (x[k] - grid_.origin()[k]) / grid_.spacing()[k];
    const int last = grid_.dims()[static_cast<std::size_t>(k)] - 2;
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, last);
    base[static_cast<std::size_t>(k)] = i;
    frac[k] = std::clamp(t - i, 0.0, 1.0);
  }
  const Index origin_node = grid_.flat_node(base);
  double acc = 0.0;
  for (unsigned mask = 0; mask < grid_.corner_count(); ++mask) {
    double w = 1.0;
    Index node = origin_node;
    for (int k = 0; k < n; ++k) {
      if (mask & (1U << k)) {
        w *= frac[k];
        node += grid_.stride(k);
      } else {
        w *= 1.0 - frac[k];
      }
    }
    if (w != 0.0) acc += w * values_[node];
  }
  return acc;
}

Eigen::VectorXd GridFunction::cell_averages() const {
  Eigen::VectorXd out(grid_.cell_count());
  const double inv = 1.0 / grid_.corner_count();
  for (Index c = 0; c < grid_.cell_count(); ++c) {
    double s = 0.0;
    for (unsigned m = 0; m < grid_.corner_count(); ++m) s += values_[grid_.cell_corner(c, m)];
    out[c] = s * inv;
  }
  return out;
}

Point GridFunction::corner_gradient(Index cell, unsigned mask) const {
  const int n = grid_.dim();
  Point g(n);
  const Index base = grid_.cell_corner(cell, mask);
  for (int k = 0; k < n; ++k) {
    const unsigned bit = 1U << k;
    const Index other = grid_.cell_corner(cell, mask ^ bit);
    const double diff = (mask & bit) ? values_[base] - values_[other] : values_[other] - values_[base];
    g[k] = diff / grid_.spacing()[k];
  }
  return g;
}

Point GridFunction::cell_gradient(Index cell) const {
  Point g = Point::Zero(grid_.dim());
  for (unsigned m = 0; m < grid_.corner_count(); ++m) g += corner_gradient(cell, m);
  return g / grid_.corner_count();
}

GridFunction operator*(double scale, const GridFunction& u) {
  return {u.grid(), scale * u.values()};
}

// ---------------------------------------------------------------------------

std::vector<CellSample> cell_quadrature(const Grid& grid) {
  std::vector<CellSample> out;
  out.reserve(static_cast<std::size_t>(grid.cell_count()));
  const double vol = grid.cell_volume();
  for (Index c = 0; c < grid.cell_count(); ++c) out.push_back({c, grid.cell_center(c), vol});
  return out;
}

std::vector<CellSample> cell_quadrature(const Grid& grid, const Region& region, int subsamples) {
  if (subsamples < 1) throw std::invalid_argument("cell_quadrature: subsamples must be >= 1");
  const int n = grid.dim();
  const Box bounds = region_bounds(region);
  if (bounds.dim() != n) throw std::invalid_argument("cell_quadrature: dimension mismatch");
  const double vol = grid.cell_volume();
  const Point& h = grid.spacing();

  std::vector<CellSample> out;
  const long total_sub = static_cast<long>(std::pow(subsamples, n));
  for (Index c = 0; c < grid.cell_count(); ++c) {
    const Point lo = grid.node(grid.cell_origin_node(c));
    const Point hi = lo + h;
    if ((hi.array() < bounds.lower.array()).any() || (lo.array() > bounds.upper.array()).any()) continue;
    bool all_in = true;
    for (unsigned m = 0; m < grid.corner_count() && all_in; ++m) {
      all_in = region_contains(region, grid.node(grid.cell_corner(c, m)));
    }
    // A ball is convex and a box too, so all corners inside means the cell is inside.
    double fraction = 1.0;
    if (!all_in) {
      long inside_count = 0;
      std::vector<int> sub(static_cast<std::size_t>(n), 0);
      Point x(n);
      for (long s = 0; s < total_sub; ++s) {
        long rem = s;
        for (int k = n - 1; k >= 0; --k) {
          sub[static_cast<std::size_t>(k)] = static_cast<int>(rem % subsamples);
          rem /= subsamples;
        }
        for (int k = 0; k < n; ++k) x[k] = lo[k] + (sub[static_cast<std::size_t>(k)] + 0.5) * h[k] / subsamples;
        if (region_contains(region, x)) ++inside_count;
      }
      fraction = static_cast<double>(inside_count) / static_cast<double>(total_sub);
    }
    if (fraction > 0.0) out.push_back({c, grid.cell_center(c), vol * fraction});
  }
  return out;
}

// ---------------------------------------------------------------------------

void write_pxgrid(std::ostream& out, const GridFunction& u) {
  const Grid& g = u.grid();
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(17);
  out << "PXGRID v1 " << g.dim();
  for (int d : g.dims()) out << ' ' << d;
  for (int k = 0; k < g.dim(); ++k) out << ' ' << g.origin()[k];
  for (int k = 0; k < g.dim(); ++k) out << ' ' << g.spacing()[k];
  out << '\n';
  const auto& v = u.values();
  const Index row = g.dims().back();
  for (Index i = 0; i < v.size(); ++i) {
    out << v[i] << (((i + 1) % row == 0) ? '\n' : ' ');
  }
  out.flags(flags);
  out.precision(prec);
}

namespace {

double parse_double(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw std::runtime_error(std::string("PXGRID: missing ") + what);
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) {
    throw std::runtime_error(std::string("PXGRID: malformed ") + what + " '" + tok + "'");
  }
  return v;
}

}  // namespace

GridFunction read_pxgrid(std::istream& in) {
  std::string magic;
  std::string version;
  if (!(in >> magic >> version) || magic != "PXGRID") throw std::runtime_error("PXGRID: bad magic");
  if (version != "v1") throw std::runtime_error("PXGRID: unsupported version " + version);
  int n = 0;
  if (!(in >> n) || n < 1) throw std::runtime_error("PXGRID: bad dimension");
  std::vector<int> dims(static_cast<std::size_t>(n));
  for (auto& d : dims) {
    if (!(in >> d)) throw std::runtime_error("PXGRID: missing extent");
  }
  Point origin(n);
  Point spacing(n);
  for (int k = 0; k < n; ++k) origin[k] = parse_double(in, "origin");
  for (int k = 0; k < n; ++k) spacing[k] = parse_double(in, "spacing");
  Grid grid(std::move(dims), std::move(origin), std::move(spacing));
  Eigen::VectorXd values(grid.node_count());
  for (Index i = 0; i < values.size(); ++i) values[i] = parse_double(in, "value");
  std::string extra;
  if (in >> extra) throw std::runtime_error("PXGRID: trailing data after values");
  return {std::move(grid), std::move(values)};
}

void save_pxgrid(const std::string& path, const GridFunction& u) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_pxgrid(out, u);
}

GridFunction load_pxgrid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file " + path);
  return read_pxgrid(in);
}

}  // namespace pxlap

#include "pxlap/exponent_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace pxlap {

ExponentField::ExponentField(Evaluator p, double p1, double p2, GradientEvaluator gradient)
    : p_(std::move(p)), gradient_(std::move(gradient)), p1_(p1), p2_(p2) {
  if (!p_) throw std::invalid_argument("ExponentField: empty evaluator");
  if (!(p1_ > 1.0) || !(p2_ >= p1_) || !std::isfinite(p2_)) {
    throw std::invalid_argument("ExponentField: need 1 < p1 <= p2 < inf (got p1=" +
                                std::to_string(p1_) + ", p2=" + std::to_string(p2_) + ")");
  }
}

double ExponentField::operator()(const Point& x) const {
  const double v = p_(x);
  const double slack = 1e-12 * p2_;
  if (!(v >= p1_ - slack && v <= p2_ + slack)) {
    throw std::domain_error("ExponentField: p(x) = " + std::to_string(v) + " outside [" +
                            std::to_string(p1_) + ", " + std::to_string(p2_) + "]");
  }
  return v;
}

Point ExponentField::gradient(const Point& x, double fd_step) const {
  if (gradient_) return gradient_(x);
  Point g(x.size());
  for (Index k = 0; k < x.size(); ++k) {
    Point xp = x;
    Point xm = x;
    xp[k] += fd_step;
    xm[k] -= fd_step;
    double fp = 0.0;
    double fm = 0.0;
    double span = 2.0 * fd_step;
    try {
      fp = (*this)(xp);
    } catch (const std::out_of_range&) {
      fp = (*this)(x);
      span = fd_step;
    }
    try {
      fm = (*this)(xm);
    } catch (const std::out_of_range&) {
      fm = (*this)(x);
      span -= fd_step;
    }
    g[k] = span > 0.0 ? (fp - fm) / span : 0.0;
  }
  return g;
}

ExponentField ExponentField::dual() const {
  const ExponentField self = *this;
  GradientEvaluator dual_grad = [self](const Point& x) {
    const double v = self(x);
    return Point(-self.gradient(x) / ((v - 1.0) * (v - 1.0)));
  };
  return {[self](const Point& x) {
            const double v = self(x);
            return v / (v - 1.0);
          },
          p2_ / (p2_ - 1.0), p1_ / (p1_ - 1.0), std::move(dual_grad)};
}

ExponentField ExponentField::constant(double p) {
  return {[p](const Point&) { return p; }, p, p, [](const Point& x) { return Point(Point::Zero(x.size())); }};
}

ExponentField ExponentField::affine(double base, const Point& slope, const Box& domain) {
  if (slope.size() != domain.dim()) throw std::invalid_argument("affine exponent: dimension mismatch");
  // Linear function: extremes at box corners, per-axis choice.
  double lo = base;
  double hi = base;
  for (int k = 0; k < domain.dim(); ++k) {
    const double a = slope[k] * domain.lower[k];
    const double b = slope[k] * domain.upper[k];
    lo += std::min(a, b);
    hi += std::max(a, b);
  }
  return {[base, slope](const Point& x) { return base + slope.dot(x); }, lo, hi,
          [slope](const Point&) { return slope; }};
}

ExponentField ExponentField::radial(const Point& center, double base, double slope, const Box& domain) {
  if (center.size() != domain.dim()) throw std::invalid_argument("radial exponent: dimension mismatch");
  // Nearest and farthest distance from the center to the box.
  double near2 = 0.0;
  double far2 = 0.0;
  for (int k = 0; k < domain.dim(); ++k) {
    const double c = center[k];
    const double d_near = std::max({domain.lower[k] - c, 0.0, c - domain.upper[k]});
    const double d_far = std::max(std::abs(c - domain.lower[k]), std::abs(c - domain.upper[k]));
    near2 += d_near * d_near;
    far2 += d_far * d_far;
  }
  const double a = base + slope * std::sqrt(near2);
  const double b = base + slope * std::sqrt(far2);
  return {[center, base, slope](const Point& x) { return base + slope * (x - center).norm(); },
          std::min(a, b), std::max(a, b),
          [center, slope](const Point& x) {
            const Point d = x - center;
            const double r = d.norm();
            return r > 0.0 ? Point(slope * d / r) : Point(Point::Zero(x.size()));
          }};
}

ExponentField ExponentField::piecewise(int axis, double split, double left, double right) {
  if (axis < 0) throw std::invalid_argument("piecewise exponent: negative axis");
  return {[axis, split, left, right](const Point& x) {
            if (axis >= x.size()) throw std::invalid_argument("piecewise exponent: axis out of range");
            return x[axis] < split ? left : right;
          },
          std::min(left, right), std::max(left, right),
          [](const Point& x) { return Point(Point::Zero(x.size())); }};
}

ExponentField ExponentField::from_grid(const GridFunction& values) {
  const double lo = values.min_value();
  const double hi = values.max_value();
  return {[values](const Point& x) { return values.interpolate(x); }, lo, hi};
}

// ---------------------------------------------------------------------------

ExponentBand band(const ExponentField& field, const Ball& ball, const Grid& grid) {
  const auto nodes = grid.nodes_in(ball);
  if (nodes.empty()) {
    throw std::invalid_argument("band: the ball contains no lattice node");
  }
  ExponentBand out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (Index i : nodes) {
    const double p = field(grid.node(i));
    out.p_minus = std::min(out.p_minus, p);
    out.p_plus = std::max(out.p_plus, p);
  }
  return out;
}

ExponentBand band(const ExponentField& field, const Ball& ball, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("band: resolution must be positive");
  const int half = std::max(1, static_cast<int>(std::ceil(ball.radius / h - 1e-12)));
  const Grid grid = Grid::over(ball.bounding_box(), 2 * half);
  return band(field, ball, grid);
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kMaxSeparation = 0.5;

Grid dyadic_lattice(const Box& domain, int level) {
  return Grid::over(domain, 1 << level);
}

std::int64_t lattice_nodes(int dim, int level) {
  const double n = std::pow((1 << level) + 1.0, dim);
  return n > 9e15 ? std::int64_t{9'000'000'000'000'000} : static_cast<std::int64_t>(n);
}

// Finest level whose complete pair count fits in the budget (-1 if none).
int pair_level(int dim, std::int64_t budget) {
  int level = -1;
  for (int l = 0; l < 30; ++l) {
    const auto n = lattice_nodes(dim, l);
    if (n > 3'000'000'000LL) break;
    if (n * (n - 1) / 2 > budget) break;
    level = l;
  }
  return level;
}

double pair_value(double px, double py, double sep) {
  return std::abs(px - py) * std::abs(std::log(sep));
}

}  // namespace

ScaleProbe log_holder_scale_probe(const Box& domain, std::int64_t pair_budget, double radius) {
  const int dim = domain.dim();
  const int base = std::max(pair_level(dim, pair_budget / 2), 1);
  int fine = base + 1;
  while (fine > 1 && lattice_nodes(dim, fine) > 200'000) --fine;
  ScaleProbe probe{dyadic_lattice(domain, fine), {}, {}};
  const Grid centers = dyadic_lattice(domain, std::max(base - 1, 0));
  for (Index i = 0; i < centers.node_count(); ++i) probe.centers.push_back(centers.node(i));
  const double hmin = probe.lattice.spacing().maxCoeff();
  for (double r = radius; r >= 2.0 * hmin; r *= 0.5) probe.radii.push_back(r);
  return probe;
}

LogHolderCertificate log_holder_estimate(const ExponentField& field, const Box& domain,
                                         std::int64_t pair_budget, const LogHolderOptions& opts) {
  if (pair_budget < 1) throw std::invalid_argument("log_holder_estimate: pair_budget must be >= 1");
  if (!(opts.radius > 0.0)) throw std::invalid_argument("log_holder_estimate: radius must be positive");
  const int dim = domain.dim();
  LogHolderCertificate cert;
  cert.radius = opts.radius;

  // Complete pairs on a dyadic lattice.
  const std::int64_t lattice_budget = pair_budget / 2;
  const int level = pair_level(dim, lattice_budget);
  if (level >= 0) {
    const Grid lattice = dyadic_lattice(domain, level);
    const Index n = lattice.node_count();
    std::vector<Point> pts(static_cast<std::size_t>(n));
    std::vector<double> ps(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      pts[static_cast<std::size_t>(i)] = lattice.node(i);
      ps[static_cast<std::size_t>(i)] = field(pts[static_cast<std::size_t>(i)]);
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const double sep = (pts[i] - pts[j]).norm();
        ++cert.sample_count;
        if (sep > kMaxSeparation || sep <= 0.0) continue;
        cert.c_r = std::max(cert.c_r, pair_value(ps[i], ps[j], sep));
      }
    }
  }

  // Stratified random pairs: stratum s covers separations 0.5 * [10^-(s+1), 10^-s).
  const std::int64_t random_pairs = pair_budget - lattice_budget;
  constexpr int kStrata = 12;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::int64_t i = 0; i < random_pairs; ++i) {
    Point x(dim);
    for (int k = 0; k < dim; ++k) x[k] = domain.lower[k] + unit(rng) * (domain.upper[k] - domain.lower[k]);
    Point dir(dim);
    for (int k = 0; k < dim; ++k) dir[k] = gauss(rng);
    const double len = dir.norm();
    if (len == 0.0) dir = Point::Unit(dim, 0); else dir /= len;
    const int stratum = static_cast<int>(i % kStrata);
    const double sep = kMaxSeparation * std::pow(10.0, -(stratum + unit(rng)));
    Point y = x + sep * dir;
    if (!domain.contains(y)) y = x - sep * dir;
    if (!domain.contains(y)) y = y.cwiseMax(domain.lower).cwiseMin(domain.upper);
    const double actual = (x - y).norm();
    ++cert.sample_count;
    if (actual <= 0.0 || actual > kMaxSeparation) continue;
    cert.c_r = std::max(cert.c_r, pair_value(field(x), field(y), actual));
  }

  // Scale bound r^-(p+ - p-) over sampled balls.
  const ScaleProbe probe = log_holder_scale_probe(domain, pair_budget, opts.radius);
  for (const Point& c : probe.centers) {
    for (double r : probe.radii) {
      const auto nodes = probe.lattice.nodes_in(Ball(c, r));
      if (nodes.empty()) continue;
      const ExponentBand b = band(field, Ball(c, r), probe.lattice);
      cert.k_r = std::max(cert.k_r, std::pow(r, -(b.p_plus - b.p_minus)));
    }
  }
  return cert;
}

}  // namespace pxlap

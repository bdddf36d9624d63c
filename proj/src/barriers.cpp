#include "pxlap/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pxlap {

void BarrierParams::validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("BarrierParams: delta must be > 0");
  if (!(mu > 0.0)) throw std::invalid_argument("BarrierParams: mu must be > 0");
  if (!(a_level >= 0.0)) throw std::invalid_argument("BarrierParams: a_level must be >= 0");
  if (x0.size() == 0) throw std::invalid_argument("BarrierParams: x0 is empty");
}

ClosedForm barrier(const BarrierParams& params) {
  params.validate();
  const Point x0 = params.x0;
  const double mu = params.mu;
  const double d2 = params.delta * params.delta;
  const double floor = std::exp(-mu);
  const double scale = params.a_level / (std::exp(-0.25 * mu) - floor);
  const auto gauss = [=](const Point& x) { return std::exp(-mu * (x - x0).squaredNorm() / d2); };
  ClosedForm w;
  w.value = [=](const Point& x) { return scale * (gauss(x) - floor); };
  w.gradient = [=](const Point& x) -> Point { return scale * gauss(x) * (-2.0 * mu / d2) * (x - x0); };
  w.hessian = [=](const Point& x) -> Eigen::MatrixXd {
    const Point y = x - x0;
    Eigen::MatrixXd h = (4.0 * mu * mu / (d2 * d2)) * (y * y.transpose());
    h.diagonal().array() -= 2.0 * mu / d2;
    return scale * gauss(x) * h;
  };
  return w;
}

BarrierValue barrier_eval(const BarrierParams& params, const Point& x) {
  const ClosedForm w = barrier(params);
  return {w.value(x), w.gradient(x)};
}

std::vector<Point> annulus_samples(const Point& x0, double r_inner, double r_outer, int resolution) {
  if (!(r_inner > 0.0) || !(r_outer > r_inner)) {
    throw std::invalid_argument("annulus_samples: need 0 < r_inner < r_outer");
  }
  if (resolution < 1) throw std::invalid_argument("annulus_samples: resolution must be >= 1");
  const Grid lattice = Grid::over(Box(x0.array() - r_outer, x0.array() + r_outer), 2 * resolution);
  std::vector<Point> out;
  for (Index i = 0; i < lattice.node_count(); ++i) {
    const Point x = lattice.node(i);
    const Point y = x - x0;
    const double r = y.norm();
    if (r < r_inner || r > r_outer) continue;
    out.push_back(x);
    out.push_back(x0 + (r_inner / r) * y);
    out.push_back(x0 + (r_outer / r) * y);
  }
  return out;
}

BarrierScan barrier_subsolution_scan(const BarrierParams& params, const ExponentField& field, int resolution,
                                     double reg_eps) {
  const ClosedForm w = barrier(params);
  BarrierScan scan{params, std::numeric_limits<double>::infinity(), params.x0, 0};
  for (const Point& x : annulus_samples(params.x0, 0.5 * params.delta, params.delta, resolution)) {
    const double v = p_laplacian_pointwise(w, field, x, reg_eps);
    ++scan.samples;
    if (v < scan.min_operator_value) {
      scan.min_operator_value = v;
      scan.argmin = x;
    }
  }
  return scan;
}

LogBarrierBound log_barrier_bound(double m, double mu, const ExponentField& field, int dim, double r2, double r1,
                                  int resolution) {
  if (!(r2 > 0.0)) throw std::invalid_argument("log_barrier_bound: inner radius r2 must be > 0");
  if (!(r1 > r2)) throw std::invalid_argument("log_barrier_bound: need r1 > r2");
  if (!(m > 0.0)) throw std::invalid_argument("log_barrier_bound: M must be > 0");
  if (!(mu > 0.0)) throw std::invalid_argument("log_barrier_bound: mu must be > 0");
  if (dim < 1) throw std::invalid_argument("log_barrier_bound: dimension must be >= 1");
  ClosedForm w;
  w.value = [=](const Point& x) { return m * std::exp(-mu * x.squaredNorm()); };
  w.gradient = [=](const Point& x) -> Point { return -2.0 * mu * m * std::exp(-mu * x.squaredNorm()) * x; };
  w.hessian = [=](const Point& x) -> Eigen::MatrixXd {
    Eigen::MatrixXd h = 4.0 * mu * mu * (x * x.transpose());
    h.diagonal().array() -= 2.0 * mu;
    return m * std::exp(-mu * x.squaredNorm()) * h;
  };
  LogBarrierBound res;
  res.mu = mu;
  res.abs_log_m = std::abs(std::log(m));
  res.lhs_min = std::numeric_limits<double>::infinity();
  for (const Point& x : annulus_samples(Point::Zero(dim), r2, r1, resolution)) {
    // |grad w|^{2-p} Delta_{p(x)} w is exactly the bracket.
    const double v = std::exp(mu * x.squaredNorm()) / (mu * m) * p_laplacian_bracket(w, field, x);
    res.grad_p_sup = std::max(res.grad_p_sup, field.gradient(x).norm());
    ++res.samples;
    if (v < res.lhs_min) {
      res.lhs_min = v;
      res.argmin = x;
    }
  }
  return res;
}

std::string to_string(MaxPrincipleClass c) {
  switch (c) {
    case MaxPrincipleClass::identically_zero: return "identically_zero";
    case MaxPrincipleClass::strictly_positive: return "strictly_positive";
    case MaxPrincipleClass::violation: return "violation";
  }
  return "?";
}

MaxPrincipleResult strong_max_principle_check(const GridFunction& u, double interior_margin, double zero_tol) {
  if (!(interior_margin >= 0.0)) throw std::invalid_argument("strong_max_principle_check: margin must be >= 0");
  const Grid& grid = u.grid();
  MaxPrincipleResult res{MaxPrincipleClass::violation, 0.0, u.values().cwiseAbs().maxCoeff(), zero_tol};
  if (res.zero_tol < 0.0) res.zero_tol = 1e-10 * res.max_abs;
  if (u.min_value() < -res.zero_tol) {
    throw std::domain_error("strong_max_principle_check: u < -zero_tol (nonnegativity hypothesis violated)");
  }
  if (res.max_abs <= res.zero_tol) {
    res.classification = MaxPrincipleClass::identically_zero;
    return res;
  }
  const Box box = grid.box();
  const Box shrunk(box.lower.array() + interior_margin, box.upper.array() - interior_margin);
  res.interior_min = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < grid.node_count(); ++i) {
    if (shrunk.contains(grid.node(i), 1e-12)) res.interior_min = std::min(res.interior_min, u[i]);
  }
  if (std::isinf(res.interior_min)) {
    throw std::invalid_argument("strong_max_principle_check: margin leaves no interior node");
  }
  res.classification =
      res.interior_min > res.zero_tol ? MaxPrincipleClass::strictly_positive : MaxPrincipleClass::violation;
  return res;
}

HopfResult hopf_slope(const GridFunction& u, const Point& y, const Point& nu, const std::vector<double>& steps,
                      double zero_tol) {
  if (steps.empty()) throw std::invalid_argument("hopf_slope: no steps");
  if (std::abs(nu.norm() - 1.0) > 1e-12) throw std::invalid_argument("hopf_slope: nu must be a unit vector");
  const Box box = u.grid().box();
  const double uy = u.interpolate(y);
  if (std::abs(uy) > zero_tol) {
    throw std::domain_error("hopf_slope: |u(y)| = " + std::to_string(std::abs(uy)) + " exceeds zero_tol");
  }
  HopfResult res;
  res.c0 = std::numeric_limits<double>::infinity();
  for (double h : steps) {
    if (!(h > 0.0)) throw std::invalid_argument("hopf_slope: steps must be > 0");
    const Point x = y + h * nu;
    if (!box.contains(x, 1e-12)) {
      throw std::out_of_range("hopf_slope: step h = " + std::to_string(h) + " leaves the domain");
    }
    const double slope = (u.interpolate(x) - uy) / h;
    res.steps.push_back(h);
    res.slopes.push_back(slope);
    res.c0 = std::min(res.c0, slope);
  }
  return res;
}

}  // namespace pxlap

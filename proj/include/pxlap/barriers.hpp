#pragma once

// Gaussian annulus barriers, their subsolution scans, and discrete strong
// maximum principle / Hopf probes.

#include "pxlap/exponent_field.hpp"
#include "pxlap/grid.hpp"
#include "pxlap/pde_solver.hpp"

#include <string>
#include <vector>

namespace pxlap {

/// w(x) = A (e^{-mu|x-x0|^2/delta^2} - e^{-mu}) / (e^{-mu/4} - e^{-mu}):
/// zero on |x - x0| = delta, A on |x - x0| = delta/2.
struct BarrierParams {
  Point x0;
  double delta = 1.0;
  double mu = 1.0;
  double a_level = 1.0;

  void validate() const;
};

/// Value, gradient and Hessian of the barrier in closed form.
ClosedForm barrier(const BarrierParams& params);

struct BarrierValue {
  double value;
  Point gradient;
};
BarrierValue barrier_eval(const BarrierParams& params, const Point& x);

/// Points of the closed annulus delta/2 <= |x - x0| <= delta: lattice points
/// with about `resolution` cells per delta, plus their radial projections onto
/// both spheres.
std::vector<Point> annulus_samples(const Point& x0, double r_inner, double r_outer, int resolution);

struct BarrierScan {
  BarrierParams params;
  double min_operator_value = 0.0;
  Point argmin;
  std::size_t samples = 0;
};
/// Minimum of Delta_{p(x)} w over annulus samples.
BarrierScan barrier_subsolution_scan(const BarrierParams& params, const ExponentField& field, int resolution,
                                     double reg_eps = 0.0);

struct LogBarrierBound {
  double lhs_min = 0.0;
  Point argmin;
  double mu = 0.0;
  double grad_p_sup = 0.0;  ///< max |grad p| over the samples
  double abs_log_m = 0.0;
  std::size_t samples = 0;
};
/// min over r2 <= |x| <= r1 of mu^{-1} e^{mu|x|^2} M^{-1} |grad w|^{2-p} Delta_{p(x)} w
/// for w = M e^{-mu|x|^2} in R^dim.
LogBarrierBound log_barrier_bound(double m, double mu, const ExponentField& field, int dim, double r2, double r1,
                                  int resolution);

enum class MaxPrincipleClass { identically_zero, strictly_positive, violation };
std::string to_string(MaxPrincipleClass c);

struct MaxPrincipleResult {
  MaxPrincipleClass classification;
  double interior_min = 0.0;
  double max_abs = 0.0;
  double zero_tol = 0.0;
};
/// zero_tol < 0 selects the default 1e-10 * max|u|.
/// Throws when u < -zero_tol somewhere.
MaxPrincipleResult strong_max_principle_check(const GridFunction& u, double interior_margin, double zero_tol = -1.0);

struct HopfResult {
  std::vector<double> steps;
  std::vector<double> slopes;
  double c0 = 0.0;  ///< min over slopes
};
/// (u(y + h nu) - u(y)) / h for each h. Throws if |u(y)| > zero_tol or a step leaves the grid box.
HopfResult hopf_slope(const GridFunction& u, const Point& y, const Point& nu, const std::vector<double>& steps,
                      double zero_tol = 1e-10);

}  // namespace pxlap

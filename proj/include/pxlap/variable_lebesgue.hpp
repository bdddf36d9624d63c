#pragma once

// Modulars, Luxemburg and Sobolev norms in L^{p(.)}, classical L^q norms over
// regions, and the ball averages phi(u, t, B) = (mean_B |u|^t)^(1/t).

#include "pxlap/exponent_field.hpp"
#include "pxlap/grid.hpp"

#include <stdexcept>

namespace pxlap {

struct NormConfig {
  double bisection_tol = 1e-12;  ///< relative width of the final bracket
  int max_iter = 200;            ///< max bracket doublings/halvings

  void validate() const;
};

/// Raised when the bracketing phase of the Luxemburg search does not cross 1.
class BracketError : public std::runtime_error {
 public:
  BracketError(const std::string& what, double lower, double upper)
      : std::runtime_error(what), lower_(lower), upper_(upper) {}
  [[nodiscard]] double lower() const { return lower_; }
  [[nodiscard]] double upper() const { return upper_; }

 private:
  double lower_;
  double upper_;
};

/// Quadrature samples of |value|^exponent: the input to every modular.
struct WeightedSamples {
  Eigen::VectorXd values;
  Eigen::VectorXd exponents;
  Eigen::VectorXd weights;
};

/// Midpoint-rule samples of u over the whole grid: cell-averaged values,
/// p at the cell centers, cell volumes.
WeightedSamples cell_samples(const GridFunction& u, const ExponentField& field);
/// Samples of |grad u|: one per cell corner gradient, weight = cell volume / 2^N.
WeightedSamples gradient_samples(const GridFunction& u, const ExponentField& field);

double modular(const WeightedSamples& s, double lambda);
double luxemburg_norm(const WeightedSamples& s, const NormConfig& cfg = {});

/// int_Omega (|u|/lambda)^{p(x)} dx.
double modular(const GridFunction& u, const ExponentField& field, double lambda);
/// inf { lambda > 0 : modular(u, field, lambda) <= 1 }.
double luxemburg_norm(const GridFunction& u, const ExponentField& field, const NormConfig& cfg = {});
/// ||u||_{p(.)} + ||grad u||_{p(.)}.
double sobolev_norm(const GridFunction& u, const ExponentField& field, const NormConfig& cfg = {});

/// Classical (int_region |u|^q)^(1/q); q = inf gives the max over nodes in the region.
double lq_norm(const GridFunction& u, double q, const Region& region);

/// (mean over nodes in the ball of |u|^t)^(1/t), t > 0.
double lt_average(const GridFunction& u, double t, const Ball& ball);

}  // namespace pxlap

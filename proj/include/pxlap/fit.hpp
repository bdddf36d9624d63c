#pragma once

#include <Eigen/Core>

namespace pxlap {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

/// Ordinary least squares y ~ slope * x + intercept. Needs >= 2 distinct x.
LinearFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace pxlap

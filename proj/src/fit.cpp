#include "pxlap/fit.hpp"

#include <Eigen/QR>

#include <cmath>
#include <stdexcept>

namespace pxlap {

LinearFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  if (x.size() < 2 || x.maxCoeff() == x.minCoeff()) {
    throw std::invalid_argument("fit_line: need at least two distinct abscissae");
  }
  Eigen::MatrixXd a(x.size(), 2);
  a.col(0) = x;
  a.col(1).setOnes();
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd res = a * coef - y;
  return {coef[0], coef[1], std::sqrt(res.squaredNorm() / static_cast<double>(x.size()))};
}

}  // namespace pxlap

#include "pxlap/variable_lebesgue.hpp"

#include <cmath>
#include <limits>

namespace pxlap {

void NormConfig::validate() const {
  if (!(bisection_tol > 0.0)) throw std::invalid_argument("NormConfig: bisection_tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("NormConfig: max_iter must be >= 1");
}

WeightedSamples cell_samples(const GridFunction& u, const ExponentField& field) {
  const Grid& g = u.grid();
  WeightedSamples s;
  s.values = u.cell_averages();
  s.exponents.resize(g.cell_count());
  for (Index c = 0; c < g.cell_count(); ++c) s.exponents[c] = field(g.cell_center(c));
  s.weights = Eigen::VectorXd::Constant(g.cell_count(), g.cell_volume());
  return s;
}

WeightedSamples gradient_samples(const GridFunction& u, const ExponentField& field) {
  const Grid& g = u.grid();
  const unsigned corners = g.corner_count();
  const Index n = g.cell_count() * corners;
  WeightedSamples s;
  s.values.resize(n);
  s.exponents.resize(n);
  s.weights = Eigen::VectorXd::Constant(n, g.cell_volume() / corners);
  for (Index c = 0; c < g.cell_count(); ++c) {
    const double p = field(g.cell_center(c));
    for (unsigned m = 0; m < corners; ++m) {
      s.values[c * corners + m] = u.corner_gradient(c, m).norm();
      s.exponents[c * corners + m] = p;
    }
  }
  return s;
}

double modular(const WeightedSamples& s, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("modular: lambda must be positive");
  double acc = 0.0;
  for (Index i = 0; i < s.values.size(); ++i) {
    const double a = std::abs(s.values[i]);
    if (a == 0.0) continue;
    acc += s.weights[i] * std::pow(a / lambda, s.exponents[i]);
  }
  return acc;
}

double luxemburg_norm(const WeightedSamples& s, const NormConfig& cfg) {
  cfg.validate();
  if (!s.values.allFinite()) throw std::invalid_argument("luxemburg_norm: non-finite values");
  if ((s.values.array() == 0.0).all() || (s.weights.array() == 0.0).all()) return 0.0;

  // Bracket [lo, hi] with modular(lo) > 1 >= modular(hi).
  double lo = 1.0;
  double hi = 1.0;
  if (modular(s, 1.0) > 1.0) {
    int it = 0;
    while (modular(s, hi) > 1.0) {
      lo = hi;
      hi *= 2.0;
      if (++it > cfg.max_iter) throw BracketError("luxemburg_norm: no upper bracket", lo, hi);
    }
  } else {
    int it = 0;
    while (modular(s, lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (++it > cfg.max_iter) throw BracketError("luxemburg_norm: no lower bracket", lo, hi);
    }
  }
  // Bisection; the modular is strictly decreasing in lambda where positive.
  for (int it = 0; it < 400 && (hi - lo) > cfg.bisection_tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (modular(s, mid) > 1.0) lo = mid; else hi = mid;
  }
  return hi;
}

double modular(const GridFunction& u, const ExponentField& field, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("modular: lambda must be positive");
  return modular(cell_samples(u, field), lambda);
}

double luxemburg_norm(const GridFunction& u, const ExponentField& field, const NormConfig& cfg) {
  return luxemburg_norm(cell_samples(u, field), cfg);
}

double sobolev_norm(const GridFunction& u, const ExponentField& field, const NormConfig& cfg) {
  return luxemburg_norm(cell_samples(u, field), cfg) + luxemburg_norm(gradient_samples(u, field), cfg);
}

double lq_norm(const GridFunction& u, double q, const Region& region) {
  if (!(q > 0.0)) throw std::invalid_argument("lq_norm: exponent must be positive");
  const Grid& g = u.grid();
  if (std::isinf(q)) {
    const auto nodes = g.nodes_in(region);
    if (nodes.empty()) throw std::invalid_argument("lq_norm: region contains no node");
    double m = 0.0;
    for (Index i : nodes) m = std::max(m, std::abs(u[i]));
    return m;
  }
  const auto quad = cell_quadrature(g, region);
  if (quad.empty()) throw std::invalid_argument("lq_norm: region misses the grid");
  const Eigen::VectorXd avg = u.cell_averages();
  double acc = 0.0;
  for (const auto& s : quad) acc += s.weight * std::pow(std::abs(avg[s.cell]), q);
  return std::pow(acc, 1.0 / q);
}

double lt_average(const GridFunction& u, double t, const Ball& ball) {
  if (!(t > 0.0)) throw std::invalid_argument("lt_average: t must be positive");
  const auto nodes = u.grid().nodes_in(ball);
  if (nodes.empty()) throw std::invalid_argument("lt_average: ball contains no sample");
  double acc = 0.0;
  for (Index i : nodes) acc += std::pow(std::abs(u[i]), t);
  return std::pow(acc / static_cast<double>(nodes.size()), 1.0 / t);
}

}  // namespace pxlap

#pragma once

#include "pxlap/grid.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace pxlap {

/// Variable exponent p(x) with global bounds 1 < p1 <= p(x) <= p2 < inf.
///
/// Every evaluation is checked against the bounds, so a field that leaves
/// [p1, p2] on some sample raises instead of silently producing a bad norm.
/// The gradient is analytic when supplied, otherwise central differences.
class ExponentField {
 public:
  using Evaluator = std::function<double(const Point&)>;
  using GradientEvaluator = std::function<Point(const Point&)>;

  ExponentField(Evaluator p, double p1, double p2, GradientEvaluator gradient = {});

  static ExponentField constant(double p);
  /// p(x) = base + slope . x, bounds taken over `domain`.
  static ExponentField affine(double base, const Point& slope, const Box& domain);
  /// p(x) = base + slope * |x - center|, bounds taken over `domain`.
  static ExponentField radial(const Point& center, double base, double slope, const Box& domain);
  /// p = left where x[axis] < split, right otherwise.
  static ExponentField piecewise(int axis, double split, double left, double right);
  /// Multilinear interpolation of nodal exponent values.
  static ExponentField from_grid(const GridFunction& values);

  double operator()(const Point& x) const;
  [[nodiscard]] double p1() const { return p1_; }
  [[nodiscard]] double p2() const { return p2_; }
  [[nodiscard]] bool has_gradient() const { return static_cast<bool>(gradient_); }
  [[nodiscard]] Point gradient(const Point& x, double fd_step = 1e-6) const;

  /// p'(x) = p(x) / (p(x) - 1).
  [[nodiscard]] ExponentField dual() const;

 private:
  Evaluator p_;
  GradientEvaluator gradient_;
  double p1_;
  double p2_;
};

struct ExponentBand {
  double p_minus;
  double p_plus;
};

/// Min and max of p over the lattice nodes inside the ball.
/// Throws when no node of `grid` falls in the ball.
ExponentBand band(const ExponentField& field, const Ball& ball, const Grid& grid);
/// Same, on a lattice of spacing <= h spanning the ball's bounding box, with
/// nodes on the extreme points of the ball and on its center.
ExponentBand band(const ExponentField& field, const Ball& ball, double h);

struct LogHolderCertificate {
  double c_r = 0.0;           ///< max |p(x)-p(y)| |log|x-y|| over sampled pairs, |x-y| <= 1/2
  double k_r = 1.0;           ///< max r^-(p+^r - p-^r) over sampled balls with r <= radius
  double radius = 0.0;        ///< R
  std::int64_t sample_count = 0;  ///< number of pairs scanned
};

struct LogHolderOptions {
  double radius = 0.5;  ///< R; ball radii for K_R are R, R/2, R/4, ...
  std::uint64_t seed = 20240601;
};

/// Empirical log-Holder constants of `field` on `domain`.
///
/// Pairs: half the budget goes to all pairs of the finest dyadic lattice that
/// fits, the other half to a fixed-seed stream of random pairs stratified by
/// log-separation. Both parts grow monotonically with the budget, so doubling
/// the budget never lowers c_r.
LogHolderCertificate log_holder_estimate(const ExponentField& field, const Box& domain,
                                         std::int64_t pair_budget, const LogHolderOptions& opts = {});

/// The ball radii and centers used for k_r (exposed so callers can re-check the bound).
struct ScaleProbe {
  Grid lattice;
  std::vector<Point> centers;
  std::vector<double> radii;
};
ScaleProbe log_holder_scale_probe(const Box& domain, std::int64_t pair_budget, double radius);

}  // namespace pxlap

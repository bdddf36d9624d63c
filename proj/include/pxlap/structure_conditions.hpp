#pragma once

// Structure conditions for div A(x, u, grad u) = B(x, u, grad u):
//
//   ellipticity             A.xi >= alpha |xi|^p - C0 |s|^p - g0
//   flux growth             |A|  <= g1 + C1 |s|^{p-1} + K1 |xi|^{p-1}
//   source growth           |B|  <= f  + C2 |s|^{p-1} + K2 |xi|^{p-1}
//   source growth, gradient |B|  <= f  + C2 |s|^{p-1} + K2 |xi|^{p-1} + b |xi|^p
//
// for |s| <= M0, checked sample by sample.

#include "pxlap/exponent_field.hpp"
#include "pxlap/grid.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace pxlap {

inline constexpr double kInfiniteExponent = std::numeric_limits<double>::infinity();

/// Coefficient functions and constants of the structure conditions for one M0.
struct StructureBounds {
  double alpha = 1.0;
  GridFunction g0, g1, f_src, c0, c1, c2, k1, k2;
  double b = 0.0;
  double m0 = 1.0;
  double q0 = kInfiniteExponent;
  double q1 = kInfiniteExponent;
  double q2 = kInfiniteExponent;
  double t2 = kInfiniteExponent;

  /// All coefficient functions zero on `grid`; K1 = 1 so the p-Laplacian flux fits the flux growth bound.
  static StructureBounds zeros(const Grid& grid);

  /// Checks signs and q0, q1 > max{1, N/(p1-1)}, q2, t2 > max{1, N/p1}.
  void validate(const ExponentField& field) const;
};

struct FluxPair {
  std::function<Point(const Point& x, double s, const Point& xi)> a;
  std::function<double(const Point& x, double s, const Point& xi)> b;

  /// A = |xi|^{p-2} xi, B = 0.
  static FluxPair p_laplacian(const ExponentField& field);
  /// A = scale * |xi|^{p-2} xi, B = 0.
  static FluxPair scaled(const ExponentField& field, double scale);
  static FluxPair zero();
  /// Replace B by a user-supplied source.
  [[nodiscard]] FluxPair with_source(std::function<double(const Point&, double, const Point&)> source) const;
};

struct StructureSample {
  Point x;
  double s;
  Point xi;
};

/// Grid nodes x log-spaced s-ladder in [0, M0] (plus 0) x xi on log-spaced
/// spheres with radii 1e-3..1e3 (plus xi = 0), directions from a fixed seed.
struct SampleLattice {
  int s_levels = 5;
  int xi_radii = 7;
  int directions = 4;
  std::uint64_t seed = 7;
};
std::vector<StructureSample> structure_samples(const Grid& grid, double m0, const SampleLattice& lattice = {});

enum class Condition { ellipticity, flux_growth, source_growth, source_growth_gradient };
std::string condition_name(Condition c);

struct Violation {
  std::size_t sample;
  Condition condition;
  double lhs;
  double rhs;
  double slack;  ///< signed margin; negative means the inequality fails
};

struct ViolationReport {
  std::size_t samples_checked = 0;
  std::vector<Violation> violations;
  double worst_slack = std::numeric_limits<double>::infinity();

  [[nodiscard]] bool empty() const { return violations.empty(); }
  [[nodiscard]] std::size_t count(Condition c) const;
};

/// Relative noise floor: a sample violates when slack < -noise * max(1, |lhs|, |rhs|).
inline constexpr double kSlackNoise = 1e-12;

ViolationReport check_conditions(const FluxPair& pair, const StructureBounds& bounds, const ExponentField& field,
                                 const std::vector<StructureSample>& samples);
/// Ellipticity, flux growth and source growth with the gradient term.
ViolationReport check_condition_3prime(const FluxPair& pair, const StructureBounds& bounds,
                                       const ExponentField& field, const std::vector<StructureSample>& samples);
/// Only ellipticity, with the ellipticity constant given explicitly.
ViolationReport check_ellipticity(const FluxPair& pair, const StructureBounds& bounds, double alpha,
                                  const ExponentField& field, const std::vector<StructureSample>& samples);

/// mu = sum over (f, q2, 1 - N/q2), (g0, q0, -N/q0), (g1, q1, -N/q1) of
///      [R^{exp} ||h||_{L^q(B_4R)}]^{1/(p_-^{4R} - 1)}.
double mu_general(const StructureBounds& bounds, const Ball& ball, const ExponentField& field);

enum class TransformDirection { sub, super };

/// A scaled by exp((b/alpha)(s - M0)) (sub) or exp((b/alpha)(M0 - s)) (super); B unchanged.
FluxPair exponential_transform(const FluxPair& pair, const StructureBounds& bounds, TransformDirection direction);

/// Constants satisfied by the transformed flux when 0 <= s <= M0: sub lowers
/// alpha to alpha e^{-(b/alpha)M0}; super scales C0, g0, g1, C1, K1 by e^{(b/alpha)M0}.
StructureBounds transformed_bounds(const StructureBounds& bounds, TransformDirection direction);

}  // namespace pxlap

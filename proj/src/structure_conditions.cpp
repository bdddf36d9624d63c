#include "pxlap/structure_conditions.hpp"

#include "pxlap/variable_lebesgue.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace pxlap {

StructureBounds StructureBounds::zeros(const Grid& grid) {
  const GridFunction z = GridFunction::constant(grid, 0.0);
  return StructureBounds{1.0, z, z, z, z, z, z, GridFunction::constant(grid, 1.0), z};
}

void StructureBounds::validate(const ExponentField& field) const {
  if (!(alpha > 0.0)) throw std::invalid_argument("StructureBounds: alpha must be > 0");
  if (!(b >= 0.0)) throw std::invalid_argument("StructureBounds: b must be >= 0");
  if (!(m0 >= 0.0)) throw std::invalid_argument("StructureBounds: M0 must be >= 0");
  const Grid& grid = g0.grid();
  for (const GridFunction* fn : {&g0, &g1, &f_src, &c0, &c1, &c2, &k1, &k2}) {
    if (!fn->grid().same_lattice(grid)) throw std::invalid_argument("StructureBounds: coefficient lattice mismatch");
    if (fn->min_value() < 0.0) throw std::invalid_argument("StructureBounds: coefficient functions must be >= 0");
  }
  const double n = grid.dim();
  const double p1 = field.p1();
  const double lower01 = std::max(1.0, n / (p1 - 1.0));
  const double lower2 = std::max(1.0, n / p1);
  auto check = [](double q, double bound, const char* name, const char* rule) {
    if (!(q > bound)) {
      throw std::invalid_argument(std::string("StructureBounds: ") + name + " = " + std::to_string(q) +
                                  " violates " + rule + " = " + std::to_string(bound));
    }
  };
  check(q0, lower01, "q0", "q0 > max{1, N/(p1-1)}");
  check(q1, lower01, "q1", "q1 > max{1, N/(p1-1)}");
  check(q2, lower2, "q2", "q2 > max{1, N/p1}");
  check(t2, lower2, "t2", "t2 > max{1, N/p1}");
}

// ---------------------------------------------------------------------------

FluxPair FluxPair::p_laplacian(const ExponentField& field) { return scaled(field, 1.0); }

FluxPair FluxPair::scaled(const ExponentField& field, double scale) {
  return {[field, scale](const Point& x, double, const Point& xi) -> Point {
            const double r = xi.norm();
            if (r == 0.0) return Point::Zero(xi.size());
            return scale * std::pow(r, field(x) - 2.0) * xi;
          },
          [](const Point&, double, const Point&) { return 0.0; }};
}

FluxPair FluxPair::zero() {
  return {[](const Point&, double, const Point& xi) -> Point { return Point::Zero(xi.size()); },
          [](const Point&, double, const Point&) { return 0.0; }};
}

FluxPair FluxPair::with_source(std::function<double(const Point&, double, const Point&)> source) const {
  return {a, std::move(source)};
}

// ---------------------------------------------------------------------------

std::vector<StructureSample> structure_samples(const Grid& grid, double m0, const SampleLattice& lattice) {
  if (!(m0 >= 0.0)) throw std::invalid_argument("structure_samples: M0 must be >= 0");
  const int n = grid.dim();
  std::vector<double> s_ladder{0.0};
  if (m0 > 0.0) {
    for (int j = 0; j < lattice.s_levels; ++j) {
      const double t = lattice.s_levels == 1 ? 1.0 : static_cast<double>(j) / (lattice.s_levels - 1);
      s_ladder.push_back(j + 1 == lattice.s_levels ? m0 : m0 * std::pow(10.0, -3.0 * (1.0 - t)));
    }
  }
  std::vector<Point> xis{Point::Zero(n)};
  std::mt19937_64 rng(lattice.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Point> dirs;
  dirs.push_back(Point::Unit(n, 0));
  while (static_cast<int>(dirs.size()) < lattice.directions) {
    Point d(n);
    for (int k = 0; k < n; ++k) d[k] = gauss(rng);
    if (d.norm() > 1e-12) dirs.push_back(d / d.norm());
  }
  for (int j = 0; j < lattice.xi_radii; ++j) {
    const double t = lattice.xi_radii == 1 ? 0.5 : static_cast<double>(j) / (lattice.xi_radii - 1);
    const double r = std::pow(10.0, -3.0 + 6.0 * t);
    for (const Point& d : dirs) xis.push_back(r * d);
  }
  std::vector<StructureSample> out;
  out.reserve(static_cast<std::size_t>(grid.node_count()) * s_ladder.size() * xis.size());
  for (Index i = 0; i < grid.node_count(); ++i) {
    const Point x = grid.node(i);
    for (double s : s_ladder) {
      for (const Point& xi : xis) out.push_back({x, s, xi});
    }
  }
  return out;
}

std::string condition_name(Condition c) {
  switch (c) {
    case Condition::ellipticity: return "ellipticity";
    case Condition::flux_growth: return "flux_growth";
    case Condition::source_growth: return "source_growth";
    case Condition::source_growth_gradient: return "source_growth_gradient";
  }
  return "?";
}

std::size_t ViolationReport::count(Condition c) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [c](const Violation& v) { return v.condition == c; }));
}

namespace {

struct Which {
  bool ellipticity = true;
  bool flux = true;
  bool source = true;
  bool gradient_term = false;
};

void record(ViolationReport& rep, std::size_t idx, Condition c, double lhs, double rhs, double slack) {
  rep.worst_slack = std::min(rep.worst_slack, slack);
  if (slack < -kSlackNoise * std::max({1.0, std::abs(lhs), std::abs(rhs)})) {
    rep.violations.push_back({idx, c, lhs, rhs, slack});
  }
}

ViolationReport run_checks(const FluxPair& pair, const StructureBounds& bounds, double alpha,
                           const ExponentField& field, const std::vector<StructureSample>& samples, Which which) {
  if (!(alpha > 0.0)) throw std::invalid_argument("structure check: alpha must be > 0");
  ViolationReport rep;
  for (std::size_t idx = 0; idx < samples.size(); ++idx) {
    const auto& [x, s, xi] = samples[idx];
    if (std::abs(s) > bounds.m0 * (1.0 + 1e-12)) {
      throw std::invalid_argument("structure check: sample " + std::to_string(idx) + " has |s| = " +
                                  std::to_string(std::abs(s)) + " > M0 = " + std::to_string(bounds.m0));
    }
    const double p = field(x);
    const double r = xi.norm();
    const double as = std::abs(s);
    const double rp = std::pow(r, p);
    const double rp1 = std::pow(r, p - 1.0);
    const double sp = std::pow(as, p);
    const double sp1 = std::pow(as, p - 1.0);
    if (which.ellipticity || which.flux) {
      const Point a = pair.a(x, s, xi);
      if (which.ellipticity) {
        const double lhs = a.dot(xi);
        const double rhs = alpha * rp - bounds.c0.interpolate(x) * sp - bounds.g0.interpolate(x);
        record(rep, idx, Condition::ellipticity, lhs, rhs, lhs - rhs);
      }
      if (which.flux) {
        const double lhs = a.norm();
        const double rhs = bounds.g1.interpolate(x) + bounds.c1.interpolate(x) * sp1 + bounds.k1.interpolate(x) * rp1;
        record(rep, idx, Condition::flux_growth, lhs, rhs, rhs - lhs);
      }
    }
    if (which.source) {
      const double lhs = std::abs(pair.b(x, s, xi));
      double rhs = bounds.f_src.interpolate(x) + bounds.c2.interpolate(x) * sp1 + bounds.k2.interpolate(x) * rp1;
      Condition c = Condition::source_growth;
      if (which.gradient_term) {
        rhs += bounds.b * rp;
        c = Condition::source_growth_gradient;
      }
      record(rep, idx, c, lhs, rhs, rhs - lhs);
    }
    ++rep.samples_checked;
  }
  return rep;
}

}  // namespace

ViolationReport check_conditions(const FluxPair& pair, const StructureBounds& bounds, const ExponentField& field,
                                 const std::vector<StructureSample>& samples) {
  return run_checks(pair, bounds, bounds.alpha, field, samples, Which{});
}

ViolationReport check_condition_3prime(const FluxPair& pair, const StructureBounds& bounds,
                                       const ExponentField& field, const std::vector<StructureSample>& samples) {
  return run_checks(pair, bounds, bounds.alpha, field, samples, Which{true, true, true, true});
}

ViolationReport check_ellipticity(const FluxPair& pair, const StructureBounds& bounds, double alpha,
                                  const ExponentField& field, const std::vector<StructureSample>& samples) {
  return run_checks(pair, bounds, alpha, field, samples, Which{true, false, false, false});
}

// ---------------------------------------------------------------------------

double mu_general(const StructureBounds& bounds, const Ball& ball, const ExponentField& field) {
  const Grid& grid = bounds.f_src.grid();
  if (ball.radius > 1.0) throw std::invalid_argument("mu_general: R must be <= 1");
  const Ball outer = ball.dilated(4.0);
  if (!inside(outer, grid.box())) throw std::invalid_argument("mu_general: B_4R escapes the domain");
  const double n = grid.dim();
  const double p_minus = band(field, outer, grid).p_minus;
  const double r = ball.radius;
  auto term = [&](const GridFunction& h, double q, double r_exp) {
    const double norm = lq_norm(h, q, outer);
    if (norm == 0.0) return 0.0;
    return std::pow(std::pow(r, r_exp) * norm, 1.0 / (p_minus - 1.0));
  };
  const auto ratio = [n](double q) { return std::isinf(q) ? 0.0 : n / q; };
  return term(bounds.f_src, bounds.q2, 1.0 - ratio(bounds.q2)) + term(bounds.g0, bounds.q0, -ratio(bounds.q0)) +
         term(bounds.g1, bounds.q1, -ratio(bounds.q1));
}

FluxPair exponential_transform(const FluxPair& pair, const StructureBounds& bounds, TransformDirection direction) {
  if (!(bounds.alpha > 0.0)) throw std::invalid_argument("exponential_transform: alpha must be > 0");
  const double rate = bounds.b / bounds.alpha;
  const double m0 = bounds.m0;
  const double sign = direction == TransformDirection::sub ? 1.0 : -1.0;
  auto a = pair.a;
  return {[a, rate, m0, sign](const Point& x, double s, const Point& xi) -> Point {
            return std::exp(sign * rate * (s - m0)) * a(x, s, xi);
          },
          pair.b};
}

StructureBounds transformed_bounds(const StructureBounds& bounds, TransformDirection direction) {
  if (!(bounds.alpha > 0.0)) throw std::invalid_argument("transformed_bounds: alpha must be > 0");
  StructureBounds out = bounds;
  const double factor = std::exp((bounds.b / bounds.alpha) * bounds.m0);
  if (direction == TransformDirection::sub) {
    out.alpha = bounds.alpha / factor;
  } else {
    out.c0 = factor * bounds.c0;
    out.g0 = factor * bounds.g0;
    out.g1 = factor * bounds.g1;
    out.c1 = factor * bounds.c1;
    out.k1 = factor * bounds.k1;
  }
  return out;
}

}  // namespace pxlap

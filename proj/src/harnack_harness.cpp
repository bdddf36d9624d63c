#include "pxlap/harnack_harness.hpp"

#include "pxlap/fit.hpp"
#include "pxlap/variable_lebesgue.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace pxlap {

namespace {

struct Extremes {
  double sup;
  double inf;
};

Extremes extremes(const GridFunction& u, const Ball& ball, const char* who) {
  const auto nodes = u.grid().nodes_in(ball);
  if (nodes.empty()) throw std::invalid_argument(std::string(who) + ": ball contains no sample");
  Extremes e{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (Index i : nodes) {
    e.sup = std::max(e.sup, u[i]);
    e.inf = std::min(e.inf, u[i]);
  }
  return e;
}

}  // namespace

double harnack_mu(const GridFunction& f, const Ball& ball, double q0, const ExponentField& field) {
  const Grid& grid = f.grid();
  const double r = ball.radius;
  if (!(r > 0.0) || r > 1.0) throw std::invalid_argument("harnack_mu: R must satisfy 0 < R <= 1");
  const Ball outer = ball.dilated(4.0);
  if (!inside(outer, grid.box())) throw std::invalid_argument("harnack_mu: B_4R is not inside the domain");
  const double n = grid.dim();
  const double p_minus = band(field, outer, grid).p_minus;
  const double bound = std::max(1.0, n / p_minus);
  if (!(q0 > bound)) {
    throw std::invalid_argument("harnack_mu: q0 = " + std::to_string(q0) + " violates q0 > max{1, N/p_-^{4R}} = " +
                                std::to_string(bound));
  }
  const double norm = lq_norm(f, q0, outer);
  if (norm == 0.0) return 0.0;
  const double r_exp = std::isinf(q0) ? 1.0 : 1.0 - n / q0;
  return std::pow(std::pow(r, r_exp) * norm, 1.0 / (p_minus - 1.0));
}

double HarnackReport::reduced_ratio() const { return sup_u / (inf_u + ball.radius * mu); }

HarnackReport harnack_check(const GridFunction& u, const Ball& ball, double mu) {
  if (!(mu >= 0.0)) throw std::invalid_argument("harnack_check: mu must be >= 0");
  if (!(ball.radius > 0.0)) throw std::invalid_argument("harnack_check: R must be > 0");
  for (Index i : u.grid().nodes_in(ball.dilated(4.0))) {
    if (u[i] < 0.0) {
      throw std::domain_error("harnack_check: u < 0 inside B_4R (hypothesis u >= 0 violated) at node " +
                              std::to_string(i));
    }
  }
  const Extremes e = extremes(u, ball, "harnack_check");
  HarnackReport rep{ball, e.sup, e.inf, mu, 0.0, std::nullopt};
  rep.c_emp = e.sup / (e.inf + ball.radius + ball.radius * mu);
  return rep;
}

HarnackReport harnack_check(const GridFunction& u, const Ball& ball, double mu, const ExponentField& field) {
  HarnackReport rep = harnack_check(u, ball, mu);
  rep.p_band = band(field, ball.dilated(4.0), u.grid());
  return rep;
}

ScaleSweep harnack_scale_sweep(const GridFunction& u, const GridFunction& f, const Point& center, double radius,
                               double q0, const ExponentField& field, int levels) {
  if (levels < 2) throw std::invalid_argument("harnack_scale_sweep: need at least two levels");
  ScaleSweep sweep;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (int j = 0; j < levels; ++j) {
    const Ball ball(center, radius / std::pow(2.0, j));
    sweep.reports.push_back(harnack_check(u, ball, harnack_mu(f, ball, q0, field), field));
    lo = std::min(lo, sweep.reports.back().c_emp);
    hi = std::max(hi, sweep.reports.back().c_emp);
  }
  sweep.drift = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  sweep.anomaly = sweep.drift > 2.0;
  return sweep;
}

std::string classify_trend(const std::vector<double>& values) {
  bool up = false;
  bool down = false;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1]) up = true;
    if (values[i] < values[i - 1]) down = true;
  }
  if (up && down) return "mixed";
  if (up) return "nondecreasing";
  if (down) return "nonincreasing";
  return "constant";
}

DependenceProbe dependence_probe(const ProblemSpec& base, const Ball& ball, const std::vector<double>& ks) {
  if (ks.empty()) throw std::invalid_argument("dependence_probe: empty k list");
  const SolveResult v = solve_dirichlet(base);
  if (!v.converged) throw std::runtime_error("dependence_probe: base solve did not converge: " + v.diagnostics);
  const double mu = harnack_mu(base.rhs, ball, std::numeric_limits<double>::infinity(), base.field);
  DependenceProbe probe;
  for (double k : ks) {
    if (!(k > 0.0)) throw std::invalid_argument("dependence_probe: k must be > 0");
    probe.k.push_back(k);
    probe.c_scaled.push_back(harnack_check(k * v.solution, ball, mu).c_emp);
    ProblemSpec spec = base;
    spec.dirichlet = k * base.dirichlet;
    const SolveResult w = solve_dirichlet(spec);
    if (!w.converged) {
      throw std::runtime_error("dependence_probe: solve for k = " + std::to_string(k) + " did not converge");
    }
    probe.c_resolved.push_back(harnack_check(w.solution, ball, mu).c_emp);
  }
  probe.trend_scaled = classify_trend(probe.c_scaled);
  probe.trend_resolved = classify_trend(probe.c_resolved);
  return probe;
}

void write_trend_csv(const std::string& path, const DependenceProbe& probe) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trend_csv: cannot open " + path);
  out << std::setprecision(17);
  out << "k,c_emp_scaled,c_emp_resolved\n";
  for (std::size_t i = 0; i < probe.k.size(); ++i) {
    out << probe.k[i] << ',' << probe.c_scaled[i] << ',' << probe.c_resolved[i] << '\n';
  }
  out << "# trend_scaled," << probe.trend_scaled << '\n';
  out << "# trend_resolved," << probe.trend_resolved << '\n';
}

// ---------------------------------------------------------------------------

WeakHarnackResult weak_harnack_check(const GridFunction& u, const Point& center, double r, double t0,
                                     HypothesisPolicy policy) {
  if (!(t0 > 0.0)) throw std::invalid_argument("weak_harnack_check: t0 must be > 0");
  if (!(r > 0.0)) throw std::invalid_argument("weak_harnack_check: r must be > 0");
  const Ball inner(center, r);
  const Ball outer(center, 2.0 * r);
  if (!inside(outer, u.grid().box())) throw std::invalid_argument("weak_harnack_check: B_2r is not inside the domain");

  const bool shifted = policy == HypothesisPolicy::shift;
  const GridFunction v = shifted ? GridFunction(u.grid(), u.values().array() + 1.0) : u;
  const double floor = policy == HypothesisPolicy::assume ? 0.0 : 1.0;
  for (Index i : u.grid().nodes_in(outer)) {
    if (v[i] < floor) {
      throw std::domain_error("weak_harnack_check: u < " + std::to_string(floor) + " on B_2r at node " +
                              std::to_string(i));
    }
  }
  WeakHarnackResult res;
  res.lhs = extremes(v, inner, "weak_harnack_check").inf;
  res.rhs = lt_average(v, t0, outer);
  res.ratio = res.rhs > 0.0 ? res.lhs / res.rhs : 0.0;
  res.t = t0;
  res.shifted = shifted;
  return res;
}

double improved_t_limit(int n, double p_minus) {
  if (p_minus >= n) return std::numeric_limits<double>::infinity();
  return n * (p_minus - 1.0) / (n - p_minus);
}

GridFunction bump_cutoff(const Grid& grid, const Point& center, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("bump_cutoff: rho must be > 0");
  return GridFunction::sample(grid, [&](const Point& x) {
    const double s = 1.0 - (x - center).squaredNorm() / (rho * rho);
    return s > 0.0 ? s * s : 0.0;
  });
}

GridFunction hat_cutoff(const Grid& grid, const Point& center, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("hat_cutoff: rho must be > 0");
  return GridFunction::sample(grid, [&](const Point& x) { return std::max(0.0, 1.0 - (x - center).norm() / rho); });
}

CaccioppoliResult caccioppoli_check(const GridFunction& u, double gamma, const GridFunction& eta,
                                    const GridFunction& h, const ExponentField& field, double c_probe,
                                    const Ball& ball) {
  const Grid& grid = u.grid();
  if (gamma == 0.0) throw std::invalid_argument("caccioppoli_check: gamma must be nonzero");
  if (!(c_probe >= 0.0)) throw std::invalid_argument("caccioppoli_check: C_probe must be >= 0");
  if (!eta.grid().same_lattice(grid) || !h.grid().same_lattice(grid)) {
    throw std::invalid_argument("caccioppoli_check: lattice mismatch");
  }
  if (eta.min_value() < 0.0) throw std::invalid_argument("caccioppoli_check: eta must be >= 0");
  if (h.min_value() < 0.0) throw std::invalid_argument("caccioppoli_check: H must be >= 0");
  for (Index i = 0; i < grid.node_count(); ++i) {
    if (eta[i] > 0.0 && !ball.contains(grid.node(i))) {
      throw std::invalid_argument("caccioppoli_check: eta is not supported in the ball");
    }
    if (eta[i] > 0.0 && u[i] < 1.0) {
      throw std::domain_error("caccioppoli_check: u < 1 on supp eta at node " + std::to_string(i));
    }
  }

  CaccioppoliResult res;
  const ExponentBand pb = band(field, ball, grid);
  res.p_minus = pb.p_minus;
  res.p_plus = pb.p_plus;
  const Eigen::VectorXd u_avg = u.cell_averages();
  const Eigen::VectorXd eta_avg = eta.cell_averages();
  const Eigen::VectorXd h_avg = h.cell_averages();
  const unsigned corners = grid.corner_count();
  double lhs = 0.0;
  for (const CellSample& s : cell_quadrature(grid, Region{ball})) {
    const double e = eta_avg[s.cell];
    if (e <= 0.0) {
      bool any = false;
      for (unsigned m = 0; m < corners; ++m) any = any || eta[grid.cell_corner(s.cell, m)] > 0.0;
      if (!any) continue;
    }
    const double p = field(s.center);
    const double uc = u_avg[s.cell];
    double grad_u = 0.0;
    double grad_eta = 0.0;
    for (unsigned m = 0; m < corners; ++m) {
      grad_u += std::pow(u.corner_gradient(s.cell, m).norm(), pb.p_minus);
      grad_eta += std::pow(eta.corner_gradient(s.cell, m).norm(), p);
    }
    grad_u /= corners;
    grad_eta /= corners;
    const double ep = std::pow(e, pb.p_plus);
    lhs += s.weight * std::pow(uc, gamma - 1.0) * grad_u * ep;
    res.base_term += s.weight * std::pow(uc, gamma - 1.0) * ep;
    res.cutoff_term += s.weight * std::pow(uc, gamma + p - 1.0) * std::pow(e, pb.p_plus - p) * grad_eta;
    res.source_term += s.weight * h_avg[s.cell] * std::pow(uc, gamma + p - 1.0) * ep;
  }
  res.lhs = lhs;
  const double ag = std::abs(gamma);
  res.rhs = res.base_term + c_probe * std::pow(ag, -pb.p_plus) * res.cutoff_term +
            c_probe / ag * res.source_term;
  res.holds = res.lhs <= res.rhs;
  return res;
}

// ---------------------------------------------------------------------------

namespace {

bool box_in_region_interior(const Box& b, const Region& outer) {
  const int n = b.dim();
  const unsigned corners = 1U << n;
  for (unsigned m = 0; m < corners; ++m) {
    Point c(n);
    for (int k = 0; k < n; ++k) c[k] = (m >> k) & 1U ? b.upper[k] : b.lower[k];
    if (const auto* ball = std::get_if<Ball>(&outer)) {
      if (!((c - ball->center).norm() < ball->radius)) return false;
    } else {
      const Box& o = std::get<Box>(outer);
      if (!((c.array() > o.lower.array()).all() && (c.array() < o.upper.array()).all())) return false;
    }
  }
  return true;
}

}  // namespace

bool compactly_inside(const Region& inner, const Region& outer) {
  if (region_bounds(inner).dim() != region_bounds(outer).dim()) return false;
  if (const auto* b = std::get_if<Ball>(&inner)) {
    if (const auto* o = std::get_if<Ball>(&outer)) {
      return (b->center - o->center).norm() + b->radius < o->radius;
    }
    const Box& o = std::get<Box>(outer);
    return ((b->center.array() - b->radius) > o.lower.array()).all() &&
           ((b->center.array() + b->radius) < o.upper.array()).all();
  }
  return box_in_region_interior(std::get<Box>(inner), outer);
}

LocalBoundResult local_bound_check(const GridFunction& u, const Region& inner, const Region& outer, double t,
                                   double c_probe) {
  if (!(t > 0.0)) throw std::invalid_argument("local_bound_check: t must be > 0");
  if (!compactly_inside(inner, outer)) {
    throw std::invalid_argument("local_bound_check: inner region is not compactly inside the outer region");
  }
  const auto nodes = u.grid().nodes_in(inner);
  if (nodes.empty()) throw std::invalid_argument("local_bound_check: inner region contains no sample");
  LocalBoundResult res;
  res.sup_inner = -std::numeric_limits<double>::infinity();
  for (Index i : nodes) res.sup_inner = std::max(res.sup_inner, u[i]);
  res.norm_outer = lq_norm(u, t, outer);
  res.bound = c_probe * (1.0 + res.norm_outer);
  res.holds = res.sup_inner <= res.bound;
  return res;
}

OscillationTrace holder_estimate(const GridFunction& u, const Point& center, const std::vector<double>& radii) {
  if (radii.size() < 4) throw std::invalid_argument("holder_estimate: need at least 4 radii");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] < radii[i - 1])) throw std::invalid_argument("holder_estimate: radii must be strictly decreasing");
  }
  if (!(radii.back() > 0.0)) throw std::invalid_argument("holder_estimate: radii must be positive");
  const Box box = u.grid().box();
  OscillationTrace tr;
  tr.center = center;
  tr.radii = radii;
  for (double r : radii) {
    const Ball ball(center, r);
    if (!inside(ball, box)) throw std::invalid_argument("holder_estimate: ball of radius " + std::to_string(r) +
                                                        " is not inside the domain");
    const auto nodes = u.grid().nodes_in(ball);
    if (nodes.size() < 2) {
      throw std::invalid_argument("holder_estimate: ball of radius " + std::to_string(r) +
                                  " contains fewer than 2 samples");
    }
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (Index i : nodes) {
      hi = std::max(hi, u[i]);
      lo = std::min(lo, u[i]);
    }
    tr.oscillations.push_back(hi - lo);
  }
  for (std::size_t i = 1; i < tr.oscillations.size(); ++i) {
    if (tr.oscillations[i] > tr.oscillations[i - 1]) {
      throw std::logic_error("holder_estimate: oscillation increased on a smaller ball");
    }
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (tr.oscillations[i] >= kOscillationFloor) {
      xs.push_back(std::log(radii[i]));
      ys.push_back(std::log(tr.oscillations[i]));
    }
  }
  if (xs.empty()) {
    tr.constant = true;
    return tr;
  }
  if (xs.size() < 2) throw std::invalid_argument("holder_estimate: fewer than 2 radii above the oscillation floor");
  const LinearFit fit = fit_line(Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Index>(xs.size())),
                                 Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Index>(ys.size())));
  tr.fitted_exponent = fit.slope;
  tr.fit_residual = fit.rms_residual;
  return tr;
}

double holder_delta_candidate(int n, double q0, double p1, double p2) {
  if (!(q0 > 0.0)) throw std::invalid_argument("holder_delta_candidate: q0 must be > 0");
  const double p = q0 > n ? p2 : p1;
  const double ratio = std::isinf(q0) ? 0.0 : n / q0;
  return 1.0 + (1.0 - ratio) / (p - 1.0);
}

}  // namespace pxlap

#include "pxlap/run.hpp"

#include "pxlap/barriers.hpp"
#include "pxlap/harnack_harness.hpp"
#include "pxlap/structure_conditions.hpp"
#include "pxlap/variable_lebesgue.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace pxlap {

using nlohmann::json;

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"harnack",       "weak-harnack", "caccioppoli", "holder",
                                              "local-bound",   "barrier",      "max-principle",
                                              "hopf",          "structure",    "norm"};
  return names;
}

double json_number(const json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  throw ConfigError("expected a number, got " + value.dump());
}

namespace {

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  return obj.at(key);
}

double number(const json& obj, const std::string& key, const std::string& where) {
  try {
    return json_number(require(obj, key, where));
  } catch (const ConfigError& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

int integer(const json& obj, const std::string& key, int fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

std::string string_or(const json& obj, const std::string& key, const std::string& fallback,
                      const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return obj.at(key).get<std::string>();
}

Point vector(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a non-empty array of numbers");
  Point p(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<Index>(i)] = json_number(v[i]);
  return p;
}

Point vector_key(const json& obj, const std::string& key, const std::string& where) {
  return vector(require(obj, key, where), where + "." + key);
}

std::vector<double> numbers(const json& v, const std::string& where) {
  const Point p = vector(v, where);
  return {p.data(), p.data() + p.size()};
}

Box domain_box(const json& problem) {
  const json& d = require(problem, "domain", "config");
  const Point lo = vector_key(d, "lower", "domain");
  const Point hi = vector_key(d, "upper", "domain");
  if (lo.size() != hi.size()) throw ConfigError("domain: lower and upper differ in dimension");
  return {lo, hi};
}

Region region(const json& v, const std::string& where) {
  if (v.contains("radius")) return Ball(vector_key(v, "center", where), number(v, "radius", where));
  return Box(vector_key(v, "lower", where), vector_key(v, "upper", where));
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  const std::filesystem::path p(file);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

// ---------------------------------------------------------------------------

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  RunConfig cfg;
  cfg.base_dir = base_dir;
  for (const char* key : {"domain", "exponent", "rhs", "boundary", "solver"}) {
    if (doc.contains(key)) cfg.problem[key] = doc.at(key);
  }
  if (doc.contains("output")) {
    if (!doc.at("output").is_string()) throw ConfigError("config.output: expected a string");
    cfg.output = doc.at("output").get<std::string>();
  }
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_integer() || s.get<std::int64_t>() < 0) throw ConfigError("config.seed: expected a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("solution_file")) {
    if (!doc.at("solution_file").is_string()) throw ConfigError("config.solution_file: expected a string");
    cfg.solution_file = doc.at("solution_file").get<std::string>();
  }
  if (doc.contains("checks")) {
    const json& checks = doc.at("checks");
    if (!checks.is_array()) throw ConfigError("config.checks: expected an array");
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const json& c = checks[i];
      const std::string where = "checks[" + std::to_string(i) + "]";
      if (!c.is_object() || !c.contains("type") || !c.at("type").is_string()) {
        throw ConfigError(where + ": expected an object with a string 'type'");
      }
      const auto type = c.at("type").get<std::string>();
      const auto& names = check_names();
      if (std::find(names.begin(), names.end(), type) == names.end()) {
        throw ConfigError(where + ": unknown check '" + type + "'");
      }
      cfg.checks.push_back({type, c});
    }
  }
  return cfg;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  return parse_config(load_json(path), std::filesystem::path(path).parent_path());
}

Grid build_grid(const json& problem) {
  const Box box = domain_box(problem);
  const json& cells = require(problem.at("domain"), "cells", "domain");
  if (cells.is_number_integer()) return Grid::over(box, cells.get<int>());
  if (!cells.is_array() || static_cast<int>(cells.size()) != box.dim()) {
    throw ConfigError("domain.cells: expected an integer or one integer per axis");
  }
  return Grid::over(box, cells.get<std::vector<int>>());
}

ExponentField build_field(const json& problem, const std::filesystem::path& base_dir) {
  const json& e = require(problem, "exponent", "config");
  const std::string kind = string_or(e, "kind", "constant", "exponent");
  if (kind == "constant") return ExponentField::constant(number(e, "p", "exponent"));
  if (kind == "affine") {
    return ExponentField::affine(number(e, "base", "exponent"), vector_key(e, "slope", "exponent"),
                                 domain_box(problem));
  }
  if (kind == "radial") {
    return ExponentField::radial(vector_key(e, "center", "exponent"), number(e, "base", "exponent"),
                                 number(e, "slope", "exponent"), domain_box(problem));
  }
  if (kind == "piecewise") {
    return ExponentField::piecewise(integer(e, "axis", 0, "exponent"), number(e, "split", "exponent"),
                                    number(e, "left", "exponent"), number(e, "right", "exponent"));
  }
  if (kind == "grid") {
    const auto file = resolve(base_dir, require(e, "file", "exponent").get<std::string>());
    return ExponentField::from_grid(load_pxgrid(file.string()));
  }
  throw ConfigError("exponent.kind: unknown kind '" + kind + "'");
}

ProblemSpec build_problem(const RunConfig& config) {
  const json& problem = config.problem;
  const Grid grid = build_grid(problem);
  const ExponentField field = build_field(problem, config.base_dir);

  const json rhs = problem.value("rhs", json{{"constant", 0.0}});
  GridFunction f = GridFunction::constant(grid, 0.0);
  if (rhs.contains("file")) {
    f = load_pxgrid(resolve(config.base_dir, rhs.at("file").get<std::string>()).string());
    if (!f.grid().same_lattice(grid)) throw ConfigError("rhs.file: lattice differs from the domain grid");
  } else {
    f = GridFunction::constant(grid, number(rhs, "constant", "rhs"));
  }

  const json bc = problem.value("boundary", json{{"kind", "constant"}, {"value", 0.0}});
  const std::string kind = string_or(bc, "kind", "constant", "boundary");
  GridFunction g = GridFunction::constant(grid, 0.0);
  if (kind == "constant") {
    g = GridFunction::constant(grid, number(bc, "value", "boundary"));
  } else if (kind == "affine") {
    const double base = number(bc, "base", "boundary");
    const Point slope = vector_key(bc, "slope", "boundary");
    if (slope.size() != grid.dim()) throw ConfigError("boundary.slope: dimension mismatch");
    g = GridFunction::sample(grid, [&](const Point& x) { return base + slope.dot(x); });
  } else if (kind == "positive_part") {
    const int axis = integer(bc, "axis", 0, "boundary");
    if (axis < 0 || axis >= grid.dim()) throw ConfigError("boundary.axis: out of range");
    const double scale = number_or(bc, "scale", 1.0, "boundary");
    g = GridFunction::sample(grid, [&](const Point& x) { return scale * std::max(0.0, x[axis]); });
  } else if (kind == "file") {
    g = load_pxgrid(resolve(config.base_dir, require(bc, "file", "boundary").get<std::string>()).string());
    if (!g.grid().same_lattice(grid)) throw ConfigError("boundary.file: lattice differs from the domain grid");
  } else {
    throw ConfigError("boundary.kind: unknown kind '" + kind + "'");
  }

  const json solver = problem.value("solver", json::object());
  ProblemSpec spec{grid, field, f, g};
  spec.reg_eps = number_or(solver, "reg_eps", spec.reg_eps, "solver");
  spec.tol = number_or(solver, "tol", spec.tol, "solver");
  spec.max_iter = integer(solver, "max_iter", spec.max_iter, "solver");
  spec.continuation_steps = integer(solver, "continuation_steps", spec.continuation_steps, "solver");
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------

namespace {

/// Lazily built problem and solution shared by the checks of one run.
class RunContext {
 public:
  RunContext(const RunConfig& config, nlohmann::ordered_json& metadata) : config_(config), metadata_(metadata) {}

  const ProblemSpec& problem() {
    if (!problem_) problem_ = build_problem(config_);
    return *problem_;
  }
  const ExponentField& field() { return problem().field; }

  const GridFunction& solution() {
    if (solution_) return *solution_;
    if (config_.solution_file) {
      solution_ = load_pxgrid(resolve(config_.base_dir, *config_.solution_file).string());
      if (!config_.problem.contains("domain")) return *solution_;
      if (!solution_->grid().same_lattice(problem().grid)) {
        throw ConfigError("solution_file: lattice differs from the domain grid");
      }
      return *solution_;
    }
    const SolveResult res = solve_dirichlet(problem());
    nlohmann::ordered_json s;
    s["converged"] = res.converged;
    s["iterations"] = res.iterations;
    s["residual"] = res.residual;
    s["final_energy"] = res.energy_trace.empty() ? 0.0 : res.energy_trace.back();
    s["diagnostics"] = res.diagnostics;
    metadata_["solver"] = s;
    if (!res.converged) throw std::runtime_error("solver did not converge: " + res.diagnostics);
    solution_ = res.solution;
    return *solution_;
  }

  [[nodiscard]] bool has_exponent() const { return config_.problem.contains("exponent"); }
  [[nodiscard]] std::uint64_t seed() const { return config_.seed; }

 private:
  const RunConfig& config_;
  nlohmann::ordered_json& metadata_;
  std::optional<ProblemSpec> problem_;
  std::optional<GridFunction> solution_;
};

double ratio_or_nan(double a, double b) { return b != 0.0 ? a / b : std::numeric_limits<double>::quiet_NaN(); }

json points_json(const Point& p) { return std::vector<double>(p.data(), p.data() + p.size()); }

CheckRecord harnack_record(const json& c, RunContext& ctx) {
  const Point center = vector_key(c, "center", "harnack");
  const double radius = number(c, "radius", "harnack");
  const Ball ball(center, radius);
  const GridFunction& u = ctx.solution();
  const ProblemSpec& spec = ctx.problem();
  const double q0 = number_or(c, "q0", std::numeric_limits<double>::infinity(), "harnack");
  const double mu = c.contains("mu") ? number(c, "mu", "harnack") : harnack_mu(spec.rhs, ball, q0, spec.field);
  const HarnackReport rep = harnack_check(u, ball, mu, spec.field);
  CheckRecord r("harnack", center, radius);
  r.lhs = rep.sup_u;
  r.rhs = rep.inf_u + radius + radius * mu;
  r.ratio = rep.c_emp;
  r.p_minus = rep.p_band->p_minus;
  r.p_plus = rep.p_band->p_plus;
  r.mu = mu;
  r.details["sup_u"] = rep.sup_u;
  r.details["inf_u"] = rep.inf_u;
  r.details["c_emp"] = rep.c_emp;
  r.details["reduced_ratio"] = rep.reduced_ratio();
  r.details["q0"] = std::isinf(q0) ? json("inf") : json(q0);
  if (const int levels = integer(c, "sweep_levels", 0, "harnack"); levels > 0) {
    const ScaleSweep sweep = harnack_scale_sweep(u, spec.rhs, center, radius, q0, spec.field, levels);
    std::vector<double> cs;
    for (const auto& s : sweep.reports) cs.push_back(s.c_emp);
    r.details["sweep_c_emp"] = cs;
    r.details["sweep_drift"] = sweep.drift;
    r.details["sweep_anomaly"] = sweep.anomaly;
  }
  return r;
}

HypothesisPolicy policy_from(const std::string& s) {
  if (s == "require") return HypothesisPolicy::require;
  if (s == "shift") return HypothesisPolicy::shift;
  if (s == "assume") return HypothesisPolicy::assume;
  throw ConfigError("weak-harnack.policy: expected require, shift or assume");
}

CheckRecord weak_harnack_record(const json& c, RunContext& ctx) {
  const Point center = vector_key(c, "center", "weak-harnack");
  const double radius = number(c, "radius", "weak-harnack");
  const double t0 = number_or(c, "t0", 1.0, "weak-harnack");
  const auto policy = policy_from(string_or(c, "policy", "require", "weak-harnack"));
  const GridFunction& u = ctx.solution();
  const WeakHarnackResult res = weak_harnack_check(u, center, radius, t0, policy);
  const ExponentBand pb = band(ctx.field(), Ball(center, 2.0 * radius), u.grid());
  CheckRecord r("weak-harnack", center, radius);
  r.lhs = res.lhs;
  r.rhs = res.rhs;
  r.ratio = res.ratio;
  r.p_minus = pb.p_minus;
  r.p_plus = pb.p_plus;
  r.details["t0"] = t0;
  r.details["shifted"] = res.shifted;
  r.details["improved_t_limit"] = [&]() -> json {
    const double lim = improved_t_limit(u.grid().dim(), pb.p_minus);
    return std::isinf(lim) ? json("inf") : json(lim);
  }();
  return r;
}

CheckRecord caccioppoli_record(const json& c, RunContext& ctx) {
  const Point center = vector_key(c, "center", "caccioppoli");
  const double radius = number(c, "radius", "caccioppoli");
  const double gamma = number(c, "gamma", "caccioppoli");
  const double c_probe = number(c, "c_probe", "caccioppoli");
  const std::string cutoff = string_or(c, "cutoff", "bump", "caccioppoli");
  const GridFunction& u = ctx.solution();
  const Grid& grid = u.grid();
  GridFunction eta = GridFunction::constant(grid, 0.0);
  if (cutoff == "bump") {
    eta = bump_cutoff(grid, center, radius);
  } else if (cutoff == "hat") {
    eta = hat_cutoff(grid, center, radius);
  } else {
    throw ConfigError("caccioppoli.cutoff: expected bump or hat");
  }
  const GridFunction h = GridFunction::constant(grid, number_or(c, "H", 0.0, "caccioppoli"));
  const CaccioppoliResult res = caccioppoli_check(u, gamma, eta, h, ctx.field(), c_probe, Ball(center, radius));
  CheckRecord r("caccioppoli", center, radius);
  r.lhs = res.lhs;
  r.rhs = res.rhs;
  r.ratio = ratio_or_nan(res.lhs, res.rhs);
  r.p_minus = res.p_minus;
  r.p_plus = res.p_plus;
  r.details["gamma"] = gamma;
  r.details["c_probe"] = c_probe;
  r.details["cutoff"] = cutoff;
  r.details["base_term"] = res.base_term;
  r.details["cutoff_term"] = res.cutoff_term;
  r.details["source_term"] = res.source_term;
  r.details["holds"] = res.holds;
  return r;
}

std::vector<double> radii_from(const json& c, const std::string& where) {
  if (c.contains("radii")) return numbers(c.at("radii"), where + ".radii");
  const double r_max = number(c, "r_max", where);
  const double r_min = number(c, "r_min", where);
  const int count = integer(c, "count", 8, where);
  if (!(r_max > r_min) || !(r_min > 0.0) || count < 2) throw ConfigError(where + ": need r_max > r_min > 0, count >= 2");
  std::vector<double> radii;
  for (int j = 0; j < count; ++j) radii.push_back(r_max * std::pow(r_min / r_max, static_cast<double>(j) / (count - 1)));
  return radii;
}

CheckRecord holder_record(const json& c, RunContext& ctx) {
  const Point center = vector_key(c, "center", "holder");
  const std::vector<double> radii = radii_from(c, "holder");
  const GridFunction& u = ctx.solution();
  const OscillationTrace tr = holder_estimate(u, center, radii);
  CheckRecord r("holder", center, radii.front());
  if (!tr.constant) r.lhs = tr.fitted_exponent;
  r.details["radii"] = tr.radii;
  r.details["oscillations"] = tr.oscillations;
  r.details["constant"] = tr.constant;
  r.details["fit_residual"] = tr.fit_residual;
  if (ctx.has_exponent()) {
    const double q0 = number_or(c, "q0", std::numeric_limits<double>::infinity(), "holder");
    const ExponentField& field = ctx.field();
    r.details["delta_candidate"] = holder_delta_candidate(u.grid().dim(), q0, field.p1(), field.p2());
  }
  return r;
}

CheckRecord local_bound_record(const json& c, RunContext& ctx) {
  const Region inner = region(require(c, "inner", "local-bound"), "local-bound.inner");
  const Region outer = region(require(c, "outer", "local-bound"), "local-bound.outer");
  const double t = number_or(c, "t", 1.0, "local-bound");
  const double c_probe = number(c, "c_probe", "local-bound");
  const LocalBoundResult res = local_bound_check(ctx.solution(), inner, outer, t, c_probe);
  CheckRecord r("local-bound");
  if (const auto* b = std::get_if<Ball>(&inner)) {
    r.center = b->center;
    r.radius = b->radius;
  }
  r.lhs = res.sup_inner;
  r.rhs = res.bound;
  r.ratio = ratio_or_nan(res.sup_inner, res.bound);
  r.details["t"] = t;
  r.details["c_probe"] = c_probe;
  r.details["norm_outer"] = res.norm_outer;
  r.details["holds"] = res.holds;
  return r;
}

CheckRecord barrier_record(const json& c, RunContext& ctx) {
  BarrierParams params{vector_key(c, "x0", "barrier"), number(c, "delta", "barrier"), number(c, "mu", "barrier"),
                       number_or(c, "a_level", 1.0, "barrier")};
  const int resolution = integer(c, "resolution", 64, "barrier");
  const BarrierScan scan =
      barrier_subsolution_scan(params, ctx.field(), resolution, number_or(c, "reg_eps", 0.0, "barrier"));
  CheckRecord r("barrier", params.x0, params.delta);
  r.lhs = scan.min_operator_value;
  r.rhs = 0.0;
  r.mu = params.mu;
  r.details["a_level"] = params.a_level;
  r.details["argmin"] = points_json(scan.argmin);
  r.details["samples"] = scan.samples;
  r.details["subsolution"] = scan.min_operator_value >= -number_or(c, "tol_scan", 1e-10, "barrier");
  return r;
}

CheckRecord max_principle_record(const json& c, RunContext& ctx) {
  const double margin = number(c, "margin", "max-principle");
  const double zero_tol = number_or(c, "zero_tol", -1.0, "max-principle");
  const MaxPrincipleResult res = strong_max_principle_check(ctx.solution(), margin, zero_tol);
  CheckRecord r("max-principle");
  r.lhs = res.interior_min;
  r.rhs = res.zero_tol;
  r.details["classification"] = to_string(res.classification);
  r.details["max_abs"] = res.max_abs;
  r.details["margin"] = margin;
  return r;
}

CheckRecord hopf_record(const json& c, RunContext& ctx) {
  const Point y = vector_key(c, "y", "hopf");
  const Point nu = vector_key(c, "nu", "hopf");
  const std::vector<double> steps = numbers(require(c, "steps", "hopf"), "hopf.steps");
  const HopfResult res = hopf_slope(ctx.solution(), y, nu, steps, number_or(c, "zero_tol", 1e-10, "hopf"));
  CheckRecord r("hopf", y);
  r.lhs = res.c0;
  r.rhs = 0.0;
  r.details["steps"] = res.steps;
  r.details["slopes"] = res.slopes;
  return r;
}

CheckRecord structure_record(const json& c, RunContext& ctx) {
  const ProblemSpec& spec = ctx.problem();
  const Grid& grid = spec.grid;
  StructureBounds bounds = StructureBounds::zeros(grid);
  bounds.alpha = number_or(c, "alpha", 1.0, "structure");
  bounds.b = number_or(c, "b", 0.0, "structure");
  bounds.m0 = number_or(c, "m0", 1.0, "structure");
  const json coeffs = c.value("coefficients", json::object());
  const std::pair<const char*, GridFunction*> slots[] = {{"g0", &bounds.g0}, {"g1", &bounds.g1},
                                                         {"f", &bounds.f_src}, {"c0", &bounds.c0},
                                                         {"c1", &bounds.c1}, {"c2", &bounds.c2},
                                                         {"k1", &bounds.k1}, {"k2", &bounds.k2}};
  for (const auto& [key, slot] : slots) {
    if (coeffs.contains(key)) *slot = GridFunction::constant(grid, number(coeffs, key, "structure.coefficients"));
  }
  const json q = c.value("q", json::object());
  bounds.q0 = number_or(q, "q0", bounds.q0, "structure.q");
  bounds.q1 = number_or(q, "q1", bounds.q1, "structure.q");
  bounds.q2 = number_or(q, "q2", bounds.q2, "structure.q");
  bounds.t2 = number_or(q, "t2", bounds.t2, "structure.q");
  bounds.validate(spec.field);

  const std::string flux = string_or(c, "flux", "p-laplacian", "structure");
  FluxPair pair = FluxPair::zero();
  if (flux == "p-laplacian") {
    pair = FluxPair::p_laplacian(spec.field);
  } else if (flux == "scaled") {
    pair = FluxPair::scaled(spec.field, number(c, "scale", "structure"));
  } else if (flux != "zero") {
    throw ConfigError("structure.flux: expected p-laplacian, scaled or zero");
  }
  if (c.contains("source")) {
    const double v = number(c, "source", "structure");
    pair = pair.with_source([v](const Point&, double, const Point&) { return v; });
  }
  const std::string transform = string_or(c, "transform", "none", "structure");
  if (transform == "sub" || transform == "super") {
    const auto dir = transform == "sub" ? TransformDirection::sub : TransformDirection::super;
    pair = exponential_transform(pair, bounds, dir);
    bounds = transformed_bounds(bounds, dir);
  } else if (transform != "none") {
    throw ConfigError("structure.transform: expected none, sub or super");
  }
  SampleLattice lattice;
  lattice.seed = ctx.seed();
  if (c.contains("lattice")) {
    const json& l = c.at("lattice");
    lattice.s_levels = integer(l, "s_levels", lattice.s_levels, "structure.lattice");
    lattice.xi_radii = integer(l, "xi_radii", lattice.xi_radii, "structure.lattice");
    lattice.directions = integer(l, "directions", lattice.directions, "structure.lattice");
  }
  const auto samples = structure_samples(grid, bounds.m0, lattice);
  const std::string conditions = string_or(c, "conditions", "3", "structure");
  ViolationReport rep;
  if (conditions == "3") {
    rep = check_conditions(pair, bounds, spec.field, samples);
  } else if (conditions == "3prime") {
    rep = check_condition_3prime(pair, bounds, spec.field, samples);
  } else {
    throw ConfigError("structure.conditions: expected 3 or 3prime");
  }
  CheckRecord r("structure");
  r.lhs = rep.worst_slack;
  r.rhs = 0.0;
  r.details["flux"] = flux;
  r.details["transform"] = transform;
  r.details["samples_checked"] = rep.samples_checked;
  r.details["violations"] = rep.violations.size();
  nlohmann::ordered_json per;
  for (Condition cond : {Condition::ellipticity, Condition::flux_growth, Condition::source_growth,
                         Condition::source_growth_gradient}) {
    per[condition_name(cond)] = rep.count(cond);
  }
  r.details["violations_by_condition"] = per;
  return r;
}

CheckRecord norm_record(const json& c, RunContext& ctx) {
  const std::string kind = string_or(c, "kind", "luxemburg", "norm");
  const GridFunction& u = ctx.solution();
  NormConfig cfg;
  cfg.bisection_tol = number_or(c, "tol", cfg.bisection_tol, "norm");
  CheckRecord r("norm");
  r.details["kind"] = kind;
  if (kind == "luxemburg") {
    r.lhs = luxemburg_norm(u, ctx.field(), cfg);
  } else if (kind == "sobolev") {
    r.lhs = sobolev_norm(u, ctx.field(), cfg);
  } else if (kind == "lq") {
    const double qv = number(c, "q", "norm");
    const Region reg = c.contains("region") ? region(c.at("region"), "norm.region") : Region{u.grid().box()};
    r.lhs = lq_norm(u, qv, reg);
    r.details["q"] = std::isinf(qv) ? json("inf") : json(qv);
  } else {
    throw ConfigError("norm.kind: expected luxemburg, sobolev or lq");
  }
  return r;
}

CheckRecord dispatch(const CheckDescriptor& d, RunContext& ctx) {
  const json& c = d.params;
  if (d.type == "harnack") return harnack_record(c, ctx);
  if (d.type == "weak-harnack") return weak_harnack_record(c, ctx);
  if (d.type == "caccioppoli") return caccioppoli_record(c, ctx);
  if (d.type == "holder") return holder_record(c, ctx);
  if (d.type == "local-bound") return local_bound_record(c, ctx);
  if (d.type == "barrier") return barrier_record(c, ctx);
  if (d.type == "max-principle") return max_principle_record(c, ctx);
  if (d.type == "hopf") return hopf_record(c, ctx);
  if (d.type == "structure") return structure_record(c, ctx);
  if (d.type == "norm") return norm_record(c, ctx);
  throw ConfigError("unknown check '" + d.type + "'");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

RunOutcome run_checks(const RunConfig& config, std::ostream& diag) {
  RunOutcome out;
  out.metadata["generated_at"] = utc_timestamp();
  out.metadata["seed"] = config.seed;
  RunContext ctx(config, out.metadata);
  for (std::size_t i = 0; i < config.checks.size(); ++i) {
    const auto& d = config.checks[i];
    try {
      out.records.push_back(dispatch(d, ctx));
    } catch (const std::exception& e) {
      const std::string msg = "check " + std::to_string(i) + " (" + d.type + "): " + e.what();
      diag << "error: " << msg << '\n';
      out.errors.push_back(msg);
      out.exit_code = 1;
    }
  }
  out.metadata["checks_requested"] = config.checks.size();
  out.metadata["checks_completed"] = out.records.size();
  out.metadata["errors"] = out.errors;
  return out;
}

RunOutcome run(const RunConfig& config, std::ostream& diag) {
  RunOutcome out = run_checks(config, diag);
  write_reports(config.output, out.records, out.metadata);
  return out;
}

}  // namespace pxlap

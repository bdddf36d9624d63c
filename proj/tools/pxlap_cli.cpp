// pxlap: solve p(x)-Laplacian Dirichlet problems and run verification checks.
//
// Exit status: 0 success, 1 a check or solve failed, 2 usage or config error.

#include "pxlap/barriers.hpp"
#include "pxlap/run.hpp"
#include "pxlap/variable_lebesgue.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct Overrides {
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> solution;
  std::optional<int> cells;
  std::optional<double> reg_eps;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<int> continuation;
};

void add_problem_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--cells", o.cells, "Cells per axis (overrides domain.cells)")->check(CLI::PositiveNumber);
  cmd->add_option("--reg-eps", o.reg_eps, "Gradient regularization (overrides solver.reg_eps)");
  cmd->add_option("--tol", o.tol, "Weak residual tolerance (overrides solver.tol)");
  cmd->add_option("--max-iter", o.max_iter, "Newton iterations per stage (overrides solver.max_iter)");
  cmd->add_option("--continuation", o.continuation, "Continuation stages (overrides solver.continuation_steps)");
}

/// Flags always win over the config file.
void apply(json& doc, const Overrides& o) {
  if (o.output) doc["output"] = *o.output;
  if (o.seed) doc["seed"] = *o.seed;
  // Paths given on the command line are relative to the working directory, not the config.
  if (o.solution) doc["solution_file"] = std::filesystem::absolute(*o.solution).string();
  if (o.cells) doc["domain"]["cells"] = *o.cells;
  if (o.reg_eps) doc["solver"]["reg_eps"] = *o.reg_eps;
  if (o.tol) doc["solver"]["tol"] = *o.tol;
  if (o.max_iter) doc["solver"]["max_iter"] = *o.max_iter;
  if (o.continuation) doc["solver"]["continuation_steps"] = *o.continuation;
}

pxlap::RunConfig config_from(const std::string& path, const Overrides& o) {
  json doc = pxlap::load_json(path);
  apply(doc, o);
  return pxlap::parse_config(doc, std::filesystem::path(path).parent_path());
}

pxlap::ExponentField exponent_from(const std::optional<double>& p, const std::optional<std::string>& config) {
  if (p) return pxlap::ExponentField::constant(*p);
  if (config) {
    const json doc = pxlap::load_json(*config);
    return pxlap::build_field(doc, std::filesystem::path(*config).parent_path());
  }
  throw pxlap::ConfigError("one of --p or --config is required for the exponent");
}

int cmd_solve(const std::string& config_path, const Overrides& o) {
  const pxlap::RunConfig cfg = config_from(config_path, o);
  const pxlap::ProblemSpec spec = pxlap::build_problem(cfg);
  const pxlap::SolveResult res = pxlap::solve_dirichlet(spec);
  std::filesystem::create_directories(cfg.output);
  const std::string solution = o.solution.value_or((std::filesystem::path(cfg.output) / "solution.pxgrid").string());
  pxlap::save_pxgrid(solution, res.solution);
  ordered_json summary;
  summary["converged"] = res.converged;
  summary["iterations"] = res.iterations;
  summary["residual"] = res.residual;
  summary["energy_trace"] = res.energy_trace;
  summary["diagnostics"] = res.diagnostics;
  summary["solution_file"] = solution;
  std::ofstream(std::filesystem::path(cfg.output) / "solve.json") << summary.dump(2) << '\n';
  std::cout << summary.dump(2) << '\n';
  if (!res.converged) {
    std::cerr << "error: solve did not converge: " << res.diagnostics << '\n';
    return 1;
  }
  return 0;
}

int cmd_verify(const std::string& config_path, const Overrides& o) {
  const pxlap::RunConfig cfg = config_from(config_path, o);
  const pxlap::RunOutcome out = pxlap::run(cfg, std::cerr);
  std::cout << "wrote " << out.records.size() << " report(s) to " << cfg.output << '\n';
  return out.exit_code;
}

int cmd_norm(const std::string& grid_path, const std::optional<double>& p, const std::optional<std::string>& config,
             const std::string& kind, const std::optional<double>& q, double tol) {
  const pxlap::GridFunction u = pxlap::load_pxgrid(grid_path);
  ordered_json j;
  j["kind"] = kind;
  pxlap::NormConfig cfg;
  cfg.bisection_tol = tol;
  if (kind == "lq") {
    if (!q) throw pxlap::ConfigError("--q is required for --kind lq");
    if (std::isfinite(*q)) {
      j["q"] = *q;
    } else {
      j["q"] = "inf";
    }
    j["value"] = pxlap::lq_norm(u, *q, pxlap::Region{u.grid().box()});
  } else {
    const pxlap::ExponentField field = exponent_from(p, config);
    j["value"] = kind == "sobolev" ? pxlap::sobolev_norm(u, field, cfg) : pxlap::luxemburg_norm(u, field, cfg);
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

struct BarrierArgs {
  int dim = 2;
  std::vector<double> x0;
  double delta = 1.0;
  std::vector<double> mu{4.0};
  double a_level = 1.0;
  int resolution = 64;
  double reg_eps = 0.0;
  std::optional<double> p;
  std::optional<std::string> config;
  std::optional<std::string> output;
};

int cmd_barrier_scan(const BarrierArgs& a) {
  const pxlap::ExponentField field = exponent_from(a.p, a.config);
  pxlap::Point x0 = pxlap::Point::Zero(a.dim);
  if (!a.x0.empty()) {
    if (static_cast<int>(a.x0.size()) != a.dim) throw pxlap::ConfigError("--x0 must have --dim coordinates");
    x0 = Eigen::Map<const Eigen::VectorXd>(a.x0.data(), a.dim);
  }
  std::vector<pxlap::CheckRecord> records;
  for (double mu : a.mu) {
    const pxlap::BarrierParams params{x0, a.delta, mu, a.a_level};
    const pxlap::BarrierScan scan = pxlap::barrier_subsolution_scan(params, field, a.resolution, a.reg_eps);
    pxlap::CheckRecord r("barrier", x0, a.delta);
    r.lhs = scan.min_operator_value;
    r.rhs = 0.0;
    r.mu = mu;
    r.details["a_level"] = a.a_level;
    r.details["argmin"] = std::vector<double>(scan.argmin.data(), scan.argmin.data() + scan.argmin.size());
    r.details["samples"] = scan.samples;
    r.details["subsolution"] = scan.min_operator_value >= -1e-10;
    std::cout << pxlap::to_json(r).dump() << '\n';
    records.push_back(std::move(r));
  }
  if (a.output) pxlap::write_reports(*a.output, records, ordered_json{{"command", "barrier-scan"}});
  return 0;
}

int cmd_structure_check(const std::string& config_path, const Overrides& o) {
  pxlap::RunConfig cfg = config_from(config_path, o);
  std::vector<pxlap::CheckDescriptor> structure;
  for (const auto& c : cfg.checks) {
    if (c.type == "structure") structure.push_back(c);
  }
  if (structure.empty()) structure.push_back({"structure", json{{"type", "structure"}}});
  cfg.checks = structure;
  const pxlap::RunOutcome out = pxlap::run(cfg, std::cerr);
  for (const auto& r : out.records) std::cout << pxlap::to_json(r).dump() << '\n';
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-exponent p(x)-Laplacian solver and estimate checker"};
  app.require_subcommand(1);

  Overrides o;
  std::string config;

  auto* solve = app.add_subcommand("solve", "Solve the Dirichlet problem described by a config");
  solve->add_option("-c,--config", config, "JSON config")->required()->check(CLI::ExistingFile);
  solve->add_option("-o,--output", o.output, "Output directory");
  solve->add_option("--solution", o.solution, "Solution PXGRID path");
  add_problem_flags(solve, o);

  auto* verify = app.add_subcommand("verify", "Run the checks listed in a config and write reports");
  verify->add_option("-c,--config", config, "JSON config")->required()->check(CLI::ExistingFile);
  verify->add_option("-o,--output", o.output, "Report directory");
  verify->add_option("--seed", o.seed, "Seed for sampled checks");
  verify->add_option("--solution", o.solution, "Use this PXGRID solution instead of solving");
  add_problem_flags(verify, o);

  std::string grid_path;
  std::optional<double> norm_p;
  std::optional<std::string> norm_config;
  std::string norm_kind = "luxemburg";
  std::optional<double> norm_q;
  double norm_tol = 1e-12;
  auto* norm = app.add_subcommand("norm", "Norm of a PXGRID grid function");
  norm->add_option("-g,--grid", grid_path, "PXGRID file")->required()->check(CLI::ExistingFile);
  norm->add_option("--p", norm_p, "Constant exponent");
  norm->add_option("-c,--config", norm_config, "Config whose exponent section is used")->check(CLI::ExistingFile);
  norm->add_option("--kind", norm_kind, "luxemburg, sobolev or lq")
      ->check(CLI::IsMember({"luxemburg", "sobolev", "lq"}));
  norm->add_option("--q", norm_q, "Exponent for --kind lq");
  norm->add_option("--tol", norm_tol, "Relative bisection tolerance")->check(CLI::PositiveNumber);

  BarrierArgs barrier;
  auto* scan = app.add_subcommand("barrier-scan", "Subsolution scan of the Gaussian annulus barrier");
  scan->add_option("--dim", barrier.dim, "Space dimension")->check(CLI::PositiveNumber);
  scan->add_option("--x0", barrier.x0, "Barrier center (default origin)");
  scan->add_option("--delta", barrier.delta, "Outer annulus radius")->check(CLI::PositiveNumber);
  scan->add_option("--mu", barrier.mu, "Decay rate; repeat for a sweep");
  scan->add_option("--a-level", barrier.a_level, "Value on the inner sphere");
  scan->add_option("--resolution", barrier.resolution, "Lattice cells per delta")->check(CLI::PositiveNumber);
  scan->add_option("--reg-eps", barrier.reg_eps, "Gradient regularization");
  scan->add_option("--p", barrier.p, "Constant exponent");
  scan->add_option("-c,--config", barrier.config, "Config whose exponent section is used")
      ->check(CLI::ExistingFile);
  scan->add_option("-o,--output", barrier.output, "Also write reports here");

  auto* structure = app.add_subcommand("structure-check", "Check structure conditions for a flux");
  structure->add_option("-c,--config", config, "JSON config")->required()->check(CLI::ExistingFile);
  structure->add_option("-o,--output", o.output, "Report directory");
  structure->add_option("--seed", o.seed, "Seed for the sample directions");
  structure->add_option("--cells", o.cells, "Cells per axis (overrides domain.cells)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*solve) return cmd_solve(config, o);
    if (*verify) return cmd_verify(config, o);
    if (*norm) return cmd_norm(grid_path, norm_p, norm_config, norm_kind, norm_q, norm_tol);
    if (*scan) return cmd_barrier_scan(barrier);
    if (*structure) return cmd_structure_check(config, o);
  } catch (const pxlap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

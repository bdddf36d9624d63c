#pragma once

// Batch runs: a JSON config describing a Dirichlet problem and a list of
// checks, executed against the discrete solution and written as reports.
//
// Config keys:
//   domain    {lower: [..], upper: [..], cells: n | [..]}
//   exponent  {kind: constant|affine|radial|piecewise|grid, ...}
//   rhs       {constant: v} | {file: path}
//   boundary  {kind: constant|affine|positive_part|file, ...}
//   solver    {reg_eps, tol, max_iter, continuation_steps}
//   checks    [{type: <name>, ...params}]
//   output    report directory
//   seed      integer
//   solution_file  optional PXGRID file used instead of solving

#include "pxlap/exponent_field.hpp"
#include "pxlap/pde_solver.hpp"
#include "pxlap/report.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pxlap {

/// Malformed config: unknown keys' values, wrong types, unknown check names.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// harnack, weak-harnack, caccioppoli, holder, local-bound, barrier,
/// max-principle, hopf, structure, norm.
const std::vector<std::string>& check_names();

struct CheckDescriptor {
  std::string type;
  nlohmann::json params;
};

struct RunConfig {
  nlohmann::json problem = nlohmann::json::object();  ///< domain, exponent, rhs, boundary, solver
  std::vector<CheckDescriptor> checks;
  std::string output = "reports";
  std::uint64_t seed = 0;
  std::optional<std::string> solution_file;
  std::filesystem::path base_dir = ".";  ///< relative file paths resolve against this
};

RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::string& path);
nlohmann::json load_json(const std::string& path);

Grid build_grid(const nlohmann::json& problem);
ExponentField build_field(const nlohmann::json& problem, const std::filesystem::path& base_dir = ".");
ProblemSpec build_problem(const RunConfig& config);

/// Reads a number, accepting "inf" / "infinity" strings.
double json_number(const nlohmann::json& value);

struct RunOutcome {
  int exit_code = 0;  ///< 0 when every check ran, 1 otherwise
  std::vector<CheckRecord> records;
  std::vector<std::string> errors;  ///< "<check>: <message>" per failed check
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

/// Runs every check in order. Check errors are collected, not rethrown.
RunOutcome run_checks(const RunConfig& config, std::ostream& diag);
/// run_checks followed by write_reports into config.output.
RunOutcome run(const RunConfig& config, std::ostream& diag);

}  // namespace pxlap

#pragma once

// Check records and their JSON / CSV serialization.
//
// Report bodies carry no timestamps; run metadata goes to metadata.json so
// identical inputs give byte-identical reports.

#include "pxlap/grid.hpp"

#include <json.hpp>

#include <optional>
#include <utility>
#include <string>
#include <vector>

namespace pxlap {

struct CheckRecord {
  explicit CheckRecord(std::string name, std::optional<Point> at = std::nullopt,
                       std::optional<double> r = std::nullopt)
      : check(std::move(name)), center(std::move(at)), radius(r) {}

  std::string check;
  std::optional<Point> center;
  std::optional<double> radius;
  std::optional<double> lhs;
  std::optional<double> rhs;
  std::optional<double> ratio;
  std::optional<double> p_minus;
  std::optional<double> p_plus;
  std::optional<double> mu;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

nlohmann::ordered_json to_json(const CheckRecord& record);

/// check,center,R,lhs,rhs,ratio,p_minus,p_plus,mu
std::string csv_header();
/// Center coordinates joined by ';', empty fields for absent values.
std::string csv_row(const CheckRecord& record);

/// Writes <dir>/<NN>_<check>.json per record, <dir>/report.csv and <dir>/metadata.json.
void write_reports(const std::string& dir, const std::vector<CheckRecord>& records,
                   const nlohmann::ordered_json& metadata);

/// Minimal JSON-schema subset: type, required, properties, additionalProperties
/// (boolean), items, enum, minimum. Returns one message per failure.
std::vector<std::string> validate_schema(const nlohmann::json& instance, const nlohmann::json& schema,
                                         const std::string& path = "$");

}  // namespace pxlap

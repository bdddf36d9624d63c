#include "pxlap/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace pxlap {

namespace {

nlohmann::ordered_json number_or_null(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

std::string csv_field(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

}  // namespace

nlohmann::ordered_json to_json(const CheckRecord& record) {
  nlohmann::ordered_json j;
  j["check"] = record.check;
  if (record.center) {
    j["center"] = std::vector<double>(record.center->data(), record.center->data() + record.center->size());
  } else {
    j["center"] = nullptr;
  }
  j["R"] = number_or_null(record.radius);
  j["lhs"] = number_or_null(record.lhs);
  j["rhs"] = number_or_null(record.rhs);
  j["ratio"] = number_or_null(record.ratio);
  j["p_minus"] = number_or_null(record.p_minus);
  j["p_plus"] = number_or_null(record.p_plus);
  j["mu"] = number_or_null(record.mu);
  j["details"] = record.details;
  return j;
}

std::string csv_header() { return "check,center,R,lhs,rhs,ratio,p_minus,p_plus,mu"; }

std::string csv_row(const CheckRecord& r) {
  std::string center;
  if (r.center) {
    for (Index k = 0; k < r.center->size(); ++k) {
      if (k > 0) center += ';';
      center += format_number((*r.center)[k]);
    }
  }
  std::ostringstream out;
  out << csv_escape(r.check) << ',' << center << ',' << csv_field(r.radius) << ',' << csv_field(r.lhs) << ','
      << csv_field(r.rhs) << ',' << csv_field(r.ratio) << ',' << csv_field(r.p_minus) << ','
      << csv_field(r.p_plus) << ',' << csv_field(r.mu);
  return out.str();
}

void write_reports(const std::string& dir, const std::vector<CheckRecord>& records,
                   const nlohmann::ordered_json& metadata) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);
  std::string csv = csv_header() + "\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::ostringstream name;
    name << std::setw(2) << std::setfill('0') << i << '_' << records[i].check << ".json";
    write_file(root / name.str(), to_json(records[i]).dump(2) + "\n");
    csv += csv_row(records[i]) + "\n";
  }
  write_file(root / "report.csv", csv);
  write_file(root / "metadata.json", metadata.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

namespace {

bool type_matches(const nlohmann::json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "number") return v.is_number();
  if (type == "integer") return v.is_number_integer() || v.is_number_unsigned();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  throw std::invalid_argument("validate_schema: unsupported type '" + type + "'");
}

}  // namespace

std::vector<std::string> validate_schema(const nlohmann::json& instance, const nlohmann::json& schema,
                                         const std::string& path) {
  std::vector<std::string> errors;
  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_array()) {
      for (const auto& t : *it) ok = ok || type_matches(instance, t.get<std::string>());
    } else {
      ok = type_matches(instance, it->get<std::string>());
    }
    if (!ok) {
      errors.push_back(path + ": expected type " + it->dump());
      return errors;
    }
  }
  if (auto it = schema.find("enum"); it != schema.end()) {
    bool found = false;
    for (const auto& e : *it) found = found || e == instance;
    if (!found) errors.push_back(path + ": value " + instance.dump() + " not in enum");
  }
  if (auto it = schema.find("minimum"); it != schema.end() && instance.is_number()) {
    if (instance.get<double>() < it->get<double>()) errors.push_back(path + ": below minimum " + it->dump());
  }
  if (instance.is_object()) {
    if (auto it = schema.find("required"); it != schema.end()) {
      for (const auto& key : *it) {
        if (!instance.contains(key.get<std::string>())) {
          errors.push_back(path + ": missing required property '" + key.get<std::string>() + "'");
        }
      }
    }
    const auto props = schema.find("properties");
    for (const auto& [key, value] : instance.items()) {
      if (props != schema.end() && props->contains(key)) {
        auto sub = validate_schema(value, (*props)[key], path + "." + key);
        errors.insert(errors.end(), sub.begin(), sub.end());
      } else if (auto ap = schema.find("additionalProperties"); ap != schema.end() && ap->is_boolean() && !*ap) {
        errors.push_back(path + ": unexpected property '" + key + "'");
      }
    }
  }
  if (instance.is_array()) {
    if (auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = 0; i < instance.size(); ++i) {
        auto sub = validate_schema(instance[i], *it, path + "[" + std::to_string(i) + "]");
        errors.insert(errors.end(), sub.begin(), sub.end());
      }
    }
  }
  return errors;
}

}  // namespace pxlap

#include "coverlock/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace coverlock {

namespace {

nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidInput, "cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidInput, std::string("malformed JSON: ") + e.what());
  }
  return doc;
}

std::vector<double> number_array(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    throw Error(ErrorKind::kInvalidInput, std::string("missing array field: ") + key);
  }
  std::vector<double> out;
  out.reserve(doc[key].size());
  for (const auto& item : doc[key]) {
    if (!item.is_number()) {
      throw Error(ErrorKind::kInvalidInput, std::string("non-numeric entry in ") + key);
    }
    out.push_back(item.get<double>());
  }
  return out;
}

double number_field(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number()) {
    throw Error(ErrorKind::kInvalidInput, std::string("missing numeric field: ") + key);
  }
  return doc[key].get<double>();
}

}  // namespace

LoadedInstance load_instance_json(const std::string& path) {
  const nlohmann::json doc = parse_json_file(path);
  if (doc.contains("schema") && doc["schema"].is_number_integer() &&
      doc["schema"].get<int>() != 1) {
    throw Error(ErrorKind::kInvalidInput, "unsupported schema version");
  }

  LoadedInstance loaded;
  loaded.instance.values = number_array(doc, "values");
  loaded.instance.costs = number_array(doc, "costs");

  const bool has_totals = doc.contains("budget") || doc.contains("coverage_floor");
  const bool has_shares = doc.contains("budget_per_capita") || doc.contains("coverage_share");
  if (has_totals && has_shares) {
    throw Error(ErrorKind::kInvalidInput, "mix of total and per-capita constraint fields");
  }
  const auto n = static_cast<std::int64_t>(loaded.instance.values.size());
  if (has_shares) {
    loaded.from_per_capita = true;
    loaded.budget_per_capita = number_field(doc, "budget_per_capita");
    loaded.coverage_share = number_field(doc, "coverage_share");
    if (loaded.coverage_share < 0.0 || loaded.coverage_share > 1.0) {
      throw Error(ErrorKind::kInvalidInput, "coverage_share must lie in [0,1]");
    }
    loaded.instance.budget = static_cast<double>(n) * loaded.budget_per_capita;
    loaded.instance.coverage_floor = coverage_floor_from_share(n, loaded.coverage_share);
  } else {
    loaded.instance.budget = number_field(doc, "budget");
    if (!doc.contains("coverage_floor") || !doc["coverage_floor"].is_number_integer()) {
      throw Error(ErrorKind::kInvalidInput, "missing integer field: coverage_floor");
    }
    loaded.instance.coverage_floor = doc["coverage_floor"].get<std::int64_t>();
  }
  validate_instance(loaded.instance);
  return loaded;
}

CsvUnits load_units_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidInput, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || (line != "value,cost" && line != "value,cost\r")) {
    throw Error(ErrorKind::kInvalidInput, "CSV instance must start with header `value,cost`");
  }
  CsvUnits units;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string value_text, cost_text;
    if (!std::getline(fields, value_text, ',') || !std::getline(fields, cost_text)) {
      throw Error(ErrorKind::kInvalidInput, "row " + std::to_string(row) + ": expected value,cost");
    }
    try {
      std::size_t used = 0;
      units.values.push_back(std::stod(value_text, &used));
      units.costs.push_back(std::stod(cost_text, &used));
    } catch (const std::exception&) {
      throw Error(ErrorKind::kInvalidInput, "row " + std::to_string(row) + ": non-numeric entry");
    }
  }
  return units;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kInvalidInput, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorKind::kInvalidInput, "failed writing " + path);
}

}  // namespace coverlock

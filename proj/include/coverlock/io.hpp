#ifndef COVERLOCK_IO_HPP
#define COVERLOCK_IO_HPP

#include <string>
#include <vector>

#include "coverlock/instance.hpp"

namespace coverlock {

struct LoadedInstance {
  ProblemInstance instance;
  bool from_per_capita = false;  // constraints arrived as (C, rho) and were converted
  double budget_per_capita = 0.0;
  double coverage_share = 0.0;
};

// JSON schema (version 1), totals form:
//   {"schema":1,"values":[...],"costs":[...],"budget":12.0,"coverage_floor":2}
// or per-capita form with "budget_per_capita" and "coverage_share" instead.
LoadedInstance load_instance_json(const std::string& path);

struct CsvUnits {
  std::vector<double> values;
  std::vector<double> costs;
};

// CSV instance: header line `value,cost`, one unit per row. Budget and
// coverage arrive separately as CLI flags.
CsvUnits load_units_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace coverlock

#endif  // COVERLOCK_IO_HPP

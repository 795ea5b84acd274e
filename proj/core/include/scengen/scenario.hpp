// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SCENGEN_SCENARIO_HPP_
#define SCENGEN_SCENARIO_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace scengen {

// Raised on malformed data files, inconsistent probability vectors and
// selection maps that reference unknown scenario indices.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A discrete distribution over |N| scenarios of |I| parameters.
// values[i][n] is the value of parameter i in scenario n.
struct ScenarioSet {
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;
  std::vector<double> prob;

  int num_params() const { return static_cast<int>(names.size()); }
  int num_scenarios() const { return static_cast<int>(prob.size()); }

  // Throws DataError unless the shape is consistent, every probability is
  // nonnegative and the probabilities sum to 1 within 1e-9.
  void validate() const;
};

// Builds an equiprobable set (p = 1/N each) over the given value rows.
ScenarioSet make_equiprobable(std::vector<std::string> names,
                              std::vector<std::vector<double>> values);

// CSV layout: one column per parameter plus a trailing `probability` column,
// one row per scenario. Values are written shortest-round-trip, so a write
// followed by a read reproduces the set bit for bit. Readers also accept
// files without the probability column (historical observations) and assign
// 1/N to each row.
ScenarioSet read_scenario_csv(const std::string& path);
ScenarioSet parse_scenario_csv(const std::string& text);
void write_scenario_csv(const ScenarioSet& set, const std::string& path);
std::string scenario_csv_string(const ScenarioSet& set);

}  // namespace scengen

#endif  // SCENGEN_SCENARIO_HPP_

// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#include "scengen/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>

namespace scengen {
namespace {

std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_value(const std::string& field, std::size_t row) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  while (ptr != last && (*ptr == ' ' || *ptr == '\t')) ++ptr;
  if (ec != std::errc() || ptr != last)
    throw DataError("row " + std::to_string(row) + ": bad number '" + field +
                    "'");
  return v;
}

}  // namespace

void ScenarioSet::validate() const {
  if (names.empty()) throw DataError("scenario set has no parameters");
  if (prob.empty()) throw DataError("scenario set has no scenarios");
  if (values.size() != names.size())
    throw DataError("value rows do not match parameter names");
  for (const auto& row : values)
    if (row.size() != prob.size())
      throw DataError("value row length does not match scenario count");
  double total = 0.0;
  for (double p : prob) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw DataError("negative or non-finite probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw DataError("probabilities sum to " + fmt_double(total) +
                    ", expected 1");
}

ScenarioSet make_equiprobable(std::vector<std::string> names,
                              std::vector<std::vector<double>> values) {
  ScenarioSet set;
  set.names = std::move(names);
  set.values = std::move(values);
  std::size_t n = set.values.empty() ? 0 : set.values.front().size();
  set.prob.assign(n, n ? 1.0 / static_cast<double>(n) : 0.0);
  set.validate();
  return set;
}

ScenarioSet parse_scenario_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file");
  std::vector<std::string> header = split_fields(line);
  bool has_prob = !header.empty() && header.back() == "probability";
  std::size_t n_params = header.size() - (has_prob ? 1 : 0);
  if (n_params == 0) throw DataError("no parameter columns");

  ScenarioSet set;
  set.names.assign(header.begin(), header.begin() + n_params);
  set.values.resize(n_params);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size())
      throw DataError("row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    for (std::size_t i = 0; i < n_params; ++i)
      set.values[i].push_back(parse_value(fields[i], row));
    if (has_prob) set.prob.push_back(parse_value(fields.back(), row));
  }
  if (!has_prob) {
    std::size_t n = set.values.front().size();
    set.prob.assign(n, n ? 1.0 / static_cast<double>(n) : 0.0);
  }
  set.validate();
  return set;
}

ScenarioSet read_scenario_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_csv(buf.str());
}

std::string scenario_csv_string(const ScenarioSet& set) {
  set.validate();
  std::string out;
  for (const auto& name : set.names) {
    if (name.empty() || name == "probability" ||
        name.find_first_of(",\r\n\"") != std::string::npos)
      throw DataError("unusable parameter name '" + name + "'");
    out += name;
    out += ',';
  }
  out += "probability\n";
  for (int n = 0; n < set.num_scenarios(); ++n) {
    for (int i = 0; i < set.num_params(); ++i) {
      out += fmt_double(set.values[i][n]);
      out += ',';
    }
    out += fmt_double(set.prob[n]);
    out += '\n';
  }
  return out;
}

void write_scenario_csv(const ScenarioSet& set, const std::string& path) {
  std::string text = scenario_csv_string(set);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << text;
}

}  // namespace scengen

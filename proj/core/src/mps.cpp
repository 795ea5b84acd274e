// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#include "scengen/mps.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_set>

namespace scengen {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void check_name(const std::string& name, const char* what,
                std::unordered_set<std::string>& seen) {
  if (name.empty()) {
    throw MpsNamingError(std::string("unnamed ") + what +
                         " cannot be written to MPS");
  }
  for (char c : name) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      throw MpsNamingError(std::string(what) + " name '" + name +
                           "' contains whitespace");
    }
  }
  if (!seen.insert(name).second) {
    throw MpsNamingError(std::string("duplicate ") + what + " name '" + name +
                         "'");
  }
}

// Field layout of classic fixed MPS; long names overflow their field and
// push the rest of the line right, separated by single spaces.
void pad_to(std::string& line, std::size_t column) {
  if (line.size() + 1 > column) {
    line += ' ';
  } else {
    line.append(column - 1 - line.size(), ' ');
  }
}

std::string entry_line(const std::string& a, const std::string& b,
                       const std::string& value) {
  std::string line = "    ";
  line += a;
  pad_to(line, 15);
  line += b;
  pad_to(line, 25);
  line += value;
  return line;
}

std::string bound_line(const char* type, const std::string& var,
                       const std::string& value = "") {
  std::string line = " ";
  line += type;
  line += "  BND";
  pad_to(line, 15);
  line += var;
  if (!value.empty()) {
    pad_to(line, 25);
    line += value;
  }
  return line;
}

}  // namespace

std::string write_mps_string(const Model& model,
                             const std::string& problem_name) {
  std::unordered_set<std::string> var_names;
  std::unordered_set<std::string> row_names;
  row_names.insert("OBJ");
  for (const Variable& v : model.vars()) check_name(v.name, "variable", var_names);
  for (const RowDef& r : model.rows()) check_name(r.name, "row", row_names);

  std::string out;
  out.reserve(1024 + 64 * (model.num_rows() + model.num_vars()));

  out += "NAME          " + problem_name + "\n";
  out += "OBJSENSE\n";
  out += model.sense() == ObjSense::kMaximize ? "    MAX\n" : "    MIN\n";

  out += "ROWS\n";
  out += " N  OBJ\n";
  for (const RowDef& r : model.rows()) {
    switch (r.rel) {
      case Relation::kLessEqual:
        out += " L  ";
        break;
      case Relation::kGreaterEqual:
        out += " G  ";
        break;
      case Relation::kEqual:
        out += " E  ";
        break;
    }
    out += r.name + "\n";
  }

  // Column-major coefficient lists in declaration order.
  std::vector<std::vector<std::pair<int, double>>> col_entries(model.num_vars());
  for (int r = 0; r < model.num_rows(); ++r) {
    for (const LinearTerm& t : model.row(r).terms) {
      if (t.coef != 0.0) col_entries[t.var].push_back({r, t.coef});
    }
  }

  out += "COLUMNS\n";
  bool in_integer_block = false;
  int marker_count = 0;
  for (int j = 0; j < model.num_vars(); ++j) {
    const Variable& v = model.var(j);
    const bool is_int = v.kind == VarKind::kBinary;
    if (is_int != in_integer_block) {
      std::string marker = "    MARKER";
      pad_to(marker, 15);
      marker += "'MARKER'";
      pad_to(marker, 40);
      marker += in_integer_block ? "'INTEND'" : "'INTORG'";
      out += marker + "\n";
      in_integer_block = is_int;
      ++marker_count;
    }
    const double obj = model.objective()[j];
    if (obj != 0.0 || col_entries[j].empty()) {
      out += entry_line(v.name, "OBJ", fmt_double(obj)) + "\n";
    }
    for (const auto& [row, coef] : col_entries[j]) {
      out += entry_line(v.name, model.row(row).name, fmt_double(coef)) + "\n";
    }
  }
  if (in_integer_block) {
    std::string marker = "    MARKER";
    pad_to(marker, 15);
    marker += "'MARKER'";
    pad_to(marker, 40);
    marker += "'INTEND'";
    out += marker + "\n";
  }

  out += "RHS\n";
  for (const RowDef& r : model.rows()) {
    if (r.rhs != 0.0) {
      out += entry_line("RHS", r.name, fmt_double(r.rhs)) + "\n";
    }
  }

  out += "RANGES\n";

  out += "BOUNDS\n";
  for (int j = 0; j < model.num_vars(); ++j) {
    const Variable& v = model.var(j);
    const bool lo_finite = std::isfinite(v.lower);
    const bool up_finite = std::isfinite(v.upper);
    if (v.kind == VarKind::kBinary) {
      if (v.lower == 0.0 && v.upper == 1.0) {
        out += bound_line("BV", v.name) + "\n";
      } else {
        out += bound_line("LI", v.name, fmt_double(v.lower)) + "\n";
        out += bound_line("UI", v.name, fmt_double(v.upper)) + "\n";
      }
      continue;
    }
    if (lo_finite && up_finite && v.lower == v.upper) {
      out += bound_line("FX", v.name, fmt_double(v.lower)) + "\n";
      continue;
    }
    if (!lo_finite && !up_finite) {
      out += bound_line("FR", v.name) + "\n";
      continue;
    }
    if (!lo_finite) {
      out += bound_line("MI", v.name) + "\n";
    } else if (v.lower != 0.0) {
      out += bound_line("LO", v.name, fmt_double(v.lower)) + "\n";
    }
    if (up_finite) {
      out += bound_line("UP", v.name, fmt_double(v.upper)) + "\n";
    }
  }

  out += "ENDATA\n";
  return out;
}

void write_mps(const Model& model, const std::string& path,
               const std::string& problem_name) {
  const std::string text = write_mps_string(model, problem_name);
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw ModelError("cannot open '" + path + "' for writing");
  }
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace scengen

// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SCENGEN_MPS_HPP_
#define SCENGEN_MPS_HPP_

#include <string>

#include "scengen/model.hpp"

namespace scengen {

// Signaled for empty, duplicated or whitespace-carrying names, which the
// fixed MPS layout cannot represent unambiguously.
class MpsNamingError : public ModelError {
 public:
  using ModelError::ModelError;
};

// Renders the model in fixed MPS with an OBJSENSE section. Ordering is the
// declaration order of rows and variables, numbers use the shortest
// representation that parses back to the identical double, and integer
// columns are wrapped in INTORG/INTEND markers plus BV bound lines. Lazy
// rows are exported as plain rows (the flag is a solver hint, not part of
// the exchange format).
std::string write_mps_string(const Model& model,
                             const std::string& problem_name = "SCENGEN");

// Writes write_mps_string output to `path` (binary stream, \n line ends).
void write_mps(const Model& model, const std::string& path,
               const std::string& problem_name = "SCENGEN");

}  // namespace scengen

#endif  // SCENGEN_MPS_HPP_

#pragma once

#include <string>
#include <vector>

#include "equipart/constraint_model.hpp"
#include "json.hpp"

namespace equipart {

// A literature value (or interval) of the minimal dimension for one instance.
// These are transcribed reference data and are never recomputed here; several
// of them rest on arguments beyond the GF(2) criterion.
struct KnownValue {
  std::string id;
  std::string statement;
  ConstraintProblem problem;
  int lower;
  int upper;
  std::string citation;

  bool exact() const { return lower == upper; }
  nlohmann::json to_json() const;
};

// Parametrized families are expanded for q = 0..3.
const std::vector<KnownValue>& known_value_table();

std::vector<const KnownValue*> lookup_known(const ConstraintProblem& p);

}  // namespace equipart

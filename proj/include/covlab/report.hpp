#pragma once

#include <string>

#include "covlab/spec.hpp"

namespace covlab {

/// Outcome of one certified precondition.
struct Hypothesis {
  std::string name;
  bool pass = true;
  json witness;  // null on pass

  json to_json() const {
    json j{{"name", name}, {"verdict", pass ? "pass" : "fail"}};
    if (!witness.is_null()) j["witness"] = witness;
    return j;
  }
};

}  // namespace covlab

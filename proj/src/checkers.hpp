#pragma once

#include <map>
#include <string>

#include "covlab/theorem_suite.hpp"

namespace covlab::detail {

std::map<std::string, Checker> builtin_checkers();

}  // namespace covlab::detail

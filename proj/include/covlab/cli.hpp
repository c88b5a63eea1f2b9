#pragma once

#include <ostream>

namespace covlab {

/// Exit codes: 0 when no FAIL verdict, 1 on FAIL, 2 on usage or configuration errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace covlab

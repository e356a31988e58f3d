#pragma once

#include <ostream>

namespace pyraquad::cli {

/// Runs the command line front end. Results go to `out`, structured error
/// JSON to `err`. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pyraquad::cli

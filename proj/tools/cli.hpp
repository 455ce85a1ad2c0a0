#pragma once

#include <iosfwd>

namespace modpoly::cli {

/// Runs the modpoly command line. Errors are reported as one line
/// "error: <kind>: <message>" on err with a nonzero return value.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace modpoly::cli

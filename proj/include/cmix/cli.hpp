#pragma once

#include <iosfwd>

namespace cmix {

/// Entry point of the cmix executable. Returns 0 on success, 1 on invalid
/// input or a failed run, 2 on a command-line usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cmix

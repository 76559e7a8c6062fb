#pragma once

#include <iosfwd>

namespace thermosense::cli {

/// Exit codes: 0 success, 1 validation failure, 2 configuration error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace thermosense::cli

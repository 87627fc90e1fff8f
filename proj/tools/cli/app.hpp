#pragma once

#include <iosfwd>

namespace sharpfid::cli {

/// Exit codes: 0 success, 2 invalid input, 3 numerical failure,
/// 1 anything unexpected (for example an unwritable output path).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sharpfid::cli

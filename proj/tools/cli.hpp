#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hurwitz::cli {

/// Exit codes: 0 verdict computed (negative verdicts included), 1 other
/// operational error, 2 parse error, 3 backend mismatch, 4 solver failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hurwitz::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scalemix::cli {

/// Exit codes: 0 success, 1 a verification check failed, 2 usage or input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One number per line; blank lines and lines starting with '#' are skipped.
/// Throws scalemix::Error naming the offending line.
std::vector<double> read_data(std::istream& in);

}  // namespace scalemix::cli

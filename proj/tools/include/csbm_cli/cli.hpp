#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace csbm::cli {

/// Exit codes: 0 success, 2 usage or configuration error, 3 numeric failure.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience for tests; args excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace csbm::cli

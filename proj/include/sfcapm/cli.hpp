#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sfcapm {

// Command-line entry point; args excludes the program name. Subcommands:
// moments, calibrate, price, classify, simulate, curves, check.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace sfcapm

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace memograph::cli {

enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kArgumentError = 2,
  kNoConfidentMatch = 3,
  kIoError = 4,
  kRemoteError = 5,
};

// Runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
// Same, reading interactive answers from `in` instead of stdin.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

// "1-20", "1,2,5", "1-5,10"
std::vector<std::size_t> parse_sizes(const std::string& text);

}  // namespace memograph::cli

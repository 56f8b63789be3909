#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jafit::cli {

/// Exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one CLI invocation; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace jafit::cli

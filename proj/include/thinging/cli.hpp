#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace thinging {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kInvalid = 1;  // validation errors in an input model
inline constexpr int kUsage = 2;    // bad usage, unreadable file, bad scenario
inline constexpr int kSimulation = 3;
}  // namespace exit_code

/// Entry point of the `tm` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace thinging

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coxcheck::cli {

inline constexpr int kPass = 0;
inline constexpr int kFail = 1;
inline constexpr int kPartial = 2;
inline constexpr int kUsage = 64;
inline constexpr int kParse = 65;

/// Runs one command. `args` excludes the program name. Text goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coxcheck::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDiagnostics = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

/// Entry point with injectable streams; `-` as an input reads `in`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace cdc::cli

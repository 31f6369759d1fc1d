#pragma once

namespace gpass::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDataError = 1;
inline constexpr int kUsage = 2;

int run(int argc, char** argv);

}  // namespace gpass::cli

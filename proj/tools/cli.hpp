#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mrts::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsageError = 2;

// Runs one invocation. args excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace mrts::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsvqa::cli {

// Exit statuses. Library failures exit with kLibraryErrorBase plus the
// numeric ErrorCode, so each error class has its own status.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kLibraryErrorBase = 10;

// args excludes the program name. Structured records go to out, diagnostics
// and the human-readable summary to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tsvqa::cli

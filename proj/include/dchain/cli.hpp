#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dchain::cli {

// Exit codes: 0 success (all requested checks pass), 1 a check failed or an
// evaluation error, 2 usage error / unknown name, 3 size guard refused.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitGuard = 3;

std::string version();
// DCHAIN_SEED if set and parseable, else 1.
std::uint64_t default_seed();

std::vector<std::string> quantity_names();         // for `exact --quantity`
std::vector<std::string> signed_quantity_names();  // for `signed --quantity`

// args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dchain::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace synpid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation; args[0] is the program name. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Symbol columns of a CSV with a header row; each column is mapped to a
/// dense alphabet in first-seen order.
struct SymbolTable {
    std::vector<std::string> names;
    std::vector<std::vector<std::uint32_t>> columns;
    std::vector<std::vector<long long>> alphabets;  // dense index -> raw value
};

/// Throws std::runtime_error on ragged rows or non-integer cells.
SymbolTable read_symbol_csv(std::istream& in);

/// Full analysis of `destination` against `sources` with history length k.
/// The counted distribution snapshot is included under "distribution".
nlohmann::json analyze(const SymbolTable& table, const std::string& destination,
                       const std::vector<std::string>& sources, int k);

} // namespace synpid::cli

#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace pgr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/// Parses and runs one subcommand (ingest, extract, consolidate, query, chat,
/// benchgen, eval, trace show). Returns 0 on success, 1 on a domain error,
/// 2 on a usage error. `in` feeds the chat REPL.
int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr,
                std::istream& in = std::cin);

int run_command(int argc, const char* const* argv);

}  // namespace pgr

#pragma once

#include "lossrj/cli/config.hpp"

#include <iosfwd>
#include <string>

namespace lossrj::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;

/// Runs one command with an already resolved configuration tree. Outputs are
/// written to a staging directory and moved into place only on success.
int run_command(const std::string& command, const json& tree, std::ostream& log);

/// Full command-line entry point.
int main_entry(int argc, char** argv);

std::string sha256_file(const std::filesystem::path& path);

} // namespace lossrj::cli

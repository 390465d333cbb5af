#pragma once

// Batch driver: compile, validate, simulate and skybox subcommands.
// Exit codes: 0 success, 1 error diagnostics (or warnings under --strict,
// or an incomplete simulation), 2 I/O failure.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace mural2scene {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDiagnostics = 1;
inline constexpr int kExitIo = 2;

struct CliConfig {
  std::filesystem::path manifest;
  std::filesystem::path out;
  int downsample = 1;
  std::optional<std::uint64_t> seed;
  bool strict = false;
  std::filesystem::path script;
};

int cmd_compile(const CliConfig &cfg, std::ostream &out, std::ostream &err);
int cmd_validate(const CliConfig &cfg, std::ostream &out, std::ostream &err);
int cmd_simulate(const CliConfig &cfg, std::ostream &out, std::ostream &err);
int cmd_skybox(const CliConfig &cfg, std::ostream &out, std::ostream &err);

/// Parses argv and dispatches to a subcommand.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace mural2scene

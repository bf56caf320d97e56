#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swave/harness.hpp"

namespace swave {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

/// Everything a command needs: the experiment plus run plumbing.
struct RunConfig {
  VeryWeakProblem problem;
  /// Offset of the second kernel for the uniqueness command.
  double kernel_b_offset = 0.4;
  /// "free", "general_s" or "s_equals_1"; empty picks one from the problem.
  std::string estimate_variant;
  std::string out = "out";
  std::uint64_t seed = 0;

  bool operator==(const RunConfig& other) const;
};

RunConfig default_config();

/// Throws InvalidArgument on unknown keys, wrong types or a foreign schema version.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

/// Reads and parses a config file. Malformed JSON is reported with its line
/// and column.
RunConfig load_config(const std::filesystem::path& path);

struct ConfigOverrides {
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> grid;
  std::optional<std::size_t> modes;
  std::optional<double> dt;
  std::optional<double> eps0;
  std::optional<double> eps_ratio;
  std::optional<std::size_t> eps_count;
};

/// Any epsilon flag regenerates a geometric list, taking unset parts from the
/// current list (first entry, ratio of the first two, length).
void apply_overrides(RunConfig& cfg, const ConfigOverrides& o);

/// Command bodies. Each validates the config before computing and writes its
/// files into cfg.out.
void cmd_eigen(const RunConfig& cfg);
void cmd_solve(const RunConfig& cfg);
void cmd_net(const RunConfig& cfg);
void cmd_uniqueness(const RunConfig& cfg);
void cmd_consistency(const RunConfig& cfg);

/// Full command-line entry point. Returns 0 on success, 2 on configuration
/// errors and 3 on numerical failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace swave

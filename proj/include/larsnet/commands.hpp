#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "larsnet/config.hpp"
#include "larsnet/montecarlo.hpp"

namespace larsnet {

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_number_list(const std::string& text, const std::string& flag);

// Fixed-schema writers. Both are pure functions of their inputs.
std::string sweep_csv(const std::vector<SweepPoint>& points, const ScenarioConfig& config,
                      bool single_arm = false);
std::string compare_csv(const std::vector<ComparisonRow>& rows);

struct CommandResult {
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;
};

// `overrides` is echoed into the JSON summary as given.
CommandResult sweep_command(const ScenarioConfig& config, const std::filesystem::path& output_dir,
                            const nlohmann::json& overrides, const RunOptions& options);

CommandResult compare_command(const ScenarioConfig& config, const std::filesystem::path& output_dir,
                              const nlohmann::json& overrides, const RunOptions& options);

CommandResult heatmap_command(const ScenarioConfig& config, const std::filesystem::path& output_dir,
                              const nlohmann::json& overrides, const RunOptions& options);

CommandResult density_command(const ScenarioConfig& config, double edp_target,
                              const std::filesystem::path& output_dir,
                              const nlohmann::json& overrides, const RunOptions& options);

// Full command-line entry point; returns the process exit status.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace larsnet

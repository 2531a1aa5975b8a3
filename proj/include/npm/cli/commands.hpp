#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "npm/cli/config.hpp"

namespace npm::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kMissingArtifact = 3, kAuditFailure = 4 };

struct CommandOptions {
  std::string profile = "full";
  bool parallel_seeds = false;
  /// N-value checkpoint for learned/soft masks (default: the run's own).
  std::optional<std::filesystem::path> mask;
  /// Policy checkpoint for `evaluate` (default: the run's own).
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::filesystem::path> states;
  std::optional<std::filesystem::path> out;
  bool break_precondition = false;
};

/// Directory holding one run's artifacts: <output_dir>/<run_id>.
std::filesystem::path run_directory(const RunConfig& config);
std::filesystem::path seed_directory(const RunConfig& config, std::uint64_t seed);
/// <seed directory>/<policy tag>: one phase-2 variant's artifacts.
std::filesystem::path policy_directory(const RunConfig& config, std::uint64_t seed);

int cmd_train_mask(const RunConfig& config, const CommandOptions& options);
int cmd_train_policy(const RunConfig& config, const CommandOptions& options);
int cmd_evaluate(const RunConfig& config, const CommandOptions& options);
int cmd_export_matrix(const RunConfig& config, const CommandOptions& options);
int cmd_oracle_verify(const RunConfig& config, const CommandOptions& options);
int cmd_transfer_eval(const RunConfig& config, const CommandOptions& options);
int cmd_plot_data(const RunConfig& config, const CommandOptions& options);

/// Full command line entry point; maps exceptions to exit codes.
int run_main(int argc, char** argv);

}  // namespace npm::cli

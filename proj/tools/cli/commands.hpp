#pragma once

#include "config.hpp"

namespace landscape::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailed = 1,
  kExitPrecondition = 2,
  kExitConfig = 64,
  kExitIo = 74,
};

int cmd_region(const ExperimentConfig& cfg);
int cmd_path(const ExperimentConfig& cfg);
int cmd_infinity(const ExperimentConfig& cfg);
int cmd_train(const ExperimentConfig& cfg);
int cmd_probe(const ExperimentConfig& cfg);
int cmd_embed(const ExperimentConfig& cfg);

}  // namespace landscape::cli

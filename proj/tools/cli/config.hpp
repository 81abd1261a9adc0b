#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "landscape/certify.hpp"

namespace landscape::cli {

/// Bad or missing configuration (exit 64).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable input or unwritable output (exit 74).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  RegionConfig region;

  std::optional<std::filesystem::path> network_file;
  std::optional<std::filesystem::path> data_file;

  std::uint64_t perturb_seed = 3;
  int path_steps = 256;
  double path_epsilon = 1e-4;
  std::vector<int> path_dims;  ///< random start network when no file is given
  int snapshot_stride = 64;

  std::vector<int> infinity_dims{2, 5, 5, 1};
  double infinity_scale = 1.0;
  std::uint64_t infinity_seed = 11;
  std::uint64_t ball_seed = 5;
  int ball_samples = 64;
  bool infinity_flipped = false;

  std::filesystem::path out_dir = "out";
  /// FNV-1a of the config text and every override, hex.
  std::string hash;
};

struct Overrides {
  std::optional<std::uint64_t> seed_data;
  std::optional<double> lambda;
  std::optional<std::string> out;
};

/// Parses a TOML file. Unknown keys are rejected so typos do not pass silently.
ExperimentConfig load_config(const std::filesystem::path& file, const Overrides& overrides);
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                              const Overrides& overrides);

std::string fnv1a_hex(const std::string& text);

}  // namespace landscape::cli

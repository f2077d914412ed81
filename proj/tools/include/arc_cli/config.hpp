#pragma once

// Run configuration for `arc-robust simulate`.
//
// The file is a flat list of `dotted.key = <json value>` lines. Blank lines
// and lines starting with '#' are ignored. Example:
//
//   aggregator = "cwtm+nnm+arc"
//   attacks = "all"
//   seeds = [1, 2, 3]
//   data.classes = 10

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "arc/attacks.hpp"
#include "arc/data.hpp"
#include "arc/trainer.hpp"

namespace arc::cli {

/// Malformed or invalid configuration; the message names the line and key.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct DataConfig {
  enum class Source { Synthetic, Idx };
  Source source = Source::Synthetic;
  int classes = 10;
  std::size_t dim = 10;
  std::size_t per_class = 100;
  std::size_t test_per_class = 50;
  double spread = 0.5;
  std::filesystem::path train_images, train_labels, test_images, test_labels;
};

struct RunConfig {
  /// n, f, aggregator, model, ... ; `attack` and `seed` are filled per run.
  TrainingConfig training;
  /// Empty list means no attack.
  std::vector<AttackKind> attacks;
  std::vector<double> foe_grid = default_foe_grid();
  std::vector<double> alie_grid = default_alie_grid();
  std::vector<std::uint64_t> seeds{1};
  DataConfig data;
  std::filesystem::path output_dir = "out";
  std::size_t threads = 1;
  bool emit_csv = true;
  bool emit_json = true;
  bool emit_plot_data = false;

  /// Training config for one (attack, seed) run; nullopt attack = no attack.
  TrainingConfig for_run(std::optional<AttackKind> attack, std::uint64_t seed) const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Human-readable list of accepted keys, printed on usage errors.
std::string config_schema();

/// Train and test sets for one seed.
std::pair<Dataset, Dataset> build_datasets(const RunConfig& config, std::uint64_t seed);

}  // namespace arc::cli

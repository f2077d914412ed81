#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "arc_cli/config.hpp"

namespace arc::cli {

struct RunResult {
  std::optional<AttackKind> attack;
  std::uint64_t seed = 0;
  MetricsLog log;
  std::string stem;
};

/// All (attack x seed) runs, attack-major, in the configured order.
std::vector<RunResult> simulate_all(const RunConfig& config);

/// Writes per-run CSV / JSON, plot data and the merged summary.json into
/// config.output_dir. Returns the merged summary as JSON text.
std::string write_outputs(const RunConfig& config, const std::vector<RunResult>& results);

/// File stem of one run, e.g. "FOE_cwtm-nnm-arc_seed1".
std::string run_stem(const std::optional<AttackKind>& attack, const std::string& aggregator,
                     std::uint64_t seed);

}  // namespace arc::cli

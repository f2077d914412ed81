#pragma once

#include <filesystem>
#include <string>

#include "arc/trainer.hpp"

namespace arc::cli {

inline constexpr const char* kMetricsHeader =
    "step,attack,aggregator,seed,train_acc,test_acc,loss,clip_threshold,honest_mean_norm,"
    "max_honest_grad_norm,full_grad_norm";

/// %.17g, which round-trips every double.
std::string format_double(double v);

std::string metrics_csv(const MetricsLog& log);
void write_metrics(const MetricsLog& log, const std::filesystem::path& path);

/// Parses the CSV produced by metrics_csv back into a log (records plus
/// attack, aggregator and seed).
MetricsLog parse_metrics_csv(const std::string& text);
MetricsLog read_metrics(const std::filesystem::path& path);

}  // namespace arc::cli

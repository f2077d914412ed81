#include "arc_cli/simulate.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "arc/error.hpp"
#include "arc/parallel.hpp"
#include "arc_cli/metrics_io.hpp"

namespace arc::cli {

using nlohmann::ordered_json;

std::string run_stem(const std::optional<AttackKind>& attack, const std::string& aggregator,
                     std::uint64_t seed) {
  std::string agg = aggregator;
  for (char& c : agg) {
    if (c == '+' || c == ':') c = '-';
  }
  const std::string name = attack ? std::string(attack_name(*attack)) : "none";
  return name + "_" + agg + "_seed" + std::to_string(seed);
}

std::vector<RunResult> simulate_all(const RunConfig& config) {
  std::vector<std::optional<AttackKind>> attacks;
  for (AttackKind k : config.attacks) attacks.emplace_back(k);
  if (attacks.empty()) attacks.emplace_back(std::nullopt);

  std::vector<RunResult> results;
  for (const auto& a : attacks) {
    for (std::uint64_t seed : config.seeds) {
      RunResult r;
      r.attack = a;
      r.seed = seed;
      r.stem = run_stem(a, config.training.aggregator.to_string(), seed);
      results.push_back(std::move(r));
    }
  }

  // Datasets are per seed and shared by every attack.
  std::map<std::uint64_t, std::pair<Dataset, Dataset>> data;
  for (std::uint64_t seed : config.seeds) {
    if (!data.count(seed)) data.emplace(seed, build_datasets(config, seed));
  }

  const std::size_t threads = std::max<std::size_t>(1, config.threads);
  // Parallelise across runs when there are enough of them, otherwise inside
  // each run; outputs are identical either way.
  const bool across_runs = results.size() >= threads && threads > 1;
  parallel_for(results.size(), across_runs ? threads : 1, [&](std::size_t i) {
    RunResult& r = results[i];
    const auto& [train, test] = data.at(r.seed);
    TrainingConfig t = config.for_run(r.attack, r.seed);
    t.threads = across_runs ? 1 : threads;
    t.model.input_dim = train.dim;
    r.log = run(t, train, test);
  });
  return results;
}

namespace {

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json run_json(const RunResult& r) {
  ordered_json j;
  j["attack"] = r.log.attack;
  j["aggregator"] = r.log.aggregator;
  j["seed"] = r.seed;
  j["steps_recorded"] = r.log.records.size();
  j["max_accuracy"] = optional_json(r.log.max_accuracy());
  j["worst_case_max_accuracy"] = optional_json(r.log.max_accuracy());
  j["selected_step"] = r.log.selected_step;
  j["final_loss"] = r.log.records.empty() ? ordered_json(nullptr) : ordered_json(r.log.records.back().loss);
  j["mimic_target"] = r.log.mimic_target ? ordered_json(*r.log.mimic_target) : ordered_json(nullptr);
  j["failed"] = r.log.failed;
  if (r.log.failed) j["failure"] = r.log.failure;
  j["csv"] = r.stem + ".csv";
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) raise(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace

std::string write_outputs(const RunConfig& config, const std::vector<RunResult>& results) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) raise(ErrorCode::Io, "cannot create " + config.output_dir.string() + ": " + ec.message());

  for (const auto& r : results) {
    if (config.emit_csv) write_metrics(r.log, config.output_dir / (r.stem + ".csv"));
    if (config.emit_json) write_text(config.output_dir / (r.stem + ".json"), run_json(r).dump(2) + "\n");
  }

  // Worst case over attacks per seed, then the mean over seeds.
  ordered_json summary;
  summary["aggregator"] = config.training.aggregator.to_string();
  ordered_json per_seed = ordered_json::array();
  double total = 0.0;
  std::size_t counted = 0;
  for (std::uint64_t seed : config.seeds) {
    std::map<std::string, MetricsLog> logs;
    for (const auto& r : results) {
      if (r.seed == seed) logs.emplace(r.log.attack, r.log);
    }
    ordered_json entry;
    entry["seed"] = seed;
    try {
      const double w = worst_case_max_accuracy(logs);
      entry["worst_case_max_accuracy"] = w;
      total += w;
      ++counted;
    } catch (const Error&) {
      entry["worst_case_max_accuracy"] = nullptr;
    }
    per_seed.push_back(entry);
  }
  summary["worst_case_max_accuracy"] =
      counted ? ordered_json(total / static_cast<double>(counted)) : ordered_json(nullptr);
  summary["per_seed"] = per_seed;
  ordered_json runs = ordered_json::array();
  for (const auto& r : results) runs.push_back(run_json(r));
  summary["runs"] = runs;
  const std::string text = summary.dump(2) + "\n";
  if (config.emit_json) write_text(config.output_dir / "summary.json", text);

  if (config.emit_plot_data) {
    // Seed-averaged curves, one column group per attack.
    std::string csv = "step,attack,mean_test_acc,mean_clip_threshold\n";
    std::vector<std::string> order;
    for (const auto& r : results) {
      if (std::find(order.begin(), order.end(), r.log.attack) == order.end()) order.push_back(r.log.attack);
    }
    for (const auto& attack : order) {
      std::vector<const MetricsLog*> logs;
      for (const auto& r : results) {
        if (r.log.attack == attack) logs.push_back(&r.log);
      }
      for (std::size_t t = 0; t < config.training.steps; ++t) {
        double acc = 0.0, clip = 0.0;
        std::size_t n_acc = 0, n_clip = 0;
        for (const MetricsLog* l : logs) {
          if (t >= l->records.size()) continue;
          const auto& rec = l->records[t];
          const auto a = rec.test_acc ? rec.test_acc : rec.train_acc;
          if (a) acc += *a, ++n_acc;
          if (rec.clip_threshold) clip += *rec.clip_threshold, ++n_clip;
        }
        if (n_acc == 0 && n_clip == 0) continue;
        csv += std::to_string(t + 1) + "," + attack + "," +
               (n_acc ? format_double(acc / static_cast<double>(n_acc)) : "") + "," +
               (n_clip ? format_double(clip / static_cast<double>(n_clip)) : "") + "\n";
      }
    }
    write_text(config.output_dir / "plot_data.csv", csv);
  }
  return text;
}

}  // namespace arc::cli

#pragma once

// Robust distributed (stochastic) gradient descent with a parameter server,
// honest workers with momentum, and f adversarial workers.
//
// Each step t = 1..T:
//   honest workers compute g_t (full local gradient when batch_size == 0,
//   otherwise a minibatch) and momentum m_t = (1 - beta) g_t + beta m_{t-1};
//   adversaries craft their vectors from the honest momenta (or compute
//   label-flipped gradients); the server aggregates and steps
//   theta_{t+1} = theta_t - gamma_t R_t.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arc/aggregation.hpp"
#include "arc/attacks.hpp"
#include "arc/data.hpp"
#include "arc/models.hpp"

namespace arc {

struct Heterogeneity {
  enum class Kind { Dirichlet, Extreme };
  Kind kind = Kind::Extreme;
  double alpha = 1.0;
};

struct TrainingConfig {
  std::size_t n = 11;
  std::size_t f = 1;
  std::size_t steps = 300;
  double gamma = 0.1;
  /// Steps at which the learning rate is multiplied by lr_decay.
  std::vector<std::size_t> lr_milestones;
  double lr_decay = 1.0;
  double beta = 0.9;
  /// 0 selects full local gradients.
  std::size_t batch_size = 25;
  AggregatorSpec aggregator;
  /// No attack: all n workers are honest and f is still handed to the aggregator.
  std::optional<AttackSpec> attack;
  Heterogeneity heterogeneity;
  std::uint64_t seed = 1;
  double init_scale = 1.0;
  ModelSpec model;
  /// Worker threads for honest gradients; results do not depend on it.
  std::size_t threads = 1;

  void validate() const;
  std::size_t honest_workers() const noexcept { return attack ? n - f : n; }
  double learning_rate(std::size_t step) const;
};

struct StepRecord {
  std::size_t step = 0;
  std::optional<double> train_acc;
  std::optional<double> test_acc;
  /// Honest loss L_H(theta_t): mean of the local full losses.
  double loss = 0.0;
  /// ARC threshold C_t, present only for ARC pipelines.
  std::optional<double> clip_threshold;
  /// ||mean of honest momenta||.
  double honest_mean_norm = 0.0;
  /// max_i ||grad L_i(theta_t)|| over honest workers (full local gradients).
  double max_honest_grad_norm = 0.0;
  /// ||grad L_H(theta_t)||.
  double full_grad_norm = 0.0;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct MetricsLog {
  std::string attack;
  std::string aggregator;
  std::uint64_t seed = 0;
  std::vector<StepRecord> records;
  /// Step whose parameters form the returned model (uniform over 1..T).
  std::size_t selected_step = 0;
  Vecd selected_theta;
  Vecd final_theta;
  std::optional<std::size_t> mimic_target;
  bool failed = false;
  std::string failure;

  /// Max over steps of test accuracy (train accuracy when no test set).
  std::optional<double> max_accuracy() const;
};

Vecd compute_momentum(std::span<const double> g, std::span<const double> m_prev, double beta);

/// Throws on invalid configs. Non-finite losses or parameters do not throw:
/// the run stops early with failed = true and a DivergenceGuard message.
MetricsLog run(const TrainingConfig& config, const Dataset& train, const Dataset& test);

/// min over logs of each log's maximal accuracy. Throws EmptyInput when no
/// log carries accuracy.
double worst_case_max_accuracy(const std::map<std::string, MetricsLog>& logs);

struct GbCandidate {
  double B = 0.0;
  double G = 0.0;
};

std::vector<double> default_b_grid();

/// For each B, the smallest G with
///   (1/|H|) sum_i ||g_i - g_H||^2 <= G^2 + B^2 ||g_H||^2
/// at every step of the trajectory (rows of each entry are the honest
/// gradients at one theta_t).
std::vector<GbCandidate> estimate_gb(std::span<const GradientSet> trajectory,
                                     std::span<const double> b_grid);

struct GrowthReport {
  bool passed = true;
  /// First step t whose successor violates the per-step bound.
  std::optional<std::size_t> first_violation;
  double worst_ratio = 0.0;
  double factor = 1.0;
};

/// Checks max_honest_grad_norm[t+1] <= (1 + gamma L) max_honest_grad_norm[t] + 1e-9.
GrowthReport max_grad_growth_check(const MetricsLog& log, double lipschitz, double gamma);
/// Same, with L taken from the model; UnknownLipschitz unless it is quadratic.
GrowthReport max_grad_growth_check(const MetricsLog& log, const ModelSpec& model, double gamma);

}  // namespace arc

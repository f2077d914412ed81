#include "arc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "arc/error.hpp"
#include "arc/parallel.hpp"
#include "arc/rng.hpp"

namespace arc {

void TrainingConfig::validate() const {
  if (n == 0) raise(ErrorCode::InvalidArgument, "n must be positive");
  if (2 * f >= n) raise(ErrorCode::TooManyByzantine, "f must be below n/2");
  if (steps < 1) raise(ErrorCode::InvalidArgument, "steps must be at least 1");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    raise(ErrorCode::InvalidArgument, "learning rate must be nonnegative");
  }
  if (!(lr_decay > 0.0) || !std::isfinite(lr_decay)) {
    raise(ErrorCode::InvalidArgument, "lr_decay must be positive");
  }
  if (!(beta >= 0.0 && beta < 1.0)) raise(ErrorCode::InvalidArgument, "momentum must lie in [0, 1)");
  if (!(init_scale >= 1.0) || !std::isfinite(init_scale)) {
    raise(ErrorCode::InvalidArgument, "init_scale must be at least 1");
  }
  if (heterogeneity.kind == Heterogeneity::Kind::Dirichlet &&
      (!(heterogeneity.alpha > 0.0) || !std::isfinite(heterogeneity.alpha))) {
    raise(ErrorCode::InvalidArgument, "Dirichlet alpha must be positive");
  }
  if (attack && attack->kind == AttackKind::LabelFlip && model.kind == ModelKind::Quadratic) {
    raise(ErrorCode::InvalidArgument, "label flipping needs a classification model");
  }
  model.validate();
}

double TrainingConfig::learning_rate(std::size_t step) const {
  double lr = gamma;
  for (std::size_t m : lr_milestones) {
    if (step >= m) lr *= lr_decay;
  }
  return lr;
}

std::optional<double> MetricsLog::max_accuracy() const {
  std::optional<double> best;
  for (const auto& r : records) {
    const auto acc = r.test_acc ? r.test_acc : r.train_acc;
    if (acc && (!best || *acc > *best)) best = acc;
  }
  return best;
}

Vecd compute_momentum(std::span<const double> g, std::span<const double> m_prev, double beta) {
  if (g.size() != m_prev.size()) raise(ErrorCode::DimensionMismatch, "momentum: length mismatch");
  if (!(beta >= 0.0 && beta < 1.0)) raise(ErrorCode::InvalidArgument, "momentum must lie in [0, 1)");
  Vecd out(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) out[j] = (1.0 - beta) * g[j] + beta * m_prev[j];
  return out;
}

namespace {

// b indices drawn without replacement from [0, m); the whole range when b is
// 0 or at least m.
std::vector<std::size_t> draw_batch(std::size_t m, std::size_t b, Rng& rng) {
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (b == 0 || b >= m) return idx;
  for (std::size_t i = 0; i < b; ++i) std::swap(idx[i], idx[i + rng.uniform_index(m - i)]);
  idx.resize(b);
  return idx;
}

struct DivergenceStop {
  std::string message;
};

}  // namespace

MetricsLog run(const TrainingConfig& config, const Dataset& train, const Dataset& test) {
  config.validate();
  train.validate();
  if (test.size() > 0) test.validate();
  if (train.size() == 0) raise(ErrorCode::EmptyInput, "training set is empty");
  const ModelSpec& model = config.model;

  const std::size_t h = config.honest_workers();
  const std::size_t f = config.f;
  const std::size_t n_adv = config.attack ? f : 0;
  const std::size_t T = config.steps;

  const Partition part =
      config.heterogeneity.kind == Heterogeneity::Kind::Extreme
          ? extreme_partition(train.labels, h)
          : dirichlet_partition(train.labels, h, config.heterogeneity.alpha,
                                rng_stream(config.seed, streams::kPartition));
  std::vector<Dataset> shards;
  shards.reserve(h);
  for (const auto& list : part.assignment) {
    if (list.empty()) raise(ErrorCode::NoHonestWorkers, "an honest worker received no data");
    shards.push_back(train.subset(list));
  }

  std::optional<Dataset> flipped;
  if (config.attack && config.attack->kind == AttackKind::LabelFlip) {
    flipped = train.with_labels(flip_labels(train.labels, train.num_classes));
  }

  Vecd theta = init_parameters(model, config.init_scale, rng_stream(config.seed, streams::kModelInit));
  const std::size_t p = theta.size();

  Rng output_rng = rng_stream(config.seed, streams::kOutputSelection).generator();
  const std::size_t selected = 1 + output_rng.uniform_index(T);

  const Pipeline pipeline(config.aggregator);
  const auto bound_aggregator = pipeline.bind(f);
  const RngStream batch_stream = rng_stream(config.seed, streams::kBatch);
  const RngStream adv_stream = rng_stream(config.seed, streams::kAdversaryBatch);
  const std::size_t threads = std::max<std::size_t>(1, config.threads);

  MetricsLog log;
  log.attack = config.attack ? std::string(attack_name(config.attack->kind)) : "none";
  log.aggregator = config.aggregator.to_string();
  log.seed = config.seed;
  log.selected_step = selected;
  log.records.reserve(T);

  GradientSet honest_momenta(h, p);
  GradientSet adversary_momenta(n_adv, p);
  MimicTracker mimic;
  const std::size_t mimic_warmup = std::max<std::size_t>(1, (T + 9) / 10);
  std::optional<std::size_t> mimic_target;
  if (config.attack && config.attack->kind == AttackKind::Mimic && config.attack->mimic_target) {
    mimic_target = config.attack->mimic_target;
  }

  auto check_finite = [](std::span<const double> v, const std::string& what, std::size_t t) {
    if (!all_finite(v)) {
      throw DivergenceStop{what + " became non-finite at step " + std::to_string(t)};
    }
  };

  try {
    for (std::size_t t = 1; t <= T; ++t) {
      check_finite(theta, "parameters", t);
      if (t == selected) log.selected_theta = theta;

      // Honest side: full local gradients (for metrics and, at batch 0, the
      // update) and the stochastic gradients feeding momentum.
      std::vector<double> local_loss(h);
      std::vector<Vecd> local_grad(h), step_grad(h);
      parallel_for(h, threads, [&](std::size_t w) {
        local_loss[w] = loss_and_gradient(model, theta, shards[w], &local_grad[w]);
        if (config.batch_size == 0 || config.batch_size >= shards[w].size()) {
          step_grad[w] = local_grad[w];
        } else {
          Rng rng = batch_stream.child(w).child(t).generator();
          const auto batch = draw_batch(shards[w].size(), config.batch_size, rng);
          loss_and_gradient(model, theta, shards[w], batch, &step_grad[w]);
        }
      });

      StepRecord rec;
      rec.step = t;
      rec.loss = mean_of_values(local_loss);
      check_finite(std::span<const double>(&rec.loss, 1), "loss", t);
      GradientSet local = GradientSet::from_rows(local_grad);
      rec.full_grad_norm = l2_norm(mean_of(local));
      rec.max_honest_grad_norm = local.max_norm();
      if (model.has_accuracy()) {
        rec.train_acc = evaluate(model, theta, train);
        if (test.size() > 0) rec.test_acc = evaluate(model, theta, test);
      }

      for (std::size_t w = 0; w < h; ++w) {
        check_finite(step_grad[w], "honest gradient", t);
        honest_momenta.set_row(w, compute_momentum(step_grad[w], honest_momenta.row(w), config.beta));
      }
      rec.honest_mean_norm = l2_norm(mean_of(honest_momenta));

      GradientSet inputs = honest_momenta;
      if (config.attack) {
        const AttackKind kind = config.attack->kind;
        if (kind == AttackKind::LabelFlip) {
          for (std::size_t a = 0; a < n_adv; ++a) {
            Rng rng = adv_stream.child(a).child(t).generator();
            const auto batch = draw_batch(flipped->size(), config.batch_size, rng);
            Vecd g;
            loss_and_gradient(model, theta, *flipped, batch, &g);
            check_finite(g, "label-flipped gradient", t);
            adversary_momenta.set_row(a, compute_momentum(g, adversary_momenta.row(a), config.beta));
          }
          inputs.append(adversary_momenta);
        } else if (n_adv > 0) {
          AttackSpec spec = *config.attack;
          if (kind == AttackKind::Mimic) {
            if (!mimic_target) {
              mimic.observe(honest_momenta);
              spec.mimic_target = mimic.best();
              if (mimic.steps_observed() >= mimic_warmup) mimic_target = spec.mimic_target;
            } else {
              spec.mimic_target = mimic_target;
            }
            log.mimic_target = spec.mimic_target;
          }
          // The adversary sees the honest momenta but must not alter them.
          const GradientSet snapshot = honest_momenta;
          const AttackContext ctx{honest_momenta, bound_aggregator, f};
          const CraftedAttack crafted = craft(spec, ctx);
          if (!(snapshot == honest_momenta)) {
            raise(ErrorCode::InvalidArgument, "adversary modified honest state");
          }
          check_finite(crafted.vector, "adversarial vector", t);
          inputs.append_copies(crafted.vector, n_adv);
        }
      }

      const PipelineOutput out = pipeline.run(inputs, f);
      if (config.aggregator.clip.kind == ClipKind::Arc && out.clip) {
        rec.clip_threshold = out.clip->threshold;
      }
      log.records.push_back(rec);

      const double lr = config.learning_rate(t);
      for (std::size_t j = 0; j < p; ++j) theta[j] -= lr * out.value[j];
    }
  } catch (const DivergenceStop& stop) {
    log.failed = true;
    log.failure = std::string(to_string(ErrorCode::DivergenceGuard)) + ": " + stop.message;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonFinite) throw;
    log.failed = true;
    log.failure = std::string(to_string(ErrorCode::DivergenceGuard)) + ": " + e.what();
  }
  log.final_theta = theta;
  return log;
}

double worst_case_max_accuracy(const std::map<std::string, MetricsLog>& logs) {
  std::optional<double> worst;
  for (const auto& [name, log] : logs) {
    const auto best = log.max_accuracy();
    if (best && (!worst || *best < *worst)) worst = best;
  }
  if (!worst) raise(ErrorCode::EmptyInput, "no log carries an accuracy trace");
  return *worst;
}

std::vector<double> default_b_grid() { return {0.0, 0.5, 1.0, 2.0, 3.0}; }

std::vector<GbCandidate> estimate_gb(std::span<const GradientSet> trajectory,
                                     std::span<const double> b_grid) {
  if (trajectory.empty()) raise(ErrorCode::EmptyInput, "empty gradient trajectory");
  if (b_grid.empty()) raise(ErrorCode::EmptyGrid, "empty B grid");
  std::vector<double> dissimilarity, mean_sq;
  for (const auto& step : trajectory) {
    if (step.empty()) raise(ErrorCode::NoHonestWorkers, "trajectory step without gradients");
    const Vecd centre = mean_of(step);
    std::vector<double> dev(step.size());
    for (std::size_t i = 0; i < step.size(); ++i) dev[i] = squared_distance(step.row(i), centre);
    dissimilarity.push_back(std::accumulate(dev.begin(), dev.end(), 0.0) /
                            static_cast<double>(step.size()));
    mean_sq.push_back(squared_norm(centre));
  }
  std::vector<GbCandidate> out;
  for (double B : b_grid) {
    if (!(B >= 0.0) || !std::isfinite(B)) raise(ErrorCode::InvalidArgument, "B must be >= 0");
    double g2 = 0.0;
    for (std::size_t t = 0; t < dissimilarity.size(); ++t) {
      g2 = std::max(g2, dissimilarity[t] - B * B * mean_sq[t]);
    }
    out.push_back({B, std::sqrt(g2)});
  }
  return out;
}

GrowthReport max_grad_growth_check(const MetricsLog& log, double lipschitz, double gamma) {
  if (!(lipschitz >= 0.0) || !(gamma >= 0.0)) {
    raise(ErrorCode::InvalidArgument, "L and gamma must be nonnegative");
  }
  GrowthReport report;
  report.factor = 1.0 + gamma * lipschitz;
  for (std::size_t t = 0; t + 1 < log.records.size(); ++t) {
    const double prev = log.records[t].max_honest_grad_norm;
    const double next = log.records[t + 1].max_honest_grad_norm;
    if (prev > 0.0) report.worst_ratio = std::max(report.worst_ratio, next / prev);
    if (next > report.factor * prev + 1e-9 && report.passed) {
      report.passed = false;
      report.first_violation = log.records[t].step;
    }
  }
  return report;
}

GrowthReport max_grad_growth_check(const MetricsLog& log, const ModelSpec& model, double gamma) {
  return max_grad_growth_check(log, lipschitz_constant(model), gamma);
}

}  // namespace arc

#pragma once

// Randomised sweeps behind `arc-robust certify` and `lemma-check`.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arc/aggregation.hpp"
#include "arc/robustness.hpp"
#include "arc/trainer.hpp"

namespace arc::cli {

struct CertifyReport {
  AggregatorSpec spec;
  std::size_t n = 0, f = 0, dim = 0, trials = 0;
  std::uint64_t seed = 0;
  KappaCertificate certificate;
  /// Certified bound, absent when the spec carries no certificate.
  std::optional<double> bound;
  std::optional<double> corollary_bound;
  double max_kappa_hat = 0.0;
  std::vector<std::size_t> witness;
  std::size_t violations = 0;
  std::size_t corollary_violations = 0;
  bool exhaustive = true;
};

/// kappa_hat of `spec` on `trials` random instances (see random_instance),
/// exhaustive for n <= 20 and sampled (lower bound) beyond.
CertifyReport certify(const AggregatorSpec& spec, std::size_t n, std::size_t f, std::size_t dim,
                      std::size_t trials, std::uint64_t seed, std::size_t threads = 1);

struct ClauseTally {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_excess = 0.0;
};

struct ClipSweepReport {
  std::size_t trials = 0;
  ClauseTally variance_reduction, bias, bias_vs_variance, robustness;
};

/// Random (inputs, C, S) triples with n in [3, 9], f < n/2 and d in [1, 6];
/// C is the norm of a random member of S (so |S \ S_c| >= 1) or, one time in
/// five, above every norm. The robustness clause uses base after NNM.
ClipSweepReport clip_sweep(std::size_t trials, std::uint64_t seed, BaseRule base = BaseRule::CWTM);

struct GrowthSweepEntry {
  std::uint64_t seed = 0;
  GrowthReport report;
  std::size_t steps_recorded = 0;
};

/// Quadratic model with known L, gamma = 1/(2L), full local gradients, no
/// momentum, f FOE adversaries and the given pipeline.
std::vector<GrowthSweepEntry> growth_sweep(const AggregatorSpec& spec,
                                           const std::vector<std::uint64_t>& seeds,
                                           std::size_t steps, std::size_t n = 11,
                                           std::size_t f = 1, std::size_t dim = 10);

}  // namespace arc::cli

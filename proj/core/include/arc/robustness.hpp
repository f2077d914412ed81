#pragma once

// Empirical robustness certification by subset search, the clipping
// inequalities, and the two counterexample constructions.
//
// For an aggregator F, inputs x_1..x_n and an admissible honest set S
// (|S| = n - f) the ratio of interest is
//   ||F(x) - xbar_S||^2 / ((1/|S|) sum_{i in S} ||x_i - xbar_S||^2)
// and kappa_hat is its maximum over S.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "arc/aggregation.hpp"
#include "arc/numkit.hpp"
#include "arc/rng.hpp"

namespace arc {


inline constexpr double kZeroVariance = 1e-12;
inline constexpr double kInequalitySlack = 1e-9;
inline constexpr std::size_t kMaxEnumeratedWorkers = 20;

struct RobustnessReport {
  /// +infinity when some subset has zero variance and nonzero error.
  double kappa_hat = 0.0;
  std::vector<std::size_t> witness;
  bool degenerate = false;
  std::size_t subsets_evaluated = 0;
  /// False for sampled searches, whose kappa_hat is only a lower bound.
  bool exhaustive = true;

  bool infinite() const noexcept;
};

/// Squared error and variance of F's output against subset S.
struct SubsetRatio {
  double error = 0.0;
  double variance = 0.0;
  double ratio = 0.0;
};

SubsetRatio subset_ratio(const GradientSet& inputs, std::span<const double> output,
                         std::span<const std::size_t> subset);

/// Exhaustive search over all subsets of size n - f. TooManySubsets for n > 20.
RobustnessReport empirical_kappa(const AggregatorFn& aggregator, const GradientSet& inputs,
                                 std::size_t f);

/// Random subsets only; the result is a lower bound on kappa_hat.
RobustnessReport empirical_kappa_sampled(const AggregatorFn& aggregator, const GradientSet& inputs,
                                         std::size_t f, std::size_t samples, const RngStream& rng);

/// n - f identical honest rows (2C, 0) followed by f distinct fillers; with
/// C = 0 the honest row is (1, 0). Any F after static clipping at C has
/// infinite kappa_hat on it.
GradientSet counterexample_static(double threshold, std::size_t n, std::size_t f);

/// ((0,1), (1,0), (1,1)) with f = 1 and honest set {0, 1}.
GradientSet counterexample_unbounded();

struct BoundedOutputReport {
  bool passed = true;
  double output_norm = 0.0;
  /// (f+1)-th largest input norm.
  double bound = 0.0;
};

/// ||pipeline(inputs)|| <= (f+1)-th largest input norm + 1e-9.
BoundedOutputReport check_bounded_output(const Pipeline& pipeline, const GradientSet& inputs,
                                         std::size_t f);

struct Clause {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

struct ClipInequalityReport {
  std::size_t clipped_in_s = 0;
  /// 1 when ||xbar_S|| <= C, otherwise 2.
  int variance_case = 1;
  Clause variance_reduction;
  Clause bias;
  /// Absent when every row of S is clipped.
  std::optional<Clause> bias_vs_variance;
  /// Present when a base rule with a certified NNM coefficient was given.
  std::optional<Clause> robustness;

  bool all_hold() const noexcept;
};

/// Checks the variance-reduction, bias and bias-versus-variance bounds for
/// static clipping at C on subset S (|S| = n - f), plus, when `nnm_base` is
/// given, ||F(Clip_C(x)) - xbar_S||^2 <= (kappa + |S_c|/|S \ S_c|) var_S for
/// F = base after NNM. Throws AllClipped when that last clause is requested
/// but every row of S is clipped.
ClipInequalityReport clip_inequality_check(const GradientSet& inputs,
                                           std::span<const std::size_t> subset, double threshold,
                                           std::size_t f,
                                           std::optional<BaseRule> nnm_base = std::nullopt);

/// N(0,1) entries with one row (chosen at random) replaced by Cauchy draws.
GradientSet random_instance(std::size_t n, std::size_t d, Rng& rng);

struct PreservationReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::size_t corollary_violations = 0;
  double kappa_cert = 0.0;
  /// kappa_cert + 2f/(n-2f)
  double bound = 0.0;
  double max_kappa_hat = 0.0;
  std::vector<std::size_t> worst_witness;
};

/// Random trials of kappa_hat for base after NNM after ARC against the
/// certified bound and against 3 kappa_cert. Trial i uses rng.child(i).
PreservationReport check_preservation(BaseRule base, std::size_t n, std::size_t f,
                                      std::size_t trials, std::size_t dim, const RngStream& rng,
                                      std::size_t threads = 1);

}  // namespace arc

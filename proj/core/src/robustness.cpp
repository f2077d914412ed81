#include "arc/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "arc/clipping.hpp"
#include "arc/error.hpp"
#include "arc/parallel.hpp"
#include "arc/theory.hpp"

namespace arc {

bool RobustnessReport::infinite() const noexcept { return std::isinf(kappa_hat); }

SubsetRatio subset_ratio(const GradientSet& inputs, std::span<const double> output,
                         std::span<const std::size_t> subset) {
  if (subset.empty()) raise(ErrorCode::EmptyInput, "empty subset");
  const Vecd centre = mean_of(inputs, subset);
  SubsetRatio r;
  r.error = squared_distance(output, centre);
  double acc = 0.0;
  for (std::size_t i : subset) acc += squared_distance(inputs.row(i), centre);
  r.variance = acc / static_cast<double>(subset.size());
  if (r.variance <= kZeroVariance) {
    r.ratio = r.error <= kZeroVariance ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    r.ratio = r.error / r.variance;
  }
  return r;
}

namespace {

void fold(RobustnessReport& report, const SubsetRatio& r, std::span<const std::size_t> subset) {
  ++report.subsets_evaluated;
  if (std::isinf(r.ratio)) report.degenerate = true;
  if (report.witness.empty() || r.ratio > report.kappa_hat) {
    report.kappa_hat = r.ratio;
    report.witness.assign(subset.begin(), subset.end());
  }
}

void check_subset_args(const GradientSet& inputs, std::size_t f) {
  if (inputs.empty()) raise(ErrorCode::EmptyInput, "no inputs");
  if (f >= inputs.size()) raise(ErrorCode::InsufficientWorkers, "need f < n");
}

}  // namespace

RobustnessReport empirical_kappa(const AggregatorFn& aggregator, const GradientSet& inputs,
                                 std::size_t f) {
  check_subset_args(inputs, f);
  const std::size_t n = inputs.size();
  if (n > kMaxEnumeratedWorkers) {
    raise(ErrorCode::TooManySubsets, "exhaustive search is limited to n <= 20 (got n=" +
                                         std::to_string(n) + "); use the sampled search");
  }
  const Vecd output = aggregator(inputs);
  const std::size_t m = n - f;
  RobustnessReport report;
  std::vector<std::size_t> subset(m);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  while (true) {
    fold(report, subset_ratio(inputs, output, subset), subset);
    // Next combination in lexicographic order.
    std::size_t i = m;
    while (i > 0 && subset[i - 1] == n - m + (i - 1)) --i;
    if (i == 0) break;
    ++subset[i - 1];
    for (std::size_t j = i; j < m; ++j) subset[j] = subset[j - 1] + 1;
  }
  return report;
}

RobustnessReport empirical_kappa_sampled(const AggregatorFn& aggregator, const GradientSet& inputs,
                                         std::size_t f, std::size_t samples, const RngStream& rng) {
  check_subset_args(inputs, f);
  if (samples == 0) raise(ErrorCode::InvalidArgument, "need at least one sample");
  const std::size_t n = inputs.size();
  const Vecd output = aggregator(inputs);
  Rng gen = rng.generator();
  RobustnessReport report;
  report.exhaustive = false;
  std::vector<std::size_t> pool(n);
  for (std::size_t s = 0; s < samples; ++s) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < n - f; ++i) std::swap(pool[i], pool[i + gen.uniform_index(n - i)]);
    std::vector<std::size_t> subset(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n - f));
    std::sort(subset.begin(), subset.end());
    fold(report, subset_ratio(inputs, output, subset), subset);
  }
  return report;
}

GradientSet counterexample_static(double threshold, std::size_t n, std::size_t f) {
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    raise(ErrorCode::NegativeThreshold, "threshold must be finite and nonnegative");
  }
  if (f < 1 || f >= n) raise(ErrorCode::InvalidArgument, "need 1 <= f < n");
  const double unit = threshold > 0.0 ? threshold : 1.0;
  const double honest_x = threshold > 0.0 ? 2.0 * threshold : 1.0;
  std::vector<Vecd> rows(n - f, Vecd{honest_x, 0.0});
  for (std::size_t j = 0; j < f; ++j) {
    const double s = static_cast<double>(j + 1);
    rows.push_back({-s * unit, s * unit});
  }
  return GradientSet::from_rows(rows);
}

GradientSet counterexample_unbounded() {
  return GradientSet::from_rows({{0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}});
}

BoundedOutputReport check_bounded_output(const Pipeline& pipeline, const GradientSet& inputs,
                                         std::size_t f) {
  check_subset_args(inputs, f);
  auto norms = inputs.norms();
  std::sort(norms.begin(), norms.end(), std::greater<>());
  BoundedOutputReport r;
  r.bound = norms[f];
  r.output_norm = l2_norm(pipeline(inputs, f));
  r.passed = r.output_norm <= r.bound + kInequalitySlack;
  return r;
}

bool ClipInequalityReport::all_hold() const noexcept {
  return variance_reduction.holds && bias.holds && (!bias_vs_variance || bias_vs_variance->holds) &&
         (!robustness || robustness->holds);
}

namespace {

Clause clause(double lhs, double rhs) { return {lhs, rhs, lhs <= rhs + kInequalitySlack}; }

double variance_about(const GradientSet& set, std::span<const std::size_t> subset,
                      std::span<const double> centre) {
  double acc = 0.0;
  for (std::size_t i : subset) acc += squared_distance(set.row(i), centre);
  return acc / static_cast<double>(subset.size());
}

}  // namespace

ClipInequalityReport clip_inequality_check(const GradientSet& inputs,
                                           std::span<const std::size_t> subset, double threshold,
                                           std::size_t f, std::optional<BaseRule> nnm_base) {
  const std::size_t n = inputs.size();
  if (n == 0) raise(ErrorCode::EmptyInput, "no inputs");
  if (2 * f >= n) raise(ErrorCode::TooManyByzantine, "need f < n/2");
  if (subset.size() != n - f) raise(ErrorCode::InvalidArgument, "subset must have n - f members");
  for (std::size_t i : subset) {
    if (i >= n) raise(ErrorCode::InvalidArgument, "subset index out of range");
  }

  const ClipResult clip = static_clip(inputs, threshold);
  const GradientSet& y = clip.clipped;
  const auto x_norms = inputs.norms();

  std::vector<std::size_t> clipped;
  for (std::size_t i : subset) {
    if (x_norms[i] > threshold) clipped.push_back(i);
  }
  const double s = static_cast<double>(subset.size());
  const double sc = static_cast<double>(clipped.size());
  const std::size_t unclipped = subset.size() - clipped.size();
  if (unclipped == 0 && nnm_base) {
    raise(ErrorCode::AllClipped, "every member of S is clipped; the robustness clause needs |S \\ S_c| >= 1");
  }

  const Vecd xbar = mean_of(inputs, subset);
  const Vecd ybar = mean_of(y, subset);
  const double var_x = variance_about(inputs, subset, xbar);
  const double var_y = variance_about(y, subset, ybar);
  const double xbar_norm = l2_norm(xbar);
  const double bias_sq = squared_distance(xbar, ybar);

  ClipInequalityReport r;
  r.clipped_in_s = clipped.size();

  double excess = 0.0;
  for (std::size_t i : clipped) excess += (x_norms[i] - threshold) * (x_norms[i] - threshold);

  if (xbar_norm <= threshold) {
    r.variance_case = 1;
    r.variance_reduction = clause(var_y, var_x - excess / s);
  } else {
    r.variance_case = 2;
    double spread = 0.0;
    for (std::size_t i : clipped) spread += (x_norms[i] - xbar_norm) * (x_norms[i] - xbar_norm);
    const double gap = xbar_norm - threshold;
    r.variance_reduction =
        clause(var_y, var_x - (static_cast<double>(unclipped) / s) * gap * gap - spread / s);
  }
  r.bias = clause(bias_sq, sc / (s * s) * excess);
  if (unclipped == 0) return r;
  const double ratio = sc / static_cast<double>(unclipped);
  r.bias_vs_variance = clause(bias_sq, ratio * var_x);

  if (nnm_base) {
    AggregatorSpec spec;
    spec.base = *nnm_base;
    spec.use_nnm = true;
    const KappaCertificate cert = certify_kappa(spec, n, f);
    if (cert.source == KappaSource::NNMLemma) {
      const Vecd out = aggregate(spec, y, f);
      r.robustness = clause(squared_distance(out, xbar), (cert.kappa + ratio) * var_x);
    }
  }
  return r;
}

GradientSet random_instance(std::size_t n, std::size_t d, Rng& rng) {
  if (n == 0 || d == 0) raise(ErrorCode::InvalidArgument, "need n, d > 0");
  GradientSet out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = out.row_mut(i);
    for (double& v : r) v = rng.normal();
  }
  auto heavy = out.row_mut(rng.uniform_index(n));
  for (double& v : heavy) v = rng.cauchy();
  return out;
}

PreservationReport check_preservation(BaseRule base, std::size_t n, std::size_t f,
                                      std::size_t trials, std::size_t dim, const RngStream& rng,
                                      std::size_t threads) {
  if (2 * f >= n) raise(ErrorCode::TooManyByzantine, "need n > 2f");
  AggregatorSpec bare;
  bare.base = base;
  bare.use_nnm = true;
  AggregatorSpec with_arc = bare;
  with_arc.clip.kind = ClipKind::Arc;

  PreservationReport report;
  report.trials = trials;
  report.kappa_cert = theory::kappa_bounds(n, f).nnm_upper;
  report.bound = report.kappa_cert + 2.0 * static_cast<double>(f) / static_cast<double>(n - 2 * f);
  const double corollary = 3.0 * report.kappa_cert;

  const auto aggregator = build_pipeline(with_arc).bind(f);
  std::vector<RobustnessReport> results(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng gen = rng.child(t).generator();
    const GradientSet inputs = random_instance(n, dim, gen);
    results[t] = empirical_kappa(aggregator, inputs, f);
  });

  for (const auto& res : results) {
    if (!(res.kappa_hat <= report.bound + kInequalitySlack)) ++report.violations;
    if (!(res.kappa_hat <= corollary + kInequalitySlack)) ++report.corollary_violations;
    if (report.worst_witness.empty() || res.kappa_hat > report.max_kappa_hat) {
      report.max_kappa_hat = res.kappa_hat;
      report.worst_witness = res.witness;
    }
  }
  return report;
}

}  // namespace arc

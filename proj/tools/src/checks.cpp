#include "arc_cli/checks.hpp"

#include <algorithm>
#include <numeric>

#include "arc/data.hpp"
#include "arc/error.hpp"
#include "arc/parallel.hpp"
#include "arc/rng.hpp"
#include "arc/theory.hpp"

namespace arc::cli {

CertifyReport certify(const AggregatorSpec& spec, std::size_t n, std::size_t f, std::size_t dim,
                      std::size_t trials, std::uint64_t seed, std::size_t threads) {
  if (n == 0 || dim == 0 || trials == 0) {
    raise(ErrorCode::InvalidArgument, "n, dim and trials must be positive");
  }
  if (2 * f >= n) raise(ErrorCode::TooManyByzantine, "need n > 2f");
  CertifyReport report;
  report.spec = spec;
  report.n = n;
  report.f = f;
  report.dim = dim;
  report.trials = trials;
  report.seed = seed;
  report.certificate = certify_kappa(spec, n, f);
  if (report.certificate.source != KappaSource::LowerBoundOnly) {
    report.bound = report.certificate.kappa;
  }
  if (report.certificate.source == KappaSource::ArcAugmented) {
    report.corollary_bound = 3.0 * theory::kappa_bounds(n, f).nnm_upper;
  }
  report.exhaustive = n <= kMaxEnumeratedWorkers;

  const auto aggregator = build_pipeline(spec).bind(f);
  const RngStream stream = rng_stream(seed, streams::kCertification);
  std::vector<RobustnessReport> results(trials);
  parallel_for(trials, std::max<std::size_t>(1, threads), [&](std::size_t t) {
    Rng gen = stream.child(t).generator();
    const GradientSet inputs = random_instance(n, dim, gen);
    results[t] = report.exhaustive
                     ? empirical_kappa(aggregator, inputs, f)
                     : empirical_kappa_sampled(aggregator, inputs, f, 2000, stream.child(t).child(1));
  });
  for (const auto& r : results) {
    if (report.bound && !(r.kappa_hat <= *report.bound + kInequalitySlack)) ++report.violations;
    if (report.corollary_bound && !(r.kappa_hat <= *report.corollary_bound + kInequalitySlack)) {
      ++report.corollary_violations;
    }
    if (report.witness.empty() || r.kappa_hat > report.max_kappa_hat) {
      report.max_kappa_hat = r.kappa_hat;
      report.witness = r.witness;
    }
  }
  return report;
}

namespace {

void tally(ClauseTally& t, const Clause& c) {
  ++t.checked;
  if (!c.holds) ++t.violations;
  t.worst_excess = std::max(t.worst_excess, c.lhs - c.rhs);
}

}  // namespace

ClipSweepReport clip_sweep(std::size_t trials, std::uint64_t seed, BaseRule base) {
  ClipSweepReport report;
  report.trials = trials;
  const RngStream stream = rng_stream(seed, streams::kCertification).child(0xB0);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng gen = stream.child(t).generator();
    const std::size_t n = 3 + gen.uniform_index(7);
    const std::size_t f = gen.uniform_index((n - 1) / 2 + 1);
    const std::size_t d = 1 + gen.uniform_index(6);
    const GradientSet inputs = random_instance(n, d, gen);

    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < n - f; ++i) std::swap(pool[i], pool[i + gen.uniform_index(n - i)]);
    std::vector<std::size_t> subset(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n - f));
    std::sort(subset.begin(), subset.end());

    const auto norms = inputs.norms();
    double threshold = norms[subset[gen.uniform_index(subset.size())]];
    if (gen.uniform() < 0.2) threshold = 1.5 * inputs.max_norm() + 1.0;

    const auto r = clip_inequality_check(inputs, subset, threshold, f, base);
    tally(report.variance_reduction, r.variance_reduction);
    tally(report.bias, r.bias);
    if (r.bias_vs_variance) tally(report.bias_vs_variance, *r.bias_vs_variance);
    if (r.robustness) tally(report.robustness, *r.robustness);
  }
  return report;
}

std::vector<GrowthSweepEntry> growth_sweep(const AggregatorSpec& spec,
                                           const std::vector<std::uint64_t>& seeds,
                                           std::size_t steps, std::size_t n, std::size_t f,
                                           std::size_t dim) {
  std::vector<GrowthSweepEntry> out;
  for (std::uint64_t seed : seeds) {
    TrainingConfig config;
    config.n = n;
    config.f = f;
    config.steps = steps;
    config.beta = 0.0;
    config.batch_size = 0;
    config.aggregator = spec;
    config.attack = AttackSpec::defaults(AttackKind::FallOfEmpires);
    config.heterogeneity.kind = Heterogeneity::Kind::Extreme;
    config.seed = seed;
    config.model.kind = ModelKind::Quadratic;
    config.model.input_dim = dim;
    config.model.curvature.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      config.model.curvature[j] = 0.5 + 1.5 * static_cast<double>(j) / static_cast<double>(dim);
    }
    const double L = lipschitz_constant(config.model);
    config.gamma = 1.0 / (2.0 * L);

    const Dataset centres =
        synth_generate(10, dim, 20, 0.5, rng_stream(seed, streams::kData).child(0));
    const MetricsLog log = run(config, centres, Dataset{});
    GrowthSweepEntry e;
    e.seed = seed;
    e.report = max_grad_growth_check(log, config.model, config.gamma);
    e.steps_recorded = log.records.size();
    if (log.failed || log.records.size() != steps) e.report.passed = false;
    out.push_back(e);
  }
  return out;
}

}  // namespace arc::cli

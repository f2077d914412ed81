#pragma once

// Robust aggregation rules and the clip -> NNM -> base -> output-clip
// pipeline built on top of them.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "arc/clipping.hpp"
#include "arc/numkit.hpp"

namespace arc {

enum class BaseRule { Mean, CWTM, CWMed, GM, MultiKrum };

std::string_view to_string(BaseRule rule) noexcept;
BaseRule parse_base_rule(std::string_view name);

enum class ClipKind { None, Static, Arc };

struct ClipStage {
  ClipKind kind = ClipKind::None;
  /// Only meaningful for ClipKind::Static.
  double threshold = 0.0;

  friend bool operator==(const ClipStage&, const ClipStage&) = default;
};

/// Declarative description of an aggregation pipeline.
///
/// Text form: tokens joined by '+', e.g. "cwtm+nnm+arc". The first token is
/// the base rule (mean, cwtm, cwmed, gm, mk); the rest may be "nnm", "arc",
/// "static:<C>" and "wlog" (clip the output to the largest input norm).
struct AggregatorSpec {
  BaseRule base = BaseRule::Mean;
  bool use_nnm = false;
  ClipStage clip;
  bool wlog_output_clip = false;
  /// Fraction constant of ARC; only changed for experiments.
  double clip_fraction_zeta = 2.0;

  static AggregatorSpec parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const AggregatorSpec&, const AggregatorSpec&) = default;
};

struct GeometricMedianOptions {
  int max_iterations = 100;
  double tolerance = 1e-8;
  /// Lower bound applied to every distance in the Weiszfeld weights.
  double guard = 1e-12;
};

struct GeometricMedianResult {
  Vecd point;
  int iterations = 0;
  bool converged = false;
  /// || sum_i (x_i - g) / max(||x_i - g||, guard) || at the returned point,
  /// or, when the median is an input row x_k, how far the pull of the other
  /// rows exceeds the multiplicity of x_k (0 at an optimum).
  double residual = 0.0;
};

Vecd mean(const GradientSet& inputs);
/// Per coordinate: drop the f largest and f smallest values, average the rest.
Vecd coordinate_trimmed_mean(const GradientSet& inputs, std::size_t f);
/// Per coordinate median; mean of the two middle values for even n.
Vecd coordinate_median(const GradientSet& inputs);
/// Weiszfeld iteration started from the mean. Stops once the residual is at
/// most options.tolerance, or once the input row nearest to the iterate is
/// itself optimal.
GeometricMedianResult weiszfeld(const GradientSet& inputs, const GeometricMedianOptions& options = {});
Vecd geometric_median(const GradientSet& inputs, const GeometricMedianOptions& options = {});
/// Krum scores: sum of squared distances to the n-f-1 nearest other rows.
std::vector<double> krum_scores(const GradientSet& inputs, std::size_t f);
/// Average of the n-f rows with the smallest Krum scores.
Vecd multi_krum(const GradientSet& inputs, std::size_t f);

/// Nearest-neighbour mixing: row i becomes the mean of the n-f rows closest
/// to it (itself first, then by distance, ties by ascending index).
GradientSet nearest_neighbor_mixing(const GradientSet& inputs, std::size_t f);

Vecd apply_base_rule(BaseRule rule, const GradientSet& inputs, std::size_t f);

struct PipelineOutput {
  Vecd value;
  /// Present when the spec has a clipping stage.
  std::optional<ClipResult> clip;
};

/// Callable composition of the stages in a spec, applied in fixed order:
/// clipping, NNM, base rule, output clip.
using AggregatorFn = std::function<Vecd(const GradientSet&)>;

class Pipeline {
public:
  explicit Pipeline(AggregatorSpec spec);

  PipelineOutput run(const GradientSet& inputs, std::size_t f) const;
  Vecd operator()(const GradientSet& inputs, std::size_t f) const { return run(inputs, f).value; }

  /// Binds f, giving the single-argument form used by the attack and
  /// certification code.
  AggregatorFn bind(std::size_t f) const;

  const AggregatorSpec& spec() const noexcept { return spec_; }

private:
  AggregatorSpec spec_;
};

Pipeline build_pipeline(const AggregatorSpec& spec);

/// Runs the full pipeline described by `spec`.
Vecd aggregate(const AggregatorSpec& spec, const GradientSet& inputs, std::size_t f);

enum class KappaSource { NNMLemma, ArcAugmented, LowerBoundOnly };

std::string_view to_string(KappaSource source) noexcept;

struct KappaCertificate {
  double kappa = 0.0;
  KappaSource source = KappaSource::LowerBoundOnly;
};

/// Robustness coefficient certified for `spec` at (n, f). Only base∘NNM
/// compositions (optionally preceded by ARC) carry a certified value; every
/// other spec reports the universal lower bound f/(n-2f) with source
/// LowerBoundOnly.
KappaCertificate certify_kappa(const AggregatorSpec& spec, std::size_t n, std::size_t f);

}  // namespace arc

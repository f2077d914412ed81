#include "arc/clipping.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "arc/error.hpp"

namespace arc {

namespace {

void check_threshold(double threshold) {
  if (std::isnan(threshold) || threshold < 0.0) {
    raise(ErrorCode::NegativeThreshold, "clipping threshold must be >= 0");
  }
  if (!std::isfinite(threshold)) {
    raise(ErrorCode::InvalidArgument, "clipping threshold must be finite");
  }
}

// Rescales x (of norm `norm` > threshold) in place so its computed norm is
// at most threshold.
void shrink(std::span<double> x, double norm, double threshold, std::span<const double> source) {
  double factor = threshold / norm;
  // Rounding in a long norm can overshoot by many ulps; correct by the
  // measured excess and back off geometrically so the loop stays short.
  double backoff = std::numeric_limits<double>::epsilon();
  for (;;) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = factor * source[j];
    const double got = l2_norm(x);
    if (got <= threshold) return;
    factor *= (threshold / got) * (1.0 - backoff);
    backoff *= 2.0;
  }
}

// One pass for the copy; only rows above the threshold are touched again.
ClipResult clip_rows(const GradientSet& inputs, std::span<const double> norms, double threshold) {
  ClipResult result;
  result.threshold = threshold;
  result.clipped = inputs;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (norms[i] > threshold) {
      shrink(result.clipped.row_mut(i), norms[i], threshold, inputs.row(i));
      result.clipped_indices.push_back(i);
    }
  }
  return result;
}

}  // namespace

Vecd clip_to(std::span<const double> x, double threshold) {
  check_threshold(threshold);
  Vecd out(x.begin(), x.end());
  const double norm = l2_norm(x);
  if (norm > threshold) shrink(out, norm, threshold, x);
  return out;
}

ClipResult static_clip(const GradientSet& inputs, double threshold) {
  check_threshold(threshold);
  ClipResult result = clip_rows(inputs, inputs.norms(), threshold);
  result.k = result.clipped_indices.size();
  return result;
}

std::size_t arc_clip_count(std::size_t n, std::size_t f, double zeta) {
  if (n == 0) raise(ErrorCode::EmptyInput, "ARC needs at least one vector");
  if (!(zeta >= 0.0 && zeta <= 2.0)) raise(ErrorCode::InvalidArgument, "zeta must lie in [0, 2]");
  if (2 * f >= n) {
    raise(ErrorCode::TooManyByzantine,
          "ARC needs f < n/2 (n=" + std::to_string(n) + ", f=" + std::to_string(f) + ")");
  }
  if (zeta == 2.0) return (2 * f * (n - f)) / n;
  const double product = zeta * static_cast<double>(f) * static_cast<double>(n - f);
  return static_cast<std::size_t>(std::floor(product / static_cast<double>(n)));
}

ClipResult adaptive_robust_clip(const GradientSet& inputs, std::size_t f, double zeta) {
  const std::size_t k = arc_clip_count(inputs.size(), f, zeta);
  const auto norms = inputs.norms();
  const auto order = argsort_desc_stable(norms);
  ClipResult result = clip_rows(inputs, norms, norms[order[k]]);
  result.k = k;
  return result;
}

}  // namespace arc

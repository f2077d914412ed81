#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "arc/numkit.hpp"

namespace arc {

struct ClipResult {
  GradientSet clipped;
  /// Threshold C actually applied.
  double threshold = 0.0;
  /// Number of vectors targeted by the rule: floor(zeta (f/n)(n-f)) for ARC,
  /// |clipped_indices| for static clipping.
  std::size_t k = 0;
  /// Rows whose norm was strictly above the threshold, ascending.
  std::vector<std::size_t> clipped_indices;
};

/// min(1, C/||x||) x. Rows already within the threshold are returned
/// unchanged, and rescaled rows are nudged so their computed norm never
/// exceeds C. Throws NegativeThreshold for C < 0.
Vecd clip_to(std::span<const double> x, double threshold);

ClipResult static_clip(const GradientSet& inputs, double threshold);

/// floor(zeta * (f/n) * (n - f)); zeta = 2 is the standard setting.
std::size_t arc_clip_count(std::size_t n, std::size_t f, double zeta = 2.0);

/// Adaptive robust clipping: clip every row to the (k+1)-th largest input
/// norm, with k = arc_clip_count(n, f, zeta). Norm ties are ordered by
/// ascending index. Throws TooManyByzantine unless 2f < n, and
/// InvalidArgument when zeta is outside [0, 2].
ClipResult adaptive_robust_clip(const GradientSet& inputs, std::size_t f, double zeta = 2.0);

}  // namespace arc

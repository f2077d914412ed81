#pragma once

// Datasets, heterogeneous partitions across honest workers, and a loader for
// IDX (MNIST-style) files.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "arc/rng.hpp"

namespace arc {

/// Row-major N x dim feature matrix with one label per row.
struct Dataset {
  std::vector<double> features;
  std::vector<int> labels;
  std::size_t dim = 0;
  int num_classes = 0;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> row(std::size_t i) const { return {features.data() + i * dim, dim}; }

  /// Checks row count, label range and finiteness.
  void validate() const;
  Dataset subset(std::span<const std::size_t> indices) const;
  Dataset with_labels(std::vector<int> new_labels) const;
};

/// assignment[w] lists the sample indices held by worker w, ascending.
struct Partition {
  std::vector<std::vector<std::size_t>> assignment;

  std::size_t workers() const noexcept { return assignment.size(); }
  /// True when every index in [0, total) appears exactly once.
  bool is_exact_cover(std::size_t total) const;
};

/// Per class, a Dirichlet(alpha) draw over workers fixes the share of that
/// class each worker gets (largest-remainder rounding). Draws leaving a
/// worker empty are repeated up to 100 times, then EmptyWorkerRetry.
Partition dirichlet_partition(std::span<const int> labels, std::size_t n_workers, double alpha,
                              const RngStream& rng);

/// Stable sort by label, then equal contiguous chunks; the last worker takes
/// the remainder.
Partition extreme_partition(std::span<const int> labels, std::size_t n_workers);

/// K Gaussian blobs, per_class points each, labels in blocks 0..K-1.
///
/// Class k is centred at (1 + floor(k / d_in)) * e_(k mod d_in), so all
/// anchors are distinct; `spread` is the per-coordinate noise std.
Dataset synth_generate(int num_classes, std::size_t d_in, std::size_t per_class, double spread,
                       const RngStream& rng);

inline constexpr double kIdxPixelMean = 0.1307;
inline constexpr double kIdxPixelStd = 0.3081;

/// Loads an IDX image file (magic 0x00000803) and label file (0x00000801).
/// Pixels are mapped to ((p / 255) - 0.1307) / 0.3081.
Dataset idx_load(const std::filesystem::path& images, const std::filesystem::path& labels,
                 int num_classes = 10);

/// Writers for the same format; used to build fixtures.
void idx_write_images(const std::filesystem::path& path, std::uint32_t rows, std::uint32_t cols,
                      std::span<const std::uint8_t> pixels);
void idx_write_labels(const std::filesystem::path& path, std::span<const std::uint8_t> labels);

}  // namespace arc

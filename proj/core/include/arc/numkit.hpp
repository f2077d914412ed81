#pragma once

// Dense vector helpers and the GradientSet container shared by every module.
//
// All arithmetic is double precision and every reduction runs in ascending
// index order, so results do not depend on how work is split across threads.

#include <cstddef>
#include <span>
#include <vector>

namespace arc {

using Vecd = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> x);
double l2_norm(std::span<const double> x);
double squared_distance(std::span<const double> a, std::span<const double> b);

bool all_finite(std::span<const double> x) noexcept;
/// Throws NonFinite naming `what` when x holds a NaN or infinity.
void require_finite(std::span<const double> x, const char* what);

/// Indices ordering `values` non-increasingly; equal values keep ascending
/// index order.
std::vector<std::size_t> argsort_desc_stable(std::span<const double> values);

Vecd scaled(std::span<const double> x, double c);
Vecd add(std::span<const double> a, std::span<const double> b);
Vecd subtract(std::span<const double> a, std::span<const double> b);

/// n vectors of common dimension d stored row-major.
///
/// Construction rejects ragged rows (DimensionMismatch) and non-finite
/// entries (NonFinite). Mutable row access exists for in-place kernels; those
/// callers are responsible for keeping entries finite.
class GradientSet {
public:
  GradientSet() = default;
  GradientSet(std::size_t n, std::size_t d);

  static GradientSet from_rows(const std::vector<Vecd>& rows);
  static GradientSet from_flat(std::size_t n, std::size_t d, std::vector<double> data);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }
  bool empty() const noexcept { return n_ == 0; }

  std::span<const double> row(std::size_t i) const;
  std::span<double> row_mut(std::size_t i);
  Vecd row_vec(std::size_t i) const;
  void set_row(std::size_t i, std::span<const double> values);

  std::span<const double> flat() const noexcept { return data_; }

  std::vector<double> norms() const;
  double max_norm() const;

  /// Rows at `indices`, in the given order.
  GradientSet select(std::span<const std::size_t> indices) const;
  GradientSet scaled(double c) const;
  /// Appends `count` copies of `row`.
  void append_copies(std::span<const double> row, std::size_t count);
  void append(const GradientSet& other);

  std::vector<Vecd> to_rows() const;

  friend bool operator==(const GradientSet&, const GradientSet&) = default;

private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> data_;
};

/// Mean of the rows at `indices` (ascending order is the caller's choice).
///
/// Computed as x_first + (1/m) * sum (x_i - x_first), which returns the common
/// row bit-exactly when all selected rows are identical.
Vecd mean_of(const GradientSet& set, std::span<const std::size_t> indices);
Vecd mean_of(const GradientSet& set);

/// Same shifted-mean formula over a plain list of scalars.
double mean_of_values(std::span<const double> values);

}  // namespace arc

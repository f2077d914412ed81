#include "arc/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "arc/error.hpp"

namespace arc {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) raise(ErrorCode::DimensionMismatch, "dot: length mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
  return acc;
}

double squared_norm(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

double l2_norm(std::span<const double> x) { return std::sqrt(squared_norm(x)); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) raise(ErrorCode::DimensionMismatch, "distance: length mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    acc += diff * diff;
  }
  return acc;
}

bool all_finite(std::span<const double> x) noexcept {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

void require_finite(std::span<const double> x, const char* what) {
  if (!all_finite(x)) raise(ErrorCode::NonFinite, std::string(what) + " contains NaN or infinity");
}

std::vector<std::size_t> argsort_desc_stable(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

Vecd scaled(std::span<const double> x, double c) {
  Vecd out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = c * x[j];
  return out;
}

Vecd add(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) raise(ErrorCode::DimensionMismatch, "add: length mismatch");
  Vecd out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + b[j];
  return out;
}

Vecd subtract(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) raise(ErrorCode::DimensionMismatch, "subtract: length mismatch");
  Vecd out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] - b[j];
  return out;
}

GradientSet::GradientSet(std::size_t n, std::size_t d) : n_(n), d_(d), data_(n * d, 0.0) {}

GradientSet GradientSet::from_rows(const std::vector<Vecd>& rows) {
  GradientSet out;
  if (rows.empty()) return out;
  out.n_ = rows.size();
  out.d_ = rows.front().size();
  out.data_.reserve(out.n_ * out.d_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != out.d_) {
      raise(ErrorCode::DimensionMismatch, "row " + std::to_string(i) + " has dimension " +
                                              std::to_string(rows[i].size()) + ", expected " +
                                              std::to_string(out.d_));
    }
    require_finite(rows[i], "gradient row");
    out.data_.insert(out.data_.end(), rows[i].begin(), rows[i].end());
  }
  return out;
}

GradientSet GradientSet::from_flat(std::size_t n, std::size_t d, std::vector<double> data) {
  if (data.size() != n * d) raise(ErrorCode::DimensionMismatch, "flat buffer size is not n*d");
  require_finite(data, "gradient set");
  GradientSet out;
  out.n_ = n;
  out.d_ = d;
  out.data_ = std::move(data);
  return out;
}

std::span<const double> GradientSet::row(std::size_t i) const {
  return std::span<const double>(data_).subspan(i * d_, d_);
}

std::span<double> GradientSet::row_mut(std::size_t i) {
  return std::span<double>(data_).subspan(i * d_, d_);
}

Vecd GradientSet::row_vec(std::size_t i) const {
  auto r = row(i);
  return Vecd(r.begin(), r.end());
}

void GradientSet::set_row(std::size_t i, std::span<const double> values) {
  if (values.size() != d_) raise(ErrorCode::DimensionMismatch, "set_row: dimension mismatch");
  require_finite(values, "gradient row");
  std::copy(values.begin(), values.end(), row_mut(i).begin());
}

std::vector<double> GradientSet::norms() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = l2_norm(row(i));
  return out;
}

double GradientSet::max_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < n_; ++i) best = std::max(best, l2_norm(row(i)));
  return best;
}

GradientSet GradientSet::select(std::span<const std::size_t> indices) const {
  GradientSet out(indices.size(), d_);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= n_) raise(ErrorCode::InvalidArgument, "select: index out of range");
    auto src = row(indices[r]);
    std::copy(src.begin(), src.end(), out.row_mut(r).begin());
  }
  return out;
}

GradientSet GradientSet::scaled(double c) const {
  GradientSet out = *this;
  for (double& v : out.data_) v *= c;
  return out;
}

void GradientSet::append_copies(std::span<const double> values, std::size_t count) {
  if (n_ == 0 && data_.empty()) d_ = values.size();
  if (values.size() != d_) raise(ErrorCode::DimensionMismatch, "append: dimension mismatch");
  require_finite(values, "appended row");
  for (std::size_t c = 0; c < count; ++c) data_.insert(data_.end(), values.begin(), values.end());
  n_ += count;
}

void GradientSet::append(const GradientSet& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) d_ = other.d_;
  if (other.d_ != d_) raise(ErrorCode::DimensionMismatch, "append: dimension mismatch");
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
  n_ += other.n_;
}

std::vector<Vecd> GradientSet::to_rows() const {
  std::vector<Vecd> rows;
  rows.reserve(n_);
  for (std::size_t i = 0; i < n_; ++i) rows.push_back(row_vec(i));
  return rows;
}

Vecd mean_of(const GradientSet& set, std::span<const std::size_t> indices) {
  if (indices.empty()) raise(ErrorCode::EmptyInput, "mean of an empty selection");
  const auto anchor = set.row(indices.front());
  Vecd acc(set.dim(), 0.0);
  for (std::size_t r = 1; r < indices.size(); ++r) {
    auto x = set.row(indices[r]);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += x[j] - anchor[j];
  }
  const double m = static_cast<double>(indices.size());
  Vecd out(set.dim());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = anchor[j] + acc[j] / m;
  return out;
}

Vecd mean_of(const GradientSet& set) {
  std::vector<std::size_t> all(set.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return mean_of(set, all);
}

double mean_of_values(std::span<const double> values) {
  if (values.empty()) raise(ErrorCode::EmptyInput, "mean of no values");
  const double anchor = values.front();
  double acc = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) acc += values[i] - anchor;
  return anchor + acc / static_cast<double>(values.size());
}

}  // namespace arc

#include "arc/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "arc/error.hpp"
#include "arc/numkit.hpp"

namespace arc {

void Dataset::validate() const {
  if (features.size() != labels.size() * dim) {
    raise(ErrorCode::DimensionMismatch, "dataset has " + std::to_string(features.size()) +
                                            " feature values for " +
                                            std::to_string(labels.size()) + " rows of dim " +
                                            std::to_string(dim));
  }
  for (int l : labels) {
    if (l < 0 || l >= num_classes) {
      raise(ErrorCode::LabelOutOfRange, "label " + std::to_string(l) + " outside [0, " +
                                            std::to_string(num_classes) + ")");
    }
  }
  require_finite(features, "dataset features");
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.dim = dim;
  out.num_classes = num_classes;
  out.features.reserve(indices.size() * dim);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= size()) raise(ErrorCode::InvalidArgument, "subset index out of range");
    auto r = row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
  }
  return out;
}

Dataset Dataset::with_labels(std::vector<int> new_labels) const {
  if (new_labels.size() != labels.size()) {
    raise(ErrorCode::CountMismatch, "relabelling must keep the sample count");
  }
  Dataset out = *this;
  out.labels = std::move(new_labels);
  return out;
}

bool Partition::is_exact_cover(std::size_t total) const {
  std::vector<int> seen(total, 0);
  for (const auto& list : assignment) {
    for (std::size_t i : list) {
      if (i >= total || seen[i]++ != 0) return false;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

namespace {

// floor(p_w * m) per worker, then the leftover units go to the largest
// fractional parts (lowest index first on ties).
std::vector<std::size_t> largest_remainder(std::span<const double> shares, std::size_t m) {
  const std::size_t k = shares.size();
  std::vector<std::size_t> counts(k);
  std::vector<double> frac(k);
  std::size_t assigned = 0;
  for (std::size_t w = 0; w < k; ++w) {
    const double exact = shares[w] * static_cast<double>(m);
    counts[w] = std::min(static_cast<std::size_t>(std::floor(exact)), m);
    frac[w] = exact - std::floor(exact);
    assigned += counts[w];
  }
  // Guard against shares summing slightly above one.
  while (assigned > m) {
    const auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --assigned;
  }
  const auto order = argsort_desc_stable(frac);
  for (std::size_t r = 0; assigned < m; r = (r + 1) % k) {
    ++counts[order[r]];
    ++assigned;
  }
  return counts;
}

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.uniform_index(i)]);
  }
}

}  // namespace

Partition dirichlet_partition(std::span<const int> labels, std::size_t n_workers, double alpha,
                              const RngStream& rng) {
  if (n_workers == 0) raise(ErrorCode::InvalidArgument, "need at least one worker");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    raise(ErrorCode::InvalidArgument, "Dirichlet alpha must be positive and finite");
  }
  int max_label = -1;
  for (int l : labels) {
    if (l < 0) raise(ErrorCode::LabelOutOfRange, "negative label");
    max_label = std::max(max_label, l);
  }
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(max_label + 1));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }

  constexpr int kMaxRedraws = 100;
  for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
    Rng gen = rng.child(static_cast<std::uint64_t>(attempt)).generator();
    Partition part;
    part.assignment.resize(n_workers);
    for (auto members : by_class) {
      if (members.empty()) continue;
      shuffle(members, gen);
      const auto shares = gen.dirichlet(n_workers, alpha);
      const auto counts = largest_remainder(shares, members.size());
      std::size_t cursor = 0;
      for (std::size_t w = 0; w < n_workers; ++w) {
        for (std::size_t c = 0; c < counts[w]; ++c) part.assignment[w].push_back(members[cursor++]);
      }
    }
    const bool any_empty = std::any_of(part.assignment.begin(), part.assignment.end(),
                                       [](const auto& v) { return v.empty(); });
    if (!any_empty) {
      for (auto& v : part.assignment) std::sort(v.begin(), v.end());
      return part;
    }
  }
  raise(ErrorCode::EmptyWorkerRetry,
        "some worker received no samples after 100 Dirichlet redraws (alpha=" +
            std::to_string(alpha) + ", workers=" + std::to_string(n_workers) + ")");
}

Partition extreme_partition(std::span<const int> labels, std::size_t n_workers) {
  if (n_workers == 0) raise(ErrorCode::InvalidArgument, "need at least one worker");
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  const std::size_t chunk = labels.size() / n_workers;
  Partition part;
  part.assignment.resize(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = (w + 1 == n_workers) ? labels.size() : begin + chunk;
    part.assignment[w].assign(order.begin() + static_cast<std::ptrdiff_t>(begin),
                              order.begin() + static_cast<std::ptrdiff_t>(end));
    std::sort(part.assignment[w].begin(), part.assignment[w].end());
  }
  return part;
}

Dataset synth_generate(int num_classes, std::size_t d_in, std::size_t per_class, double spread,
                       const RngStream& rng) {
  if (num_classes < 2) raise(ErrorCode::InvalidArgument, "need at least two classes");
  if (per_class < 1) raise(ErrorCode::InvalidArgument, "need at least one sample per class");
  if (d_in < 1) raise(ErrorCode::InvalidArgument, "input dimension must be positive");
  if (!(spread >= 0.0) || !std::isfinite(spread)) {
    raise(ErrorCode::InvalidArgument, "spread must be finite and nonnegative");
  }
  Dataset out;
  out.dim = d_in;
  out.num_classes = num_classes;
  const auto total = static_cast<std::size_t>(num_classes) * per_class;
  out.features.assign(total * d_in, 0.0);
  out.labels.reserve(total);
  Rng gen = rng.generator();
  std::size_t r = 0;
  for (int k = 0; k < num_classes; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const std::size_t axis = uk % d_in;
    const double radius = 1.0 + static_cast<double>(uk / d_in);
    for (std::size_t s = 0; s < per_class; ++s, ++r) {
      double* x = out.features.data() + r * d_in;
      for (std::size_t j = 0; j < d_in; ++j) x[j] = spread * gen.normal();
      x[axis] += radius;
      out.labels.push_back(k);
    }
  }
  return out;
}

}  // namespace arc

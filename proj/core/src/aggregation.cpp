#include "arc/aggregation.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include "arc/error.hpp"
#include "arc/theory.hpp"

namespace arc {

namespace {

void require_inputs(const GradientSet& inputs) {
  if (inputs.empty()) raise(ErrorCode::EmptyInput, "aggregation needs at least one vector");
}

void require_trimmable(const GradientSet& inputs, std::size_t f, const char* rule) {
  if (inputs.size() <= 2 * f) {
    raise(ErrorCode::InsufficientWorkers,
          std::string(rule) + " needs n > 2f (n=" + std::to_string(inputs.size()) +
              ", f=" + std::to_string(f) + ")");
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

std::vector<double> pairwise_squared_distances(const GradientSet& inputs) {
  const std::size_t n = inputs.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d2 = squared_distance(inputs.row(i), inputs.row(j));
      dist[i * n + j] = d2;
      dist[j * n + i] = d2;
    }
  }
  return dist;
}

}  // namespace

std::string_view to_string(BaseRule rule) noexcept {
  switch (rule) {
    case BaseRule::Mean: return "mean";
    case BaseRule::CWTM: return "cwtm";
    case BaseRule::CWMed: return "cwmed";
    case BaseRule::GM: return "gm";
    case BaseRule::MultiKrum: return "mk";
  }
  return "mean";
}

BaseRule parse_base_rule(std::string_view name) {
  const std::string key = lower(name);
  if (key == "mean" || key == "avg" || key == "average") return BaseRule::Mean;
  if (key == "cwtm" || key == "trimmed_mean") return BaseRule::CWTM;
  if (key == "cwmed" || key == "median") return BaseRule::CWMed;
  if (key == "gm" || key == "geomed" || key == "geometric_median") return BaseRule::GM;
  if (key == "mk" || key == "multikrum" || key == "multi_krum" || key == "krum") {
    return BaseRule::MultiKrum;
  }
  raise(ErrorCode::InvalidArgument, "unknown aggregation rule '" + std::string(name) + "'");
}

AggregatorSpec AggregatorSpec::parse(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t plus = text.find('+', start);
    const std::size_t end = plus == std::string_view::npos ? text.size() : plus;
    tokens.push_back(lower(text.substr(start, end - start)));
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  if (tokens.empty() || tokens.front().empty()) {
    raise(ErrorCode::InvalidArgument, "empty aggregator spec");
  }

  AggregatorSpec spec;
  spec.base = parse_base_rule(tokens.front());
  for (std::size_t t = 1; t < tokens.size(); ++t) {
    const std::string& tok = tokens[t];
    if (tok == "nnm") {
      spec.use_nnm = true;
    } else if (tok == "arc") {
      if (spec.clip.kind != ClipKind::None) raise(ErrorCode::InvalidArgument, "two clipping stages");
      spec.clip.kind = ClipKind::Arc;
    } else if (tok == "wlog") {
      spec.wlog_output_clip = true;
    } else if (tok.rfind("static:", 0) == 0 || tok.rfind("clip:", 0) == 0) {
      if (spec.clip.kind != ClipKind::None) raise(ErrorCode::InvalidArgument, "two clipping stages");
      const std::string value = tok.substr(tok.find(':') + 1);
      double c = 0.0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), c);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        raise(ErrorCode::InvalidArgument, "bad static threshold '" + value + "'");
      }
      if (c < 0.0) raise(ErrorCode::NegativeThreshold, "static threshold must be >= 0");
      spec.clip = {ClipKind::Static, c};
    } else {
      raise(ErrorCode::InvalidArgument, "unknown aggregator token '" + tok + "'");
    }
  }
  return spec;
}

std::string AggregatorSpec::to_string() const {
  std::string out(arc::to_string(base));
  if (use_nnm) out += "+nnm";
  if (clip.kind == ClipKind::Arc) {
    out += "+arc";
  } else if (clip.kind == ClipKind::Static) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), clip.threshold);
    out += "+static:" + std::string(buf, res.ptr);
  }
  if (wlog_output_clip) out += "+wlog";
  return out;
}

Vecd mean(const GradientSet& inputs) {
  require_inputs(inputs);
  return mean_of(inputs);
}

Vecd coordinate_trimmed_mean(const GradientSet& inputs, std::size_t f) {
  require_inputs(inputs);
  require_trimmable(inputs, f, "CWTM");
  const std::size_t n = inputs.size();
  Vecd out(inputs.dim());
  std::vector<double> column(n);
  for (std::size_t j = 0; j < inputs.dim(); ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = inputs.row(i)[j];
    std::sort(column.begin(), column.end());
    out[j] = mean_of_values(std::span<const double>(column).subspan(f, n - 2 * f));
  }
  return out;
}

Vecd coordinate_median(const GradientSet& inputs) {
  require_inputs(inputs);
  const std::size_t n = inputs.size();
  Vecd out(inputs.dim());
  std::vector<double> column(n);
  for (std::size_t j = 0; j < inputs.dim(); ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = inputs.row(i)[j];
    std::sort(column.begin(), column.end());
    if (n % 2 == 1) {
      out[j] = column[n / 2];
    } else {
      const double a = column[n / 2 - 1];
      const double b = column[n / 2];
      out[j] = a + (b - a) / 2.0;
    }
  }
  return out;
}

namespace {

// || sum_{i : x_i != x_k} (x_i - x_k) / ||x_i - x_k|| || minus the number of
// extra rows equal to x_k.
double pull_at_row(const GradientSet& inputs, std::size_t k) {
  const std::size_t d = inputs.dim();
  Vecd pull(d, 0.0);
  double duplicates = 0.0;
  auto xk = inputs.row(k);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i == k) continue;
    auto x = inputs.row(i);
    const double dist = std::sqrt(squared_distance(x, xk));
    if (dist == 0.0) {
      duplicates += 1.0;
      continue;
    }
    for (std::size_t j = 0; j < d; ++j) pull[j] += (x[j] - xk[j]) / dist;
  }
  return l2_norm(pull) - duplicates;
}

}  // namespace

GeometricMedianResult weiszfeld(const GradientSet& inputs, const GeometricMedianOptions& options) {
  require_inputs(inputs);
  const std::size_t n = inputs.size();
  const std::size_t d = inputs.dim();

  GeometricMedianResult result;
  result.point = mean_of(inputs);
  Vecd weighted(d);
  std::vector<double> weights(n);
  for (int iter = 0;; ++iter) {
    // Weighted displacement sum_i w_i (x_i - g) and the residual it implies.
    std::fill(weighted.begin(), weighted.end(), 0.0);
    double total_weight = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto x = inputs.row(i);
      const double dist = std::sqrt(squared_distance(x, result.point));
      weights[i] = 1.0 / std::max(dist, options.guard);
      total_weight += weights[i];
      for (std::size_t j = 0; j < d; ++j) weighted[j] += weights[i] * (x[j] - result.point[j]);
    }
    result.residual = l2_norm(weighted);
    result.iterations = iter;
    if (result.residual <= options.tolerance) {
      result.converged = true;
      return result;
    }
    // Weiszfeld only creeps towards a median sitting on an input row, so test
    // the nearest row directly: x_k is optimal iff the unit vectors from x_k
    // to the other rows sum to norm <= 1.
    const std::size_t k = static_cast<std::size_t>(
        std::max_element(weights.begin(), weights.end()) - weights.begin());
    const double at_row = pull_at_row(inputs, k);
    if (at_row <= 1.0 + options.tolerance) {
      result.point = inputs.row_vec(k);
      result.residual = std::max(0.0, at_row - 1.0);
      result.converged = true;
      return result;
    }
    if (iter >= options.max_iterations) return result;
    for (std::size_t j = 0; j < d; ++j) result.point[j] += weighted[j] / total_weight;
  }
}

Vecd geometric_median(const GradientSet& inputs, const GeometricMedianOptions& options) {
  return weiszfeld(inputs, options).point;
}

std::vector<double> krum_scores(const GradientSet& inputs, std::size_t f) {
  require_inputs(inputs);
  require_trimmable(inputs, f, "Multi-Krum");
  const std::size_t n = inputs.size();
  const std::size_t neighbours = n - f - 1;
  const auto dist = pairwise_squared_distances(inputs);
  std::vector<double> scores(n, 0.0);
  std::vector<double> others;
  others.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    others.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(dist[i * n + j]);
    }
    std::sort(others.begin(), others.end());
    double score = 0.0;
    for (std::size_t r = 0; r < neighbours; ++r) score += others[r];
    scores[i] = score;
  }
  return scores;
}

Vecd multi_krum(const GradientSet& inputs, std::size_t f) {
  const auto scores = krum_scores(inputs, f);
  auto order = iota_indices(inputs.size());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  order.resize(inputs.size() - f);
  std::sort(order.begin(), order.end());
  return mean_of(inputs, order);
}

GradientSet nearest_neighbor_mixing(const GradientSet& inputs, std::size_t f) {
  require_inputs(inputs);
  const std::size_t n = inputs.size();
  if (f >= n) {
    raise(ErrorCode::InsufficientWorkers,
          "NNM needs f < n (n=" + std::to_string(n) + ", f=" + std::to_string(f) + ")");
  }
  const auto dist = pairwise_squared_distances(inputs);
  GradientSet out(n, inputs.dim());
  std::vector<std::size_t> others;
  others.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    others.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
      return dist[i * n + a] < dist[i * n + b];
    });
    std::vector<std::size_t> neighbourhood{i};
    neighbourhood.insert(neighbourhood.end(), others.begin(),
                         others.begin() + static_cast<std::ptrdiff_t>(n - f - 1));
    std::sort(neighbourhood.begin(), neighbourhood.end());
    const Vecd mixed = mean_of(inputs, neighbourhood);
    std::copy(mixed.begin(), mixed.end(), out.row_mut(i).begin());
  }
  return out;
}

Vecd apply_base_rule(BaseRule rule, const GradientSet& inputs, std::size_t f) {
  switch (rule) {
    case BaseRule::Mean: return mean(inputs);
    case BaseRule::CWTM: return coordinate_trimmed_mean(inputs, f);
    case BaseRule::CWMed: return coordinate_median(inputs);
    case BaseRule::GM: return geometric_median(inputs);
    case BaseRule::MultiKrum: return multi_krum(inputs, f);
  }
  raise(ErrorCode::InvalidArgument, "unknown base rule");
}

Pipeline::Pipeline(AggregatorSpec spec) : spec_(spec) {
  if (spec_.clip.kind == ClipKind::Static && !(spec_.clip.threshold >= 0.0)) {
    raise(ErrorCode::NegativeThreshold, "static threshold must be >= 0");
  }
}

PipelineOutput Pipeline::run(const GradientSet& inputs, std::size_t f) const {
  require_inputs(inputs);
  PipelineOutput out;
  const GradientSet* stage = &inputs;
  if (spec_.clip.kind == ClipKind::Static) {
    out.clip = static_clip(inputs, spec_.clip.threshold);
    stage = &out.clip->clipped;
  } else if (spec_.clip.kind == ClipKind::Arc) {
    out.clip = adaptive_robust_clip(inputs, f, spec_.clip_fraction_zeta);
    stage = &out.clip->clipped;
  }

  // Output clipping radius: largest norm entering the NNM + base stage.
  const double radius = spec_.wlog_output_clip ? stage->max_norm() : 0.0;

  if (spec_.use_nnm) {
    const GradientSet mixed = nearest_neighbor_mixing(*stage, f);
    out.value = apply_base_rule(spec_.base, mixed, f);
  } else {
    out.value = apply_base_rule(spec_.base, *stage, f);
  }
  if (spec_.wlog_output_clip) out.value = clip_to(out.value, radius);
  return out;
}

std::function<Vecd(const GradientSet&)> Pipeline::bind(std::size_t f) const {
  return [pipeline = *this, f](const GradientSet& inputs) { return pipeline(inputs, f); };
}

Pipeline build_pipeline(const AggregatorSpec& spec) { return Pipeline(spec); }

Vecd aggregate(const AggregatorSpec& spec, const GradientSet& inputs, std::size_t f) {
  return Pipeline(spec)(inputs, f);
}

std::string_view to_string(KappaSource source) noexcept {
  switch (source) {
    case KappaSource::NNMLemma: return "nnm_lemma";
    case KappaSource::ArcAugmented: return "arc_augmented";
    case KappaSource::LowerBoundOnly: return "lower_bound_only";
  }
  return "lower_bound_only";
}

KappaCertificate certify_kappa(const AggregatorSpec& spec, std::size_t n, std::size_t f) {
  const auto bounds = theory::kappa_bounds(n, f);
  const bool certified_base = spec.use_nnm && spec.base != BaseRule::Mean;
  if (certified_base && spec.clip.kind == ClipKind::None) {
    return {bounds.nnm_upper, KappaSource::NNMLemma};
  }
  if (certified_base && spec.clip.kind == ClipKind::Arc) {
    return {bounds.nnm_upper + bounds.arc_increment, KappaSource::ArcAugmented};
  }
  return {bounds.lower, KappaSource::LowerBoundOnly};
}

}  // namespace arc

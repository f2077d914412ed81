#include "arc/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include "arc/error.hpp"

namespace arc {

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Logistic: return "logistic";
    case ModelKind::MLP1: return "mlp";
    case ModelKind::Quadratic: return "quadratic";
  }
  return "logistic";
}

ModelKind parse_model_kind(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "logistic" || key == "logreg") return ModelKind::Logistic;
  if (key == "mlp" || key == "mlp1") return ModelKind::MLP1;
  if (key == "quadratic") return ModelKind::Quadratic;
  raise(ErrorCode::InvalidArgument, "unknown model '" + std::string(name) + "'");
}

void ModelSpec::validate() const {
  if (input_dim == 0) raise(ErrorCode::InvalidArgument, "model input_dim must be positive");
  if (!(l2_reg >= 0.0) || !std::isfinite(l2_reg)) {
    raise(ErrorCode::InvalidArgument, "l2_reg must be finite and nonnegative");
  }
  switch (kind) {
    case ModelKind::MLP1:
      if (hidden == 0) raise(ErrorCode::InvalidArgument, "MLP hidden width must be positive");
      [[fallthrough]];
    case ModelKind::Logistic:
      if (num_classes < 2) raise(ErrorCode::InvalidArgument, "need at least two classes");
      break;
    case ModelKind::Quadratic:
      if (curvature.size() != input_dim) {
        raise(ErrorCode::DimensionMismatch, "quadratic curvature must have input_dim entries");
      }
      if (!linear.empty() && linear.size() != input_dim) {
        raise(ErrorCode::DimensionMismatch, "quadratic linear term must have input_dim entries");
      }
      for (double a : curvature) {
        if (!(a > 0.0) || !std::isfinite(a)) {
          raise(ErrorCode::InvalidArgument, "quadratic curvature must be positive and finite");
        }
      }
      require_finite(linear, "quadratic linear term");
      break;
  }
}

std::size_t parameter_count(const ModelSpec& spec) {
  const auto k = static_cast<std::size_t>(spec.num_classes);
  switch (spec.kind) {
    case ModelKind::Logistic: return k * spec.input_dim + k;
    case ModelKind::MLP1: return spec.hidden * spec.input_dim + spec.hidden + k * spec.hidden + k;
    case ModelKind::Quadratic: return spec.input_dim;
  }
  return 0;
}

Vecd init_parameters(const ModelSpec& spec, double init_scale, const RngStream& rng) {
  spec.validate();
  if (!(init_scale > 0.0) || !std::isfinite(init_scale)) {
    raise(ErrorCode::InvalidArgument, "init_scale must be positive and finite");
  }
  Rng gen = rng.generator();
  Vecd theta(parameter_count(spec), 0.0);
  auto fill = [&](std::size_t offset, std::size_t count, double bound) {
    for (std::size_t i = 0; i < count; ++i) theta[offset + i] = init_scale * gen.uniform(-bound, bound);
  };
  const auto k = static_cast<std::size_t>(spec.num_classes);
  const std::size_t d = spec.input_dim;
  switch (spec.kind) {
    case ModelKind::Logistic:
      fill(0, k * d, 1.0 / std::sqrt(static_cast<double>(d)));
      break;
    case ModelKind::MLP1:
      fill(0, spec.hidden * d, 1.0 / std::sqrt(static_cast<double>(d)));
      fill(spec.hidden * d + spec.hidden, k * spec.hidden,
           1.0 / std::sqrt(static_cast<double>(spec.hidden)));
      break;
    case ModelKind::Quadratic:
      fill(0, d, 1.0);
      break;
  }
  return theta;
}

namespace {

// Softmax cross-entropy for one row given logits; adds (p - onehot) into dlogits.
double softmax_xent(std::span<const double> logits, int label, std::span<double> dlogits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - top);
  const double log_z = top + std::log(z);
  for (std::size_t c = 0; c < logits.size(); ++c) dlogits[c] = std::exp(logits[c] - log_z);
  dlogits[static_cast<std::size_t>(label)] -= 1.0;
  return log_z - logits[static_cast<std::size_t>(label)];
}

void check_shapes(const ModelSpec& spec, std::span<const double> theta, const Dataset& data) {
  if (theta.size() != parameter_count(spec)) {
    raise(ErrorCode::DimensionMismatch, "parameter vector has " + std::to_string(theta.size()) +
                                            " entries, model expects " +
                                            std::to_string(parameter_count(spec)));
  }
  if (data.dim != spec.input_dim) {
    raise(ErrorCode::DimensionMismatch, "dataset dim " + std::to_string(data.dim) +
                                            " does not match model input_dim " +
                                            std::to_string(spec.input_dim));
  }
  if (spec.kind != ModelKind::Quadratic && data.num_classes > spec.num_classes) {
    raise(ErrorCode::DimensionMismatch, "dataset has more classes than the model");
  }
}

struct MlpView {
  std::size_t d, h, k;
  const double* w1;
  const double* b1;
  const double* w2;
  const double* b2;

  MlpView(const ModelSpec& spec, std::span<const double> theta)
      : d(spec.input_dim), h(spec.hidden), k(static_cast<std::size_t>(spec.num_classes)),
        w1(theta.data()), b1(w1 + h * d), w2(b1 + h), b2(w2 + k * h) {}
};

}  // namespace

Vecd class_scores(const ModelSpec& spec, std::span<const double> theta, std::span<const double> x) {
  const auto k = static_cast<std::size_t>(spec.num_classes);
  const std::size_t d = spec.input_dim;
  Vecd logits(k, 0.0);
  switch (spec.kind) {
    case ModelKind::Logistic:
      for (std::size_t c = 0; c < k; ++c) {
        double acc = theta[k * d + c];
        for (std::size_t j = 0; j < d; ++j) acc += theta[c * d + j] * x[j];
        logits[c] = acc;
      }
      break;
    case ModelKind::MLP1: {
      const MlpView m(spec, theta);
      Vecd hidden(m.h);
      for (std::size_t u = 0; u < m.h; ++u) {
        double acc = m.b1[u];
        for (std::size_t j = 0; j < d; ++j) acc += m.w1[u * d + j] * x[j];
        hidden[u] = std::max(acc, 0.0);
      }
      for (std::size_t c = 0; c < k; ++c) {
        double acc = m.b2[c];
        for (std::size_t u = 0; u < m.h; ++u) acc += m.w2[c * m.h + u] * hidden[u];
        logits[c] = acc;
      }
      break;
    }
    case ModelKind::Quadratic:
      raise(ErrorCode::InvalidArgument, "the quadratic model has no class scores");
  }
  return logits;
}

int predict(const ModelSpec& spec, std::span<const double> theta, std::span<const double> x) {
  const Vecd logits = class_scores(spec, theta, x);
  return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

double loss_and_gradient(const ModelSpec& spec, std::span<const double> theta, const Dataset& data,
                         std::span<const std::size_t> indices, Vecd* grad) {
  check_shapes(spec, theta, data);
  if (indices.empty()) raise(ErrorCode::EmptyInput, "loss over an empty batch");
  const std::size_t p = theta.size();
  const std::size_t d = spec.input_dim;
  const auto k = static_cast<std::size_t>(spec.num_classes);
  const double inv_m = 1.0 / static_cast<double>(indices.size());
  Vecd g(p, 0.0);
  double loss = 0.0;

  switch (spec.kind) {
    case ModelKind::Logistic: {
      Vecd dlogits(k);
      for (std::size_t i : indices) {
        auto x = data.row(i);
        const Vecd logits = class_scores(spec, theta, x);
        loss += softmax_xent(logits, data.labels[i], dlogits);
        for (std::size_t c = 0; c < k; ++c) {
          for (std::size_t j = 0; j < d; ++j) g[c * d + j] += dlogits[c] * x[j];
          g[k * d + c] += dlogits[c];
        }
      }
      break;
    }
    case ModelKind::MLP1: {
      const MlpView m(spec, theta);
      const std::size_t off_b1 = m.h * d, off_w2 = off_b1 + m.h, off_b2 = off_w2 + k * m.h;
      Vecd pre(m.h), hidden(m.h), logits(k), dlogits(k), dhidden(m.h);
      for (std::size_t i : indices) {
        auto x = data.row(i);
        for (std::size_t u = 0; u < m.h; ++u) {
          double acc = m.b1[u];
          for (std::size_t j = 0; j < d; ++j) acc += m.w1[u * d + j] * x[j];
          pre[u] = acc;
          hidden[u] = std::max(acc, 0.0);
        }
        for (std::size_t c = 0; c < k; ++c) {
          double acc = m.b2[c];
          for (std::size_t u = 0; u < m.h; ++u) acc += m.w2[c * m.h + u] * hidden[u];
          logits[c] = acc;
        }
        loss += softmax_xent(logits, data.labels[i], dlogits);
        std::fill(dhidden.begin(), dhidden.end(), 0.0);
        for (std::size_t c = 0; c < k; ++c) {
          for (std::size_t u = 0; u < m.h; ++u) {
            g[off_w2 + c * m.h + u] += dlogits[c] * hidden[u];
            dhidden[u] += dlogits[c] * m.w2[c * m.h + u];
          }
          g[off_b2 + c] += dlogits[c];
        }
        for (std::size_t u = 0; u < m.h; ++u) {
          if (pre[u] <= 0.0) continue;
          for (std::size_t j = 0; j < d; ++j) g[u * d + j] += dhidden[u] * x[j];
          g[off_b1 + u] += dhidden[u];
        }
      }
      break;
    }
    case ModelKind::Quadratic: {
      const auto& a = spec.curvature;
      for (std::size_t i : indices) {
        auto z = data.row(i);
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = theta[j] - z[j];
          loss += 0.5 * a[j] * diff * diff;
          g[j] += a[j] * diff;
        }
      }
      loss *= inv_m;
      for (double& v : g) v *= inv_m;
      if (!spec.linear.empty()) {
        loss += dot(spec.linear, theta);
        for (std::size_t j = 0; j < d; ++j) g[j] += spec.linear[j];
      }
      if (grad) *grad = std::move(g);
      return loss;
    }
  }

  loss *= inv_m;
  for (double& v : g) v *= inv_m;
  if (spec.l2_reg > 0.0) {
    loss += 0.5 * spec.l2_reg * squared_norm(theta);
    for (std::size_t j = 0; j < p; ++j) g[j] += spec.l2_reg * theta[j];
  }
  if (grad) *grad = std::move(g);
  return loss;
}

double loss_and_gradient(const ModelSpec& spec, std::span<const double> theta, const Dataset& data,
                         Vecd* grad) {
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return loss_and_gradient(spec, theta, data, all, grad);
}

double evaluate(const ModelSpec& spec, std::span<const double> theta, const Dataset& data) {
  if (spec.kind == ModelKind::Quadratic) {
    raise(ErrorCode::InvalidArgument, "accuracy is undefined for the quadratic model");
  }
  check_shapes(spec, theta, data);
  if (data.size() == 0) raise(ErrorCode::EmptyInput, "cannot evaluate on an empty set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (predict(spec, theta, data.row(i)) == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double lipschitz_constant(const ModelSpec& spec) {
  if (spec.kind != ModelKind::Quadratic) {
    raise(ErrorCode::UnknownLipschitz,
          std::string("no known gradient Lipschitz constant for the ") +
              std::string(to_string(spec.kind)) + " model");
  }
  spec.validate();
  return *std::max_element(spec.curvature.begin(), spec.curvature.end());
}

}  // namespace arc

#pragma once

// Models trained by the simulator. Parameters live in one flat vector:
//   Logistic:  W (K x d_in, row-major), then bias (K)
//   MLP1:      W1 (hidden x d_in), b1 (hidden), W2 (K x hidden), b2 (K)
//   Quadratic: theta (d_in)
//
// Logistic and MLP1 minimise the mean multinomial negative log-likelihood
// plus (l2_reg / 2) ||theta||^2. The quadratic model treats each feature row
// z as a centre: loss(z) = 1/2 sum_j a_j (theta_j - z_j)^2 + <b, theta>, so
// its gradient is Lipschitz with constant max_j a_j. Labels are ignored there.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "arc/data.hpp"
#include "arc/numkit.hpp"
#include "arc/rng.hpp"

namespace arc {

enum class ModelKind { Logistic, MLP1, Quadratic };

std::string_view to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::Logistic;
  int num_classes = 10;
  std::size_t input_dim = 0;
  std::size_t hidden = 32;
  double l2_reg = 1e-4;
  /// Quadratic only: curvature a (positive) and linear term b; empty b means zero.
  Vecd curvature;
  Vecd linear;

  void validate() const;
  bool has_accuracy() const noexcept { return kind != ModelKind::Quadratic; }
};

std::size_t parameter_count(const ModelSpec& spec);

/// Weights uniform in +-1/sqrt(fan_in), biases zero, everything times `init_scale`.
/// The quadratic model draws theta uniform in +-1, times `init_scale`.
Vecd init_parameters(const ModelSpec& spec, double init_scale, const RngStream& rng);

/// Mean loss over the rows at `indices`; writes the gradient when `grad` is set.
double loss_and_gradient(const ModelSpec& spec, std::span<const double> theta, const Dataset& data,
                         std::span<const std::size_t> indices, Vecd* grad);
/// Same over the whole dataset.
double loss_and_gradient(const ModelSpec& spec, std::span<const double> theta, const Dataset& data,
                         Vecd* grad);

/// Class scores for one input row (logits).
Vecd class_scores(const ModelSpec& spec, std::span<const double> theta, std::span<const double> x);
/// Argmax class, lowest index on ties.
int predict(const ModelSpec& spec, std::span<const double> theta, std::span<const double> x);

/// Fraction of rows whose predicted class matches the label. Throws EmptyInput
/// for an empty set and InvalidArgument for the quadratic model.
double evaluate(const ModelSpec& spec, std::span<const double> theta, const Dataset& data);

/// Gradient Lipschitz constant max_j a_j; UnknownLipschitz for other models.
double lipschitz_constant(const ModelSpec& spec);

}  // namespace arc

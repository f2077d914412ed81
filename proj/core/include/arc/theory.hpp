#pragma once

// Closed-form robustness and convergence quantities for Robust-DGD with and
// without adaptive robust clipping. Values outside a formula's domain come
// back as explicit Infeasible / Undefined markers, never as NaN.

#include <cstddef>
#include <optional>
#include <string_view>

namespace arc::theory {

enum class Status { Value, Infeasible, Undefined };

std::string_view to_string(Status s) noexcept;

struct Quantity {
  Status status = Status::Value;
  double value = 0.0;

  static Quantity of(double v) noexcept { return {Status::Value, v}; }
  static Quantity infeasible() noexcept { return {Status::Infeasible, 0.0}; }
  static Quantity undefined() noexcept { return {Status::Undefined, 0.0}; }
  bool ok() const noexcept { return status == Status::Value; }
};

/// 1 / (2 + B^2): adversary fraction beyond which no error bound exists.
double breakdown_point(double B);

/// Lower bound on achievable stationarity error under (G, B)-dissimilarity,
/// (1/4) * f / (n - (2 + B^2) f) * G^2; Infeasible once f/n >= breakdown point.
Quantity lower_bound_error(std::size_t n, std::size_t f, double G, double B);

/// epsilon_o written in terms of the ratio f/n.
Quantity epsilon_o(double ratio, double G, double B);

struct KappaBounds {
  double lower = 0.0;          ///< f / (n - 2f), necessary for any robust rule
  double nnm_upper = 0.0;      ///< certified kappa of base∘NNM
  double arc_increment = 0.0;  ///< extra 2f / (n - 2f) paid by ARC
};

/// Throws TooManyByzantine unless n > 2f.
KappaBounds kappa_bounds(std::size_t n, std::size_t f);

/// Average squared gradient norm bound of Robust-DGD with an (f, kappa)-robust
/// rule. Undefined when kappa * B^2 >= 1.
Quantity convergence_bound(double delta0, double kappa, double B, double G, double gamma,
                           double steps);

/// 640 (1 + 1/B^2)^2 (1 + B^2 rho^2 / G^2). Requires B > 0 and G > 0.
double psi(double G, double B, double rho);

struct TheoryInputs {
  std::size_t n = 0;
  std::size_t f = 0;
  double G = 0.0;
  double B = 0.0;
  double L = 1.0;
  double delta0 = 1.0;
  double steps = 1.0;
  double zeta_init = 0.0;
  double xi = 0.5;
  double xi_o = 0.5;
  double upsilon = 0.5;
  /// Robustness coefficient of the base rule; the certified base∘NNM value
  /// when unset.
  std::optional<double> kappa;
};

struct ImprovementInterval {
  double lower = 0.0;
  double upper = 0.0;
  double length = 0.0;
};

struct ArcBounds {
  double kappa = 0.0;
  double breakdown_point = 0.0;
  double rho = 0.0;
  double psi = 0.0;
  Quantity epsilon_o;
  double lemma_c1_rhs = 0.0;
  double corollary_c5_rhs = 0.0;
  Quantity thm_c4_part1;
  double thm_c4_part2 = 0.0;
  ImprovementInterval improvement_interval;
  /// xi implied by the actual ratio, (BP - f/n) / BP.
  double xi_from_ratio = 0.0;
  /// Largest xi that still certifies an upsilon-fold improvement.
  double xi_for_upsilon = 0.0;
  /// Step size min{delta0 / (kappa G^2 T), 1/L}.
  double gamma = 0.0;
  /// Step-count threshold delta0 L / (kappa G^2), evaluated with the base
  /// kappa and with the tripled kappa of F∘ARC.
  double steps_threshold_certified = 0.0;
  double steps_threshold_tripled = 0.0;
};

/// Throws ParameterDomain unless B > 0, G > 0 and 0 < xi <= xi_o < 1.
ArcBounds arc_bounds(const TheoryInputs& in);

}  // namespace arc::theory

#include "arc/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "arc/error.hpp"

namespace arc::theory {

std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::Value: return "value";
    case Status::Infeasible: return "infeasible";
    case Status::Undefined: return "undefined";
  }
  return "undefined";
}

double breakdown_point(double B) {
  if (!(B >= 0.0)) raise(ErrorCode::ParameterDomain, "B must be nonnegative");
  return 1.0 / (2.0 + B * B);
}

Quantity lower_bound_error(std::size_t n, std::size_t f, double G, double B) {
  if (n == 0) raise(ErrorCode::ParameterDomain, "n must be positive");
  const double fn = static_cast<double>(f);
  const double slack = static_cast<double>(n) - (2.0 + B * B) * fn;
  if (f == 0) return Quantity::of(0.0);
  if (!(slack > 0.0)) return Quantity::infeasible();
  return Quantity::of(0.25 * fn / slack * G * G);
}

Quantity epsilon_o(double ratio, double G, double B) {
  const double slack = 1.0 - (2.0 + B * B) * ratio;
  if (ratio == 0.0) return Quantity::of(0.0);
  if (!(slack > 0.0)) return Quantity::infeasible();
  return Quantity::of(0.25 * G * G * ratio / slack);
}

KappaBounds kappa_bounds(std::size_t n, std::size_t f) {
  if (n <= 2 * f) {
    raise(ErrorCode::TooManyByzantine,
          "kappa bounds need n > 2f (n=" + std::to_string(n) + ", f=" + std::to_string(f) + ")");
  }
  const double nn = static_cast<double>(n);
  const double ff = static_cast<double>(f);
  const double honest_excess = nn - 2.0 * ff;
  const double ratio = ff / honest_excess;
  KappaBounds out;
  out.lower = ratio;
  out.nnm_upper = (8.0 * ff / (nn - ff)) * (1.0 + (1.0 + ratio) * (1.0 + ratio));
  out.arc_increment = 2.0 * ff / honest_excess;
  return out;
}

Quantity convergence_bound(double delta0, double kappa, double B, double G, double gamma,
                           double steps) {
  if (!(gamma > 0.0) || !(steps > 0.0)) {
    raise(ErrorCode::ParameterDomain, "gamma and T must be positive");
  }
  const double shrink = 1.0 - kappa * B * B;
  if (!(shrink > 0.0)) return Quantity::undefined();
  return Quantity::of(2.0 * delta0 / (shrink * gamma * steps) + kappa * G * G / shrink);
}

double psi(double G, double B, double rho) {
  if (!(B > 0.0) || !(G > 0.0)) raise(ErrorCode::ParameterDomain, "psi needs B > 0 and G > 0");
  const double inv = 1.0 + 1.0 / (B * B);
  return 640.0 * inv * inv * (1.0 + B * B * rho * rho / (G * G));
}

ArcBounds arc_bounds(const TheoryInputs& in) {
  if (!(in.B > 0.0)) raise(ErrorCode::ParameterDomain, "B must be positive");
  if (!(in.G > 0.0)) raise(ErrorCode::ParameterDomain, "G must be positive");
  if (!(in.xi > 0.0 && in.xi <= in.xi_o && in.xi_o < 1.0)) {
    raise(ErrorCode::ParameterDomain, "need 0 < xi <= xi_o < 1");
  }
  if (in.n == 0) raise(ErrorCode::ParameterDomain, "n must be positive");
  if (!(in.L >= 0.0) || !(in.delta0 >= 0.0) || !(in.zeta_init >= 0.0) || !(in.steps > 0.0)) {
    raise(ErrorCode::ParameterDomain, "L, delta0, zeta must be nonnegative and T positive");
  }

  ArcBounds out;
  const double B2 = in.B * in.B;
  const double G2 = in.G * in.G;
  const double ratio = static_cast<double>(in.f) / static_cast<double>(in.n);

  if (in.kappa) {
    out.kappa = *in.kappa;
  } else {
    out.kappa = kappa_bounds(in.n, in.f).nnm_upper;
  }
  out.breakdown_point = breakdown_point(in.B);
  out.rho = std::exp((2.0 + B2) * in.delta0 * in.L / ((1.0 - in.xi_o) * G2)) * in.zeta_init;
  out.psi = psi(in.G, in.B, out.rho);
  out.epsilon_o = epsilon_o(ratio, in.G, in.B);

  const double envelope = G2 + B2 * out.rho * out.rho;
  out.lemma_c1_rhs = 2.0 * in.delta0 * in.L / in.steps + 5.0 * out.kappa * envelope;

  const double shrink = std::max(1.0 - out.kappa * B2, 0.0);
  const double second = shrink > 0.0 ? G2 / shrink : std::numeric_limits<double>::infinity();
  out.corollary_c5_rhs = 5.0 * out.kappa * std::min(envelope, second);

  out.thm_c4_part1 = out.epsilon_o.ok() ? Quantity::of(in.xi * out.psi * out.epsilon_o.value)
                                        : Quantity::infeasible();
  out.thm_c4_part2 = out.psi * G2 / 8.0;

  const double nbp = static_cast<double>(in.n) * out.breakdown_point;
  out.improvement_interval.lower = nbp * (1.0 - 1.0 / out.psi);
  out.improvement_interval.upper = nbp;
  out.improvement_interval.length = nbp / out.psi;

  out.xi_from_ratio = (out.breakdown_point - ratio) / out.breakdown_point;
  out.xi_for_upsilon = std::min(in.upsilon / out.psi, in.xi_o);

  if (out.kappa > 0.0) {
    out.gamma = in.delta0 / (out.kappa * G2 * in.steps);
    if (in.L > 0.0) out.gamma = std::min(out.gamma, 1.0 / in.L);
    out.steps_threshold_certified = in.delta0 * in.L / (out.kappa * G2);
    out.steps_threshold_tripled = in.delta0 * in.L / (3.0 * out.kappa * G2);
  } else {
    out.gamma = in.L > 0.0 ? 1.0 / in.L : std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace arc::theory

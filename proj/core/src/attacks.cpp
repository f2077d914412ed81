#include "arc/attacks.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "arc/error.hpp"

namespace arc {

std::string_view attack_name(AttackKind kind) noexcept {
  switch (kind) {
    case AttackKind::SignFlip: return "SF";
    case AttackKind::LabelFlip: return "LF";
    case AttackKind::Mimic: return "mimic";
    case AttackKind::FallOfEmpires: return "FOE";
    case AttackKind::LittleIsEnough: return "ALIE";
  }
  return "SF";
}

AttackKind parse_attack(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "sf" || key == "signflip" || key == "sign_flip") return AttackKind::SignFlip;
  if (key == "lf" || key == "labelflip" || key == "label_flip") return AttackKind::LabelFlip;
  if (key == "mimic") return AttackKind::Mimic;
  if (key == "foe" || key == "fall_of_empires") return AttackKind::FallOfEmpires;
  if (key == "alie" || key == "little_is_enough") return AttackKind::LittleIsEnough;
  raise(ErrorCode::InvalidArgument, "unknown attack '" + std::string(name) + "'");
}

std::vector<AttackKind> all_attacks() {
  return {AttackKind::SignFlip, AttackKind::LabelFlip, AttackKind::Mimic,
          AttackKind::FallOfEmpires, AttackKind::LittleIsEnough};
}

std::vector<double> default_foe_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 16; ++i) grid.push_back(0.25 * i);
  return grid;
}

std::vector<double> default_alie_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(i / 20.0);
  return grid;
}

AttackSpec AttackSpec::defaults(AttackKind kind) {
  AttackSpec spec;
  spec.kind = kind;
  if (kind == AttackKind::FallOfEmpires) spec.tau_grid = default_foe_grid();
  if (kind == AttackKind::LittleIsEnough) spec.tau_grid = default_alie_grid();
  return spec;
}

Vecd coordinate_std(const GradientSet& honest) {
  const std::size_t h = honest.size();
  Vecd out(honest.dim(), 0.0);
  if (h < 2) return out;
  const Vecd centre = mean_of(honest);
  for (std::size_t i = 0; i < h; ++i) {
    auto x = honest.row(i);
    for (std::size_t j = 0; j < out.size(); ++j) {
      const double diff = x[j] - centre[j];
      out[j] += diff * diff;
    }
  }
  for (double& v : out) v = std::sqrt(v / static_cast<double>(h - 1));
  return out;
}

double attack_damage(const AttackContext& ctx, std::span<const double> honest_mean,
                     std::span<const double> candidate) {
  GradientSet inputs = ctx.honest_momenta;
  inputs.append_copies(candidate, ctx.f);
  const Vecd aggregated = ctx.aggregator(inputs);
  return std::sqrt(squared_distance(honest_mean, aggregated));
}

namespace {

template <typename MakeCandidate>
CraftedAttack grid_search(const AttackSpec& spec, const AttackContext& ctx,
                          std::span<const double> honest_mean, MakeCandidate make) {
  if (spec.tau_grid.empty()) raise(ErrorCode::EmptyGrid, "attack factor grid is empty");
  for (double tau : spec.tau_grid) {
    if (!std::isfinite(tau) || tau < 0.0) {
      raise(ErrorCode::InvalidArgument, "attack factors must be finite and nonnegative");
    }
  }
  CraftedAttack best;
  for (double tau : spec.tau_grid) {
    Vecd candidate = make(tau);
    const double damage = attack_damage(ctx, honest_mean, candidate);
    const bool better = !best.damage || damage > *best.damage ||
                        (damage == *best.damage && tau < *best.tau);
    if (better) {
      best.vector = std::move(candidate);
      best.tau = tau;
      best.damage = damage;
    }
  }
  return best;
}

}  // namespace

CraftedAttack craft(const AttackSpec& spec, const AttackContext& ctx) {
  if (ctx.honest_momenta.empty()) raise(ErrorCode::NoHonestWorkers, "no honest momenta");
  const Vecd honest_mean = mean_of(ctx.honest_momenta);

  switch (spec.kind) {
    case AttackKind::SignFlip: {
      CraftedAttack out;
      out.vector = scaled(honest_mean, -1.0);
      return out;
    }
    case AttackKind::LabelFlip:
      raise(ErrorCode::InvalidArgument,
            "label flipping is computed worker-side from flipped labels, not crafted");
    case AttackKind::Mimic: {
      if (!spec.mimic_target || *spec.mimic_target >= ctx.honest_momenta.size()) {
        raise(ErrorCode::InvalidArgument, "mimic needs a valid honest target index");
      }
      CraftedAttack out;
      out.vector = ctx.honest_momenta.row_vec(*spec.mimic_target);
      return out;
    }
    case AttackKind::FallOfEmpires:
      return grid_search(spec, ctx, honest_mean,
                         [&](double tau) { return scaled(honest_mean, 1.0 - tau); });
    case AttackKind::LittleIsEnough: {
      const Vecd sigma = coordinate_std(ctx.honest_momenta);
      return grid_search(spec, ctx, honest_mean, [&](double tau) {
        Vecd v(honest_mean.size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = honest_mean[j] + tau * sigma[j];
        return v;
      });
    }
  }
  raise(ErrorCode::InvalidArgument, "unknown attack kind");
}

std::vector<int> flip_labels(std::span<const int> labels, int num_classes) {
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      raise(ErrorCode::LabelOutOfRange, "label " + std::to_string(labels[i]) +
                                            " outside [0, " + std::to_string(num_classes) + ")");
    }
    out[i] = num_classes - 1 - labels[i];
  }
  return out;
}

void MimicTracker::observe(const GradientSet& honest_momenta) {
  if (honest_momenta.empty()) raise(ErrorCode::NoHonestWorkers, "mimic history step is empty");
  if (scores_.empty()) scores_.assign(honest_momenta.size(), 0.0);
  if (scores_.size() != honest_momenta.size()) {
    raise(ErrorCode::DimensionMismatch, "honest worker count changed across steps");
  }
  const Vecd centre = mean_of(honest_momenta);
  for (std::size_t i = 0; i < honest_momenta.size(); ++i) {
    scores_[i] += squared_distance(honest_momenta.row(i), centre);
  }
  ++steps_;
}

std::size_t MimicTracker::best() const {
  if (scores_.empty()) raise(ErrorCode::EmptyInput, "mimic tracker has no history");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores_.size(); ++i) {
    if (scores_[i] > scores_[best]) best = i;
  }
  return best;
}

std::size_t mimic_select(std::span<const GradientSet> history) {
  if (history.empty()) raise(ErrorCode::EmptyInput, "mimic selection needs a history");
  MimicTracker tracker;
  for (const auto& step : history) tracker.observe(step);
  return tracker.best();
}

}  // namespace arc

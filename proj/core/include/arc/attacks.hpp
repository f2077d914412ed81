#pragma once

// Byzantine attacks: sign flipping (SF), label flipping (LF), mimic,
// fall of empires (FOE) and a little is enough (ALIE). FOE and ALIE pick
// their attack factor per step by grid search against the live aggregator.
//
// All f adversaries send the same vector; craft() returns it once and the
// caller replicates it.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "arc/aggregation.hpp"
#include "arc/numkit.hpp"

namespace arc {

enum class AttackKind { SignFlip, LabelFlip, Mimic, FallOfEmpires, LittleIsEnough };

/// Config names: "SF", "LF", "mimic", "FOE", "ALIE".
std::string_view attack_name(AttackKind kind) noexcept;
AttackKind parse_attack(std::string_view name);
/// The five-attack sweep in its fixed order: SF, LF, mimic, FOE, ALIE.
std::vector<AttackKind> all_attacks();

/// {0, 0.25, ..., 4}
std::vector<double> default_foe_grid();
/// {0, 0.05, ..., 2}
std::vector<double> default_alie_grid();

struct AttackSpec {
  AttackKind kind = AttackKind::SignFlip;
  /// Candidate attack factors for FOE / ALIE.
  std::vector<double> tau_grid;
  std::optional<std::size_t> mimic_target;

  /// Spec with the default grid for FOE / ALIE and an empty one otherwise.
  static AttackSpec defaults(AttackKind kind);
};


struct AttackContext {
  /// Momenta of the honest workers at this step.
  const GradientSet& honest_momenta;
  /// Server-side aggregation with f already bound; receives the honest rows
  /// followed by f adversarial rows.
  AggregatorFn aggregator;
  std::size_t f = 0;
};

struct CraftedAttack {
  Vecd vector;
  /// Chosen factor for FOE / ALIE.
  std::optional<double> tau;
  /// ||mean(honest) - F(honest + f copies of vector)|| for the chosen factor.
  std::optional<double> damage;
};

/// Per-coordinate sample standard deviation across the honest rows
/// (divisor |H| - 1, zero for a single row).
Vecd coordinate_std(const GradientSet& honest);

/// ||mean(honest) - F(honest rows + f copies of candidate)||.
double attack_damage(const AttackContext& ctx, std::span<const double> honest_mean,
                     std::span<const double> candidate);

/// Throws NoHonestWorkers, EmptyGrid, and InvalidArgument for LF (label
/// flipping happens worker-side) or for a missing/out-of-range mimic target.
CraftedAttack craft(const AttackSpec& spec, const AttackContext& ctx);

/// l -> K-1-l. Throws LabelOutOfRange for labels outside [0, K).
std::vector<int> flip_labels(std::span<const int> labels, int num_classes);

/// Honest worker with the largest cumulative ||m_t^(i) - mean_t||^2 over the
/// given history; ties go to the lowest index.
std::size_t mimic_select(std::span<const GradientSet> history);

/// Incremental form of mimic_select for use inside the simulator.
class MimicTracker {
public:
  void observe(const GradientSet& honest_momenta);
  std::size_t best() const;
  std::size_t steps_observed() const noexcept { return steps_; }

private:
  std::vector<double> scores_;
  std::size_t steps_ = 0;
};

}  // namespace arc

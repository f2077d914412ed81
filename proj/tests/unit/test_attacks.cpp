#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "arc/attacks.hpp"
#include "helpers.hpp"

using namespace arc;
using testing::rows;

namespace {

AttackContext context(const GradientSet& honest, const char* spec, std::size_t f) {
  return {honest, Pipeline(AggregatorSpec::parse(spec)).bind(f), f};
}

}  // namespace

TEST_CASE("attack names round trip") {
  for (AttackKind k : all_attacks()) CHECK(parse_attack(attack_name(k)) == k);
  CHECK(all_attacks().size() == 5);
  CHECK(parse_attack("foe") == AttackKind::FallOfEmpires);
  CHECK_THROWS_AS(parse_attack("gauss"), Error);
  CHECK(default_foe_grid().size() == 17);
  CHECK(default_alie_grid().size() == 41);
  CHECK(default_alie_grid().back() == doctest::Approx(2.0));
}

TEST_CASE("sign flip and degenerate factors") {
  GradientSet ones;
  ones.append_copies(Vecd{1, 1}, 4);
  const auto sf = craft(AttackSpec::defaults(AttackKind::SignFlip), context(ones, "cwtm+nnm", 1));
  CHECK(sf.vector == Vecd{-1, -1});

  const auto h = testing::gaussian_set(6, 3, 31);
  const auto ctx = context(h, "cwtm+nnm+arc", 2);
  const auto foe2 = craft({AttackKind::FallOfEmpires, {2.0}, {}}, ctx);
  const auto sf2 = craft(AttackSpec::defaults(AttackKind::SignFlip), ctx);
  CHECK(testing::near_vec(foe2.vector, sf2.vector, 1e-15));
  CHECK(foe2.tau == 2.0);

  const auto alie0 = craft({AttackKind::LittleIsEnough, {0.0}, {}}, ctx);
  CHECK(testing::near_vec(alie0.vector, mean_of(h), 0.0));
}

TEST_CASE("grid search matches exhaustive replay") {
  for (int t = 0; t < 30; ++t) {
    const auto h = testing::gaussian_set(5 + t % 5, 3, 600 + t);
    for (const char* s : {"mean", "cwtm+nnm", "cwmed+nnm+arc"}) {
      const auto ctx = context(h, s, 1 + t % 2);
      const Vecd m = mean_of(h);
      const Vecd sd = coordinate_std(h);
      for (AttackKind kind : {AttackKind::FallOfEmpires, AttackKind::LittleIsEnough}) {
        const auto spec = AttackSpec::defaults(kind);
        const auto got = craft(spec, ctx);
        double best = -1;
        double best_tau = 0;
        for (double tau : spec.tau_grid) {
          Vecd cand(m.size());
          for (std::size_t j = 0; j < m.size(); ++j) {
            cand[j] = kind == AttackKind::FallOfEmpires ? (1 - tau) * m[j] : m[j] + tau * sd[j];
          }
          // Fresh aggregation, not attack_damage, to keep the replay independent.
          GradientSet all = h;
          all.append_copies(cand, ctx.f);
          const double dmg = l2_norm(subtract(m, ctx.aggregator(all)));
          if (dmg > best) {
            best = dmg;
            best_tau = tau;
          }
        }
        REQUIRE(got.tau == best_tau);
        REQUIRE(*got.damage == doctest::Approx(best).epsilon(1e-12));
        // Determinism.
        REQUIRE(craft(spec, ctx).vector == got.vector);
      }
    }
  }
}

TEST_CASE("damage against the mean grows with the FOE factor") {
  for (int t = 0; t < 20; ++t) {
    const auto h = testing::gaussian_set(6, 4, 700 + t);
    const auto ctx = context(h, "mean", 1 + t % 3);
    const Vecd m = mean_of(h);
    double prev = -1;
    for (double tau : default_foe_grid()) {
      const double d = attack_damage(ctx, m, scaled(m, 1 - tau));
      REQUIRE(d >= prev - 1e-12);
      prev = d;
    }
  }
}

TEST_CASE("craft errors") {
  const auto h = testing::gaussian_set(4, 2, 32);
  const auto ctx = context(h, "mean", 1);
  CHECK(testing::throws_code([&] { craft(AttackSpec::defaults(AttackKind::LabelFlip), ctx); },
                             ErrorCode::InvalidArgument));
  CHECK(testing::throws_code([&] { craft({AttackKind::FallOfEmpires, {}, {}}, ctx); },
                             ErrorCode::EmptyGrid));
  CHECK(testing::throws_code([&] { craft({AttackKind::Mimic, {}, {}}, ctx); },
                             ErrorCode::InvalidArgument));
  CHECK(testing::throws_code([&] { craft({AttackKind::Mimic, {}, 9}, ctx); },
                             ErrorCode::InvalidArgument));
  CHECK(craft({AttackKind::Mimic, {}, 2}, ctx).vector == h.row_vec(2));
  GradientSet none(0, 2);
  CHECK_THROWS_AS(craft(AttackSpec::defaults(AttackKind::SignFlip), context(none, "mean", 1)), Error);
}

TEST_CASE("label flipping") {
  CHECK(flip_labels(std::vector<int>{0}, 10) == std::vector<int>{9});
  CHECK(flip_labels(std::vector<int>{9}, 10) == std::vector<int>{0});
  CHECK(flip_labels(std::vector<int>{0, 1, 1}, 2) == std::vector<int>{1, 0, 0});
  std::vector<int> labels;
  for (int i = 0; i < 100; ++i) labels.push_back((i * 7) % 10);
  CHECK(flip_labels(flip_labels(labels, 10), 10) == labels);
  CHECK(testing::throws_code([] { flip_labels(std::vector<int>{10}, 10); }, ErrorCode::LabelOutOfRange));
  CHECK(testing::throws_code([] { flip_labels(std::vector<int>{-1}, 10); }, ErrorCode::LabelOutOfRange));
}

TEST_CASE("mimic selection") {
  std::vector<GradientSet> single{rows({{3, 1}}), rows({{-1, 2}})};
  CHECK(mimic_select(single) == 0);

  std::vector<GradientSet> offset;
  for (int t = 0; t < 5; ++t) offset.push_back(rows({{1, 1}, {1, 1}, {4, 1}, {1, 1}}));
  CHECK(mimic_select(offset) == 2);

  // Equal scores go to the lowest index.
  std::vector<GradientSet> tie{rows({{1}, {-1}})};
  CHECK(mimic_select(tie) == 0);

  for (int t = 0; t < 50; ++t) {
    std::vector<GradientSet> hist;
    for (int s = 0; s < 4; ++s) hist.push_back(testing::gaussian_set(3, 2, 800 + 10 * t + s));
    std::vector<double> score(3, 0.0);
    MimicTracker tracker;
    for (const auto& g : hist) {
      const Vecd m = mean_of(g);
      for (std::size_t i = 0; i < 3; ++i) score[i] += squared_distance(g.row(i), m);
      tracker.observe(g);
    }
    const auto expect = static_cast<std::size_t>(std::max_element(score.begin(), score.end()) - score.begin());
    REQUIRE(mimic_select(hist) == expect);
    REQUIRE(tracker.best() == expect);
    REQUIRE(tracker.steps_observed() == 4);
  }
}

TEST_CASE("coordinate std uses the sample divisor") {
  const auto sd = coordinate_std(rows({{0, 5}, {2, 5}}));
  CHECK(sd[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(sd[1] == 0.0);
  CHECK(coordinate_std(rows({{4, 4}})) == Vecd{0, 0});
}

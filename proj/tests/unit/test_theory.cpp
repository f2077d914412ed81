#include <doctest.h>

#include <cmath>

#include "arc/theory.hpp"
#include "helpers.hpp"

using namespace arc;
using namespace arc::theory;

TEST_CASE("breakdown point") {
  CHECK(breakdown_point(0) == 0.5);
  CHECK(breakdown_point(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(breakdown_point(1e8) < 1e-15);
  double prev = 1;
  for (double b = 0; b <= 20; b += 0.25) {
    REQUIRE(breakdown_point(b) < prev);
    prev = breakdown_point(b);
  }
  CHECK_THROWS_AS(breakdown_point(-1), Error);
}

TEST_CASE("lower bound on the error") {
  CHECK(lower_bound_error(11, 0, 3, 1).value == 0.0);
  CHECK(lower_bound_error(12, 4, 1, 1).status == Status::Infeasible);
  CHECK(lower_bound_error(10, 5, 1, 0).status == Status::Infeasible);
  const auto q = lower_bound_error(11, 1, 1, 0);
  REQUIRE(q.ok());
  CHECK(std::abs(q.value - 1.0 / 36.0) <= 1e-12);
  double prev = -1;
  for (std::size_t f = 0; 3 * f < 50; ++f) {
    const auto e = lower_bound_error(50, f, 2.0, 1.0);
    if (!e.ok()) break;
    REQUIRE(e.value > prev);
    prev = e.value;
  }
}

TEST_CASE("kappa bounds") {
  const auto k = kappa_bounds(15, 3);
  CHECK(std::abs(k.lower - 1.0 / 3.0) <= 1e-12);
  CHECK(std::abs(k.nnm_upper - 50.0 / 9.0) <= 1e-12);
  CHECK(std::abs(k.arc_increment - 2.0 / 3.0) <= 1e-12);
  const auto z = kappa_bounds(7, 0);
  CHECK(z.lower == 0.0);
  CHECK(z.nnm_upper == 0.0);
  CHECK(z.arc_increment == 0.0);
  const auto w = kappa_bounds(11, 5);
  CHECK(w.lower == 5.0);
  CHECK(w.lower <= w.nnm_upper);
  CHECK(testing::throws_code([] { kappa_bounds(10, 5); }, ErrorCode::TooManyByzantine));
}

TEST_CASE("convergence bound") {
  CHECK(convergence_bound(2, 0, 1, 1, 0.1, 100).value == doctest::Approx(2 * 2 / (0.1 * 100)));
  CHECK(convergence_bound(1, 1, 1, 1, 0.1, 10).status == Status::Undefined);
  const auto far = convergence_bound(1, 0.5, 1, 2, 0.1, 1e15);
  CHECK(far.value == doctest::Approx(0.5 * 4 / 0.5).epsilon(1e-9));
  CHECK_THROWS_AS(convergence_bound(1, 0, 1, 1, 0, 10), Error);
}

TEST_CASE("psi") {
  CHECK(std::abs(psi(1, 1, 1) - 5120.0) <= 1e-12);
  CHECK(psi(2, 3, 0) == doctest::Approx(640 * std::pow(1 + 1.0 / 9, 2)));
  double prev = 0;
  for (double rho = 0; rho < 5; rho += 0.5) {
    REQUIRE(psi(1, 1, rho) > prev);
    prev = psi(1, 1, rho);
  }
  prev = 1e300;
  for (double b = 0.25; b < 5; b += 0.25) {
    REQUIRE(psi(1, b, 0) < prev);
    prev = psi(1, b, 0);
  }
}

TEST_CASE("arc bounds") {
  TheoryInputs in;
  in.n = 11;
  in.f = 1;
  in.G = 1;
  in.B = 1;
  in.zeta_init = 0;
  const auto base = arc_bounds(in);
  CHECK(base.rho == 0.0);
  CHECK(base.psi == doctest::Approx(640 * 4));
  CHECK(base.kappa == doctest::Approx(kappa_bounds(11, 1).nnm_upper));
  CHECK(base.improvement_interval.length == doctest::Approx(11.0 / 3.0 / base.psi));

  // thmC4 part 1 with xi = upsilon / psi equals upsilon * eps_o.
  in.upsilon = 0.3;
  in.xi = in.upsilon / base.psi;
  const auto at = arc_bounds(in);
  REQUIRE(at.thm_c4_part1.ok());
  REQUIRE(at.epsilon_o.ok());
  CHECK(at.thm_c4_part1.value == doctest::Approx(in.upsilon * at.epsilon_o.value).epsilon(1e-12));

  in.xi = 1e-12;
  CHECK(arc_bounds(in).thm_c4_part1.value < 1e-9);

  in.zeta_init = 2;
  in.delta0 = 0.5;
  in.L = 1;
  in.xi = 0.1;
  const auto r = arc_bounds(in);
  CHECK(r.rho == doctest::Approx(std::exp(3 * 0.5 / 0.5) * 2));
  CHECK(r.lemma_c1_rhs == doctest::Approx(2 * 0.5 / 1 + 5 * r.kappa * (1 + r.rho * r.rho)));

  in.B = 0;
  CHECK(testing::throws_code([&] { arc_bounds(in); }, ErrorCode::ParameterDomain));
  in.B = 1;
  in.xi = 0.9;
  CHECK(testing::throws_code([&] { arc_bounds(in); }, ErrorCode::ParameterDomain));
}

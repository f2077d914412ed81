#include <doctest.h>

#include <cmath>
#include <vector>

#include "arc/rng.hpp"

using namespace arc;

namespace {

std::vector<std::uint64_t> draws(std::uint64_t seed, std::uint64_t id, int count) {
  Rng rng = rng_stream(seed, id).generator();
  std::vector<std::uint64_t> out;
  for (int i = 0; i < count; ++i) out.push_back(rng.next_u64());
  return out;
}

}  // namespace

TEST_CASE("same stream gives identical draws") {
  CHECK(draws(1, 0, 1000) == draws(1, 0, 1000));
}

TEST_CASE("different ids and seeds give unrelated sequences") {
  const auto a = draws(1, 0, 1000), b = draws(1, 1, 1000), c = draws(2, 0, 1000);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    same_ab += a[i] == b[i];
    same_ac += a[i] == c[i];
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);

  // Bit balance of the xor: about half the bits differ.
  double ones = 0;
  for (int i = 0; i < 1000; ++i) ones += __builtin_popcountll(a[i] ^ b[i]);
  CHECK(ones / 64000.0 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("child streams are deterministic and distinct") {
  Rng a = rng_stream(1, 0).generator();
  Rng b = rng_stream(1, 0).generator();
  const auto first = a.next_u64();
  CHECK(first == b.next_u64());
  CHECK(rng_stream(1, 0).child(3) == rng_stream(1, 0).child(3));
  CHECK(!(rng_stream(1, 0).child(3) == rng_stream(1, 0).child(4)));
}

TEST_CASE("uniform moments") {
  Rng rng = rng_stream(3, 0).generator();
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
  }
  CHECK(s / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(s2 / n - (s / n) * (s / n) == doctest::Approx(1.0 / 12).epsilon(0.02));
}

TEST_CASE("normal moments") {
  Rng rng = rng_stream(5, 0).generator();
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("uniform_index covers the range evenly") {
  Rng rng = rng_stream(6, 0).generator();
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_index(7)];
  for (int c : counts) CHECK(c == doctest::Approx(10000).epsilon(0.05));
}

TEST_CASE("gamma and dirichlet moments") {
  Rng rng = rng_stream(7, 0).generator();
  for (double shape : {0.3, 1.0, 4.5}) {
    double s = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) s += rng.gamma(shape);
    CHECK(s / n == doctest::Approx(shape).epsilon(0.03));
  }
  double first = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto p = rng.dirichlet(4, 0.5);
    double total = 0;
    for (double v : p) {
      REQUIRE(v >= 0.0);
      total += v;
    }
    REQUIRE(total == doctest::Approx(1.0).epsilon(1e-12));
    first += p[0];
  }
  CHECK(first / 20000 == doctest::Approx(0.25).epsilon(0.05));
}

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "arc/error.hpp"
#include "arc/numkit.hpp"
#include "arc/rng.hpp"

namespace testing {

inline arc::GradientSet rows(const std::vector<arc::Vecd>& r) { return arc::GradientSet::from_rows(r); }

inline arc::GradientSet gaussian_set(std::size_t n, std::size_t d, std::uint64_t seed,
                                     double scale = 1.0) {
  arc::Rng rng = arc::rng_stream(seed, 99).generator();
  arc::GradientSet out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : out.row_mut(i)) v = scale * rng.normal();
  }
  return out;
}

inline bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

inline bool near_vec(const arc::Vecd& a, const arc::Vecd& b, double tol = 1e-12) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!near(a[i], b[i], tol)) return false;
  }
  return true;
}

// Runs fn and reports whether it threw arc::Error with the given code.
template <class Fn>
bool throws_code(Fn&& fn, arc::ErrorCode code) {
  try {
    fn();
  } catch (const arc::Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace testing

#include "arc/rng.hpp"

#include <cmath>
#include <numbers>

namespace arc {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

RngStream RngStream::child(std::uint64_t id) const noexcept {
  return RngStream(seed_, mix64(stream_id_ + kGolden) ^ mix64(id * 0xD1B54A32D192ED03ULL + 1));
}

Rng RngStream::generator() const noexcept {
  return Rng(mix64(mix64(seed_ ^ 0xA0761D6478BD642FULL) + stream_id_ * kGolden));
}

RngStream rng_stream(std::uint64_t seed, std::uint64_t stream_id) noexcept {
  return RngStream(seed, stream_id);
}

std::uint64_t Rng::next_u64() noexcept {
  state_ += kGolden;
  return mix64(state_);
}

double Rng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

__extension__ typedef unsigned __int128 u128;

std::size_t Rng::uniform_index(std::size_t n) noexcept {
  // Lemire's multiply-shift with rejection; unbiased.
  const std::uint64_t bound = n;
  u128 m = static_cast<u128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

double Rng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

double Rng::cauchy() noexcept {
  double u = uniform();
  while (u == 0.0) u = uniform();
  return std::tan(std::numbers::pi * (u - 0.5));
}

double Rng::gamma(double shape) noexcept {
  if (shape < 1.0) {
    double u = uniform();
    while (u == 0.0) u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<double> Rng::dirichlet(std::size_t k, double alpha) noexcept {
  std::vector<double> draw(k);
  double total = 0.0;
  for (auto& g : draw) {
    g = gamma(alpha);
    total += g;
  }
  if (total <= 0.0) {
    // Every gamma underflowed (tiny alpha): put all mass on one coordinate.
    draw.assign(k, 0.0);
    draw[uniform_index(k)] = 1.0;
    return draw;
  }
  for (auto& g : draw) g /= total;
  return draw;
}

}  // namespace arc

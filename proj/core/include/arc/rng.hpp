#pragma once

// Reproducible random streams.
//
// A stream is an immutable (seed, stream-id) descriptor. Generators derived
// from it run SplitMix64 keyed by a hash of the pair, and every distribution
// below is implemented here rather than taken from <random>, whose
// distributions are not specified bit-for-bit across standard libraries.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace arc {

class Rng;

/// Well-known stream ids used by the simulator; children are derived with
/// RngStream::child so sibling tasks never share draws.
namespace streams {
inline constexpr std::uint64_t kPartition = 1;
inline constexpr std::uint64_t kModelInit = 2;
inline constexpr std::uint64_t kBatch = 3;
inline constexpr std::uint64_t kOutputSelection = 4;
inline constexpr std::uint64_t kAdversaryBatch = 5;
inline constexpr std::uint64_t kData = 6;
inline constexpr std::uint64_t kCertification = 7;
}  // namespace streams

class RngStream {
public:
  constexpr RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Deterministic sub-stream; distinct ids give unrelated sequences.
  RngStream child(std::uint64_t id) const noexcept;
  Rng generator() const noexcept;

  friend bool operator==(const RngStream&, const RngStream&) = default;

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

RngStream rng_stream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

std::uint64_t mix64(std::uint64_t x) noexcept;

class Rng {
public:
  explicit Rng(std::uint64_t key) noexcept : state_(key) {}

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  /// Uniform on {0, ..., n-1}; n must be positive.
  std::size_t uniform_index(std::size_t n) noexcept;
  /// Standard normal (Marsaglia polar method).
  double normal() noexcept;
  double cauchy() noexcept;
  /// Gamma(shape, 1) via Marsaglia-Tsang, with the shape<1 boost.
  double gamma(double shape) noexcept;
  std::vector<double> dirichlet(std::size_t k, double alpha) noexcept;

private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace arc

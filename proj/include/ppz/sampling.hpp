#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppz/geometry.hpp"

namespace ppz {

/// Splittable generator: xoshiro256** whose state is derived from
/// (seed, stream) through SplitMix64. Identical (seed, stream) pairs give
/// identical sequences; forked streams are keyed by a caller-chosen
/// integer so work can be assigned to substreams independently of which
/// thread runs it.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  /// Substream keyed by `key`, derived from this generator's
  /// (seed, stream) identity, not from its current position.
  Rng fork(std::uint64_t key) const;
  /// Substream keyed by a path, e.g. the lineage of a refinement window.
  Rng fork_path(std::span<const std::uint64_t> path) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double normal();
  /// Gamma with shape a > 0 and rate b > 0 (mean a / b).
  double gamma(double shape, double rate);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t s_[4];
};

/// Mixes two 64-bit words; used to derive stream identifiers.
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

struct PointPattern {
  std::vector<Point> points;
  Window window;
};

/// Poisson(mean) draw. Inversion below mean 10, Hörmann's PTRD
/// transformed rejection above. Throws std::invalid_argument if mean is
/// negative or not finite.
std::uint64_t poisson_count(Rng& rng, double mean);

/// n i.i.d. uniform points in w. A zero-volume window is an error unless n == 0.
PointPattern uniform_in(Rng& rng, const Window& w, std::uint64_t n);

/// Homogeneous Poisson process on w with rate `rate_n` per unit volume:
/// the count is Poisson(rate_n * volume(w)) and locations are uniform.
PointPattern sample_hppp(Rng& rng, const Window& w, double rate_n);

/// Same construction with the expected count given directly.
PointPattern sample_poisson_pattern(Rng& rng, const Window& w, double expected_count);

}  // namespace ppz

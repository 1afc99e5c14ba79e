#include "ppz/sampling.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ppz {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// log(k!) without touching the global signgam that std::lgamma writes.
double log_factorial(std::uint64_t k) {
  static const std::array<double, 32> table = [] {
    std::array<double, 32> t{};
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (k < table.size()) return table[k];
  const double x = static_cast<double>(k) + 1.0;
  const double ix = 1.0 / x;
  const double ix2 = ix * ix;
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) +
         ix * (1.0 / 12.0 - ix2 * (1.0 / 360.0 - ix2 / 1260.0));
}

std::uint64_t poisson_inversion(Rng& rng, double mean) {
  double p = std::exp(-mean);
  double cdf = p;
  const double u = rng.uniform();
  std::uint64_t k = 0;
  while (u > cdf && k < 1000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

// W. Hörmann, "The transformed rejection method for generating Poisson
// random variables", Insurance: Mathematics and Economics 12 (1993).
std::uint64_t poisson_ptrd(Rng& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kd);
    if (kd < 0.0 || (us < 0.013 && v > us)) continue;
    const auto k = static_cast<std::uint64_t>(kd);
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + kd * loglam - log_factorial(k)) {
      return k;
    }
  }
}

}  // namespace

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return splitmix64(x);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::uint64_t x = mix64(seed, stream);
  for (auto& s : s_) s = splitmix64(x);
}

Rng Rng::fork(std::uint64_t key) const { return Rng(seed_, mix64(stream_, key)); }

Rng Rng::fork_path(std::span<const std::uint64_t> path) const {
  std::uint64_t id = mix64(stream_, 0x5eed0f9a7b1c3d2eULL ^ path.size());
  for (std::uint64_t k : path) id = mix64(id, k);
  return Rng(seed_, id);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform_open() {
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

double Rng::normal() {
  // Marsaglia polar method; the second variate is discarded so the
  // generator carries no hidden cache.
  while (true) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("gamma: shape and rate must be positive");
  }
  if (shape < 1.0) {
    // Boost to shape + 1 and scale by U^(1/shape).
    const double g = gamma(shape + 1.0, 1.0);
    return g * std::pow(uniform_open(), 1.0 / shape) / rate;
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

std::uint64_t poisson_count(Rng& rng, double mean) {
  if (!std::isfinite(mean) || mean < 0.0) {
    throw std::invalid_argument("poisson_count: mean must be finite and >= 0, got " +
                                std::to_string(mean));
  }
  if (mean == 0.0) return 0;
  if (mean < 10.0) return poisson_inversion(rng, mean);
  return poisson_ptrd(rng, mean);
}

PointPattern uniform_in(Rng& rng, const Window& w, std::uint64_t n) {
  PointPattern pattern{{}, w};
  if (n == 0) return pattern;
  if (!(volume(w) > 0.0)) {
    throw std::invalid_argument("uniform_in: window has zero volume");
  }
  pattern.points.reserve(n);
  std::vector<double> coords(w.dim());
  for (std::uint64_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < w.dim(); ++i) {
      double c = w.lo(i) + rng.uniform() * w.side(i);
      // lo + u * side can round up to hi + ulp.
      if (c > w.hi(i)) c = w.hi(i);
      coords[i] = c;
    }
    pattern.points.emplace_back(coords);
  }
  return pattern;
}

PointPattern sample_poisson_pattern(Rng& rng, const Window& w, double expected_count) {
  if (!(volume(w) > 0.0)) return PointPattern{{}, w};
  const std::uint64_t n = poisson_count(rng, expected_count);
  return uniform_in(rng, w, n);
}

PointPattern sample_hppp(Rng& rng, const Window& w, double rate_n) {
  if (!(rate_n > 0.0)) throw std::invalid_argument("sample_hppp: rate must be positive");
  return sample_poisson_pattern(rng, w, rate_n * volume(w));
}

}  // namespace ppz

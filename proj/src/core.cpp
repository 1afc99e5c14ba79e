#include "ppz/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ppz/parallel.hpp"

namespace ppz {

namespace {

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + c; }
};

double gated_intensity(const TargetFunction& f, const Point& x, double K, double Q,
                       std::optional<double> tol) {
  if (!f.feasible(x)) return 0.0;
  const double m = magnitude(f, x);
  if (tol && !(m < *tol)) return 0.0;
  return intensity_from_magnitude(m, K, Q);
}

void check_kq(double K, double Q) {
  if (!(K > 0.0) || !std::isfinite(K)) throw std::invalid_argument("K must be positive and finite");
  if (!(Q > 0.0) || !std::isfinite(Q)) throw std::invalid_argument("Q must be positive and finite");
}

}  // namespace

void validate(const PpzConfig& cfg) {
  check_kq(cfg.K, cfg.Q);
  if (!(cfg.N >= 1.0) || !std::isfinite(cfg.N)) throw std::invalid_argument("N must be >= 1");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("tol must be positive");
}

double intensity_from_magnitude(double m, double K, double Q) {
  if (!std::isfinite(m) || m < 0.0) {
    throw std::invalid_argument("intensity: magnitude must be finite and >= 0");
  }
  if (m == 0.0) return 1.0;
  return std::exp(-K * std::pow(m, Q));
}

double intensity(const TargetFunction& f, const Point& x, double K, double Q) {
  return gated_intensity(f, x, K, Q, std::nullopt);
}

bool retain(double u, double m, double K, double Q, double tol) {
  if (!(m < tol)) return false;
  return u < intensity_from_magnitude(m, K, Q);
}

Realization thin_pattern(const TargetFunction& f, const PointPattern& pattern, const PpzConfig& cfg,
                         Rng& rng, const RealizeOptions& opts) {
  validate(cfg);
  const std::size_t n = pattern.points.size();
  std::vector<double> u(n);
  for (auto& v : u) v = rng.uniform();
  std::vector<double> mags(n);
  parallel_for(n, opts.threads, [&](std::size_t i) {
    const Point& x = pattern.points[i];
    mags[i] = f.feasible(x) ? magnitude(f, x) : std::numeric_limits<double>::infinity();
  });
  Realization out;
  out.drawn = n;
  for (std::size_t i = 0; i < n; ++i) {
    const bool keep = std::isfinite(mags[i]) && retain(u[i], mags[i], cfg.K, cfg.Q, cfg.tol);
    if (keep) ++out.accepted;
    if (keep || opts.keep_rejected) out.candidates.push_back({pattern.points[i], mags[i], keep});
  }
  return out;
}

Realization realize(const TargetFunction& f, const Window& w, const PpzConfig& cfg, Rng& rng,
                    const RealizeOptions& opts) {
  validate(cfg);
  if (w.dim() != f.dim()) {
    throw std::invalid_argument("realize: window dimension " + std::to_string(w.dim()) +
                                " does not match target dimension " + std::to_string(f.dim()));
  }
  if (!(volume(w) > 0.0)) throw std::invalid_argument("realize: window has zero volume");
  const double mean = opts.expected_count ? *opts.expected_count : cfg.N * volume(w);
  const PointPattern pattern = sample_poisson_pattern(rng, w, mean);
  return thin_pattern(f, pattern, cfg, rng, opts);
}

double expected_count_riemann(const TargetFunction& f, const Window& w, double K, double Q,
                              std::uint64_t cells_per_axis, std::optional<double> tol, unsigned threads) {
  check_kq(K, Q);
  if (cells_per_axis < 1) throw std::invalid_argument("expected_count_riemann: L must be >= 1");
  if (w.dim() != f.dim()) throw std::invalid_argument("expected_count_riemann: dimension mismatch");
  const std::size_t p = w.dim();
  const double L = static_cast<double>(cells_per_axis);
  if (p * std::log10(L) > 8.0 + 1e-12) {
    throw std::invalid_argument("expected_count_riemann: grid of " + std::to_string(cells_per_axis) + "^" +
                                std::to_string(p) + " cells exceeds the 1e8 limit");
  }
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < p; ++i) total *= cells_per_axis;
  double cell_volume = 1.0;
  for (std::size_t i = 0; i < p; ++i) cell_volume *= w.side(i) / L;

  // Fixed chunking keeps the summation order independent of `threads`.
  const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(total, 256));
  std::vector<double> partial(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::uint64_t begin = total * c / chunks;
    const std::uint64_t end = total * (c + 1) / chunks;
    CompensatedSum s;
    std::vector<double> coords(p);
    for (std::uint64_t k = begin; k < end; ++k) {
      std::uint64_t rest = k;
      for (std::size_t i = 0; i < p; ++i) {
        const std::uint64_t idx = rest % cells_per_axis;
        rest /= cells_per_axis;
        coords[i] = w.lo(i) + (static_cast<double>(idx) + 0.5) * (w.side(i) / L);
      }
      s.add(gated_intensity(f, Point(coords), K, Q, tol));
    }
    partial[c] = s.value();
  });
  CompensatedSum s;
  for (double v : partial) s.add(v);
  return s.value() * cell_volume;
}

McEstimate expected_count_mc(const TargetFunction& f, const Window& w, double K, double Q,
                             std::uint64_t samples, Rng& rng, unsigned threads) {
  check_kq(K, Q);
  if (samples < 2) throw std::invalid_argument("expected_count_mc: need at least 2 samples");
  if (w.dim() != f.dim()) throw std::invalid_argument("expected_count_mc: dimension mismatch");
  const double vol = volume(w);
  constexpr std::uint64_t kBlock = 1 << 16;
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t count = 0;
  std::vector<double> lambda;
  for (std::uint64_t done = 0; done < samples; done += kBlock) {
    const std::uint64_t n = std::min(kBlock, samples - done);
    const PointPattern pts = uniform_in(rng, w, n);
    lambda.assign(n, 0.0);
    parallel_for(n, threads, [&](std::size_t i) {
      lambda[i] = gated_intensity(f, pts.points[i], K, Q, std::nullopt);
    });
    for (double v : lambda) {
      ++count;
      const double d = v - mean;
      mean += d / static_cast<double>(count);
      m2 += d * (v - mean);
    }
  }
  const double var = m2 / static_cast<double>(count - 1);
  return {mean * vol, vol * std::sqrt(var / static_cast<double>(count))};
}

}  // namespace ppz

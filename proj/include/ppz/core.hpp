#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ppz/geometry.hpp"
#include "ppz/sampling.hpp"
#include "ppz/target.hpp"

namespace ppz {

/// K, Q shape the intensity exp(-K m^Q); N is the exploration density
/// (expected points per unit volume); tol gates acceptance.
struct PpzConfig {
  double K = 10.0;
  double Q = 0.5;
  double N = 1000.0;
  double tol = 0.1;
  std::uint64_t seed = 1;
};

/// Throws std::invalid_argument unless K > 0, Q > 0, N >= 1, tol > 0.
void validate(const PpzConfig& cfg);

struct Candidate {
  Point location;
  double magnitude = 0.0;  // +inf for points outside the constraint set
  bool accepted = false;

  bool operator==(const Candidate&) const = default;
};

/// exp(-K m^Q). Underflow to 0 is intended.
double intensity_from_magnitude(double m, double K, double Q);

/// Intensity at x; 0 outside the target's constraint set.
double intensity(const TargetFunction& f, const Point& x, double K, double Q);

/// The gated retention rule: u < exp(-K m^Q) and m < tol.
bool retain(double u, double m, double K, double Q, double tol);

struct RealizeOptions {
  /// Overrides the expected point count N * volume(w).
  std::optional<double> expected_count;
  /// Keep rejected candidates in the result (diagnostics).
  bool keep_rejected = false;
  /// Worker threads for magnitude evaluation; 0 = machine parallelism.
  unsigned threads = 1;
};

struct Realization {
  std::vector<Candidate> candidates;  // accepted ones, plus rejected when kept
  std::size_t drawn = 0;              // points in the dominating pattern
  std::size_t accepted = 0;
};

/// Thins an already drawn pattern. One uniform per point is drawn from
/// `rng` in point order before any evaluation, so the outcome does not
/// depend on `threads`.
Realization thin_pattern(const TargetFunction& f, const PointPattern& pattern, const PpzConfig& cfg,
                         Rng& rng, const RealizeOptions& opts = {});

/// Draws a homogeneous pattern with mean N * volume(w) (or the override)
/// and thins it with the gated rule.
Realization realize(const TargetFunction& f, const Window& w, const PpzConfig& cfg, Rng& rng,
                    const RealizeOptions& opts = {});

/// Midpoint-rule estimate of the integral of exp(-K m^Q) over w on an
/// L-per-axis grid. With `tol`, the integrand is gated by m < tol. Throws
/// if L^p exceeds 1e8.
double expected_count_riemann(const TargetFunction& f, const Window& w, double K, double Q,
                              std::uint64_t cells_per_axis, std::optional<double> tol = std::nullopt,
                              unsigned threads = 1);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// (volume / L) sum_l lambda(x_l) for L uniform points, with the sample
/// standard error. Requires L >= 2.
McEstimate expected_count_mc(const TargetFunction& f, const Window& w, double K, double Q,
                             std::uint64_t samples, Rng& rng, unsigned threads = 1);

}  // namespace ppz

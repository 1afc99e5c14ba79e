#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppz/core.hpp"
#include "ppz/geometry.hpp"
#include "ppz/target.hpp"

namespace ppz {

struct AdaptiveConfig {
  PpzConfig base;              // base.tol is ignored; levels use tol_start / 10^depth
  double tol_start = 1e-1;
  double tol_end = 1e-10;
  int iters = 10;
  double r_frac = 0.01;        // child half-side as a fraction of the parent side
  double growth = 1.1;         // window factor on a failed attempt
  double n_growth = 1.1;       // point-count factor on a failed attempt
  double first_escalation = 10.0;
  int escalation_cap = 3;
  int retry_cap = 25;
  std::size_t max_windows = 10000;
  /// Global dedup radius as a fraction of the root side per axis.
  double dedup_radius = 1e-3;
  /// Merge zeros joined by a segment on which |f| stays below tolerance.
  bool merge_plateaus = true;
  /// Expected points per refinement window (defaults to base.N).
  std::optional<double> child_n;
  unsigned threads = 1;        // 0 = machine parallelism
  bool diagnostics = false;
  /// Abort with BudgetExceeded once this instant has passed.
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// Throws std::invalid_argument on an inconsistent configuration.
void validate(const AdaptiveConfig& cfg);

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RefinementNode {
  Window window;          // current window (after any growth)
  Window spawn_window;    // window at creation
  double tol = 0.0;
  int depth = 0;
  std::vector<std::uint64_t> lineage;
  double n_points = 0.0;  // expected points per attempt
  int attempts = 0;
  bool found = false;     // false once the window died

  bool operator==(const RefinementNode&) const = default;
};

enum class StationaryKind { none, minimum, maximum, saddle };

const char* to_string(StationaryKind kind);

struct Zero {
  Point location;
  double magnitude = 0.0;
  double achieved_tol = 0.0;
  int depth = 0;
  std::vector<std::uint64_t> lineage;
  /// Extrema runs only: f at the location and its classification.
  std::optional<double> value;
  StationaryKind kind = StationaryKind::none;

  bool operator==(const Zero&) const = default;
};

struct ZeroReport {
  std::vector<Zero> zeros;
  std::size_t died_windows = 0;
  int iterations_run = 0;
  int escalations = 0;
  double final_tol = 0.0;
  double wall_time = 0.0;          // seconds
  std::uint64_t evaluations = 0;   // magnitude evaluations
  /// Zeros alive after each depth, index 0 = depth 1.
  std::vector<std::vector<Zero>> snapshots;
  /// Rejected and accepted root candidates, kept only with diagnostics.
  std::vector<Candidate> root_candidates;
  /// Every refinement node in its final state, depth by depth; kept only
  /// with diagnostics.
  std::vector<RefinementNode> nodes;
  /// Extrema runs: indices into zeros of the global max and min of f.
  std::optional<std::size_t> global_max;
  std::optional<std::size_t> global_min;
};

ZeroReport run_adaptive(const TargetFunction& f, const Window& root, const AdaptiveConfig& cfg);

/// Greedy clustering by ascending magnitude: a zero is dropped when it
/// lies within radius * side_i of an already kept zero on every axis.
std::vector<Zero> dedup_global(std::vector<Zero> zeros, double radius, const Window& root);

/// Drops a zero when it is within `reach` * side_i of a kept, smaller
/// zero and |f| stays below both achieved tolerances on the segment
/// joining them.
std::vector<Zero> merge_plateaus(const TargetFunction& f, std::vector<Zero> zeros, double reach,
                                 const Window& root);

/// Stationary points of a real-scalar f: zeros of its finite-difference
/// gradient, with f evaluated and classified at each one.
ZeroReport find_extrema(const TargetFunction& f, const Window& root, const AdaptiveConfig& cfg,
                        double eps = 1e-6, DifferenceScheme scheme = DifferenceScheme::forward);

/// Canonical ordering used for reporting: coordinates, then magnitude.
bool zero_less(const Zero& a, const Zero& b);

}  // namespace ppz

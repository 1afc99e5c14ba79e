#include "ppz/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppz/parallel.hpp"

namespace ppz {

namespace {

// Tags keep the root and node substreams apart from each other.
constexpr std::uint64_t kRootTag = 0x524f4f54ULL;
constexpr std::uint64_t kNodeTag = 0x4e4f4445ULL;

using Clock = std::chrono::steady_clock;

struct Found {
  Zero zero;
  Window found_in;
};

void check_deadline(const AdaptiveConfig& cfg) {
  if (cfg.deadline && Clock::now() > *cfg.deadline) {
    throw BudgetExceeded("time budget exceeded");
  }
}

bool coords_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool by_magnitude(const Found& a, const Found& b) {
  if (a.zero.magnitude != b.zero.magnitude) return a.zero.magnitude < b.zero.magnitude;
  if (a.zero.location != b.zero.location) return coords_less(a.zero.location, b.zero.location);
  return a.zero.lineage < b.zero.lineage;
}

// Best candidate of one realization: smallest magnitude, ties by location.
const Candidate* best_accepted(const Realization& r) {
  const Candidate* best = nullptr;
  for (const auto& c : r.candidates) {
    if (!c.accepted) continue;
    if (!best || c.magnitude < best->magnitude ||
        (c.magnitude == best->magnitude && coords_less(c.location, best->location))) {
      best = &c;
    }
  }
  return best;
}

bool within_child_window(const Point& x, const Found& kept, double r_frac) {
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (std::fabs(x[i] - kept.zero.location[i]) > r_frac * kept.found_in.side(i)) return false;
  }
  return true;
}

// Keeps the smallest-magnitude candidate of each cluster of overlapping
// child windows and numbers the survivors into their lineage.
std::vector<Found> collapse(std::vector<Found> found, double r_frac) {
  std::sort(found.begin(), found.end(), by_magnitude);
  std::vector<Found> kept;
  for (auto& c : found) {
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Found& k) {
      return within_child_window(c.zero.location, k, r_frac);
    });
    if (!dup) kept.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < kept.size(); ++i) kept[i].zero.lineage.push_back(i);
  return kept;
}

// subwindow with a floor of a few ulps per axis, so deep levels keep a
// positive volume once r_frac * side drops below the spacing of doubles.
Window child_window(const Window& parent, const Point& center, double r_frac) {
  std::vector<double> lo(parent.dim());
  std::vector<double> hi(parent.dim());
  for (std::size_t i = 0; i < parent.dim(); ++i) {
    const double c = center[i];
    const double ulp = std::nextafter(std::fabs(c), std::numeric_limits<double>::infinity()) - std::fabs(c);
    const double r = std::max(r_frac * parent.side(i), 4.0 * std::max(ulp, std::numeric_limits<double>::denorm_min()));
    lo[i] = std::max(c - r, parent.lo(i));
    hi[i] = std::min(c + r, parent.hi(i));
    if (!(hi[i] > lo[i])) return parent;
  }
  return Window(std::move(lo), std::move(hi));
}

std::vector<Zero> zeros_of(const std::vector<Found>& level) {
  std::vector<Zero> out;
  out.reserve(level.size());
  for (const auto& f : level) out.push_back(f.zero);
  std::sort(out.begin(), out.end(), zero_less);
  return out;
}

bool within_box(const Point& a, const Point& b, double frac, const Window& root) {
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (std::fabs(a[i] - b[i]) > frac * root.side(i)) return false;
  }
  return true;
}

bool sort_by_magnitude(const Zero& a, const Zero& b) {
  if (a.magnitude != b.magnitude) return a.magnitude < b.magnitude;
  return zero_less(a, b);
}

// Hessian by central differences; classifies through the signs of the
// leading principal minors.
StationaryKind classify(const TargetFunction& f, const Point& x, const Window& root) {
  const std::size_t p = x.dim();
  std::vector<double> h(p);
  for (std::size_t i = 0; i < p; ++i) h[i] = std::max(1e-4 * root.side(i), 1e-6);
  auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
    std::vector<double> c = x.vec();
    c[i] += di;
    c[j] += dj;
    return f.eval_real(Point(c));
  };
  const double f0 = f.eval_real(x);
  std::vector<std::vector<double>> H(p, std::vector<double>(p));
  for (std::size_t i = 0; i < p; ++i) {
    H[i][i] = (at(i, h[i], i, 0.0) - 2.0 * f0 + at(i, -h[i], i, 0.0)) / (h[i] * h[i]);
    for (std::size_t j = i + 1; j < p; ++j) {
      H[i][j] = H[j][i] = (at(i, h[i], j, h[j]) - at(i, h[i], j, -h[j]) - at(i, -h[i], j, h[j]) +
                           at(i, -h[i], j, -h[j])) /
                          (4.0 * h[i] * h[j]);
    }
  }
  // Leading minors via Gaussian elimination without pivoting: the k-th
  // pivot is minor_k / minor_{k-1}.
  bool all_pos = true;
  bool all_neg = true;
  for (std::size_t k = 0; k < p; ++k) {
    const double pivot = H[k][k];
    if (!(std::fabs(pivot) > 0.0) || !std::isfinite(pivot)) return StationaryKind::none;
    if (pivot <= 0.0) all_pos = false;
    if (pivot >= 0.0) all_neg = false;
    for (std::size_t i = k + 1; i < p; ++i) {
      const double m = H[i][k] / pivot;
      for (std::size_t j = k; j < p; ++j) H[i][j] -= m * H[k][j];
    }
  }
  if (all_pos) return StationaryKind::minimum;
  if (all_neg) return StationaryKind::maximum;
  return StationaryKind::saddle;
}

}  // namespace

const char* to_string(StationaryKind kind) {
  switch (kind) {
    case StationaryKind::none: return "none";
    case StationaryKind::minimum: return "min";
    case StationaryKind::maximum: return "max";
    case StationaryKind::saddle: return "saddle";
  }
  return "?";
}

bool zero_less(const Zero& a, const Zero& b) {
  if (a.location != b.location) return coords_less(a.location, b.location);
  return a.magnitude < b.magnitude;
}

void validate(const AdaptiveConfig& cfg) {
  PpzConfig base = cfg.base;
  base.tol = cfg.tol_start;
  validate(base);
  if (!(cfg.tol_start > 0.0) || !(cfg.tol_end > 0.0) || cfg.tol_end > cfg.tol_start) {
    throw std::invalid_argument("need 0 < tol_end <= tol_start");
  }
  if (cfg.iters < 1) throw std::invalid_argument("iters must be >= 1");
  if (!(cfg.r_frac > 0.0) || cfg.r_frac > 0.5) throw std::invalid_argument("r_frac must be in (0, 0.5]");
  if (!(cfg.growth > 1.0)) throw std::invalid_argument("growth must be > 1");
  if (!(cfg.n_growth > 1.0)) throw std::invalid_argument("n_growth must be > 1");
  if (!(cfg.first_escalation >= 1.0)) throw std::invalid_argument("first_escalation must be >= 1");
  if (cfg.escalation_cap < 0 || cfg.retry_cap < 0) throw std::invalid_argument("caps must be >= 0");
  if (cfg.max_windows < 1) throw std::invalid_argument("max_windows must be >= 1");
  if (!(cfg.dedup_radius >= 0.0)) throw std::invalid_argument("dedup radius must be >= 0");
  if (cfg.child_n && !(*cfg.child_n >= 1.0)) throw std::invalid_argument("child N must be >= 1");
}

ZeroReport run_adaptive(const TargetFunction& f, const Window& root, const AdaptiveConfig& cfg) {
  const auto t0 = Clock::now();
  validate(cfg);
  if (root.dim() != f.dim()) {
    throw std::invalid_argument("window dimension " + std::to_string(root.dim()) +
                                " does not match target dimension " + std::to_string(f.dim()));
  }
  if (!(volume(root) > 0.0)) throw std::invalid_argument("root window has zero volume");

  const Rng base_rng(cfg.base.seed, 0);
  ZeroReport report;
  auto finish = [&](ZeroReport& r) -> ZeroReport {
    r.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
    return std::move(r);
  };

  // Depth 1: the root window, escalating when nothing is accepted.
  double tol = cfg.tol_start;
  double n = cfg.base.N;
  Realization root_real;
  int esc = 0;
  for (;; ++esc) {
    check_deadline(cfg);
    PpzConfig pc = cfg.base;
    pc.tol = tol;
    pc.N = n;
    const std::uint64_t path[] = {kRootTag, static_cast<std::uint64_t>(esc)};
    Rng rng = base_rng.fork_path(path);
    RealizeOptions opts;
    opts.keep_rejected = cfg.diagnostics;
    opts.threads = cfg.threads;
    root_real = realize(f, root, pc, rng, opts);
    report.evaluations += root_real.drawn;
    if (root_real.accepted > 0 || esc == cfg.escalation_cap) break;
    tol *= cfg.first_escalation;
    n *= cfg.first_escalation;
  }
  report.escalations = esc;
  report.iterations_run = 1;
  report.final_tol = tol;

  std::vector<Found> found;
  for (const auto& c : root_real.candidates) {
    if (!c.accepted) continue;
    Zero z;
    z.location = c.location;
    z.magnitude = c.magnitude;
    z.achieved_tol = tol;
    z.depth = 1;
    found.push_back({std::move(z), root});
  }
  if (cfg.diagnostics) report.root_candidates = std::move(root_real.candidates);
  std::vector<Found> level = collapse(std::move(found), cfg.r_frac);
  report.snapshots.push_back(zeros_of(level));

  for (int depth = 2; depth <= cfg.iters && !level.empty(); ++depth) {
    const double next_tol = tol / std::pow(10.0, depth - 1);
    // Slack so that rounding in the schedule does not drop the last level.
    if (next_tol < cfg.tol_end * (1.0 - 1e-9)) break;
    check_deadline(cfg);
    if (level.size() > cfg.max_windows) {
      throw std::runtime_error("refinement needs " + std::to_string(level.size()) +
                               " windows, above the limit of " + std::to_string(cfg.max_windows) +
                               "; raise --max-windows or lower --r-frac / --N");
    }

    std::vector<RefinementNode> nodes;
    nodes.reserve(level.size());
    for (const auto& parent : level) {
      Window spawn = child_window(parent.found_in, parent.zero.location, cfg.r_frac);
      nodes.push_back({spawn, spawn, next_tol, depth, parent.zero.lineage, cfg.child_n.value_or(cfg.base.N), 0});
    }

    std::vector<std::optional<Found>> results(nodes.size());
    std::vector<std::uint64_t> evals(nodes.size(), 0);
    parallel_for(nodes.size(), cfg.threads, [&](std::size_t k) {
      RefinementNode& node = nodes[k];
      std::vector<std::uint64_t> path = node.lineage;
      path.push_back(kNodeTag);
      const Rng node_rng = base_rng.fork_path(path);
      PpzConfig pc = cfg.base;
      pc.tol = node.tol;
      for (node.attempts = 0; node.attempts <= cfg.retry_cap; ++node.attempts) {
        check_deadline(cfg);
        Rng rng = node_rng.fork(static_cast<std::uint64_t>(node.attempts));
        RealizeOptions opts;
        opts.expected_count = node.n_points;
        const Realization r = realize(f, node.window, pc, rng, opts);
        evals[k] += r.drawn;
        if (const Candidate* best = best_accepted(r)) {
          Zero z;
          z.location = best->location;
          z.magnitude = best->magnitude;
          z.achieved_tol = node.tol;
          z.depth = node.depth;
          z.lineage = node.lineage;
          results[k] = Found{std::move(z), node.window};
          node.found = true;
          return;
        }
        if (node.attempts == cfg.retry_cap) break;
        node.window = grow(node.window, cfg.growth, root);
        node.n_points *= cfg.n_growth;
      }
    });

    std::vector<Found> children;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      report.evaluations += evals[k];
      if (results[k]) {
        children.push_back(std::move(*results[k]));
      } else {
        ++report.died_windows;
      }
    }
    if (cfg.diagnostics) report.nodes.insert(report.nodes.end(), nodes.begin(), nodes.end());
    level = collapse(std::move(children), cfg.r_frac);
    report.snapshots.push_back(zeros_of(level));
    report.iterations_run = depth;
    report.final_tol = next_tol;
  }

  std::vector<Zero> zeros = zeros_of(level);
  zeros = dedup_global(std::move(zeros), cfg.dedup_radius, root);
  if (cfg.merge_plateaus) zeros = merge_plateaus(f, std::move(zeros), 2.0 * cfg.r_frac, root);
  report.zeros = std::move(zeros);
  return finish(report);
}

std::vector<Zero> dedup_global(std::vector<Zero> zeros, double radius, const Window& root) {
  if (!(radius >= 0.0)) throw std::invalid_argument("dedup_global: radius must be >= 0");
  std::sort(zeros.begin(), zeros.end(), sort_by_magnitude);
  std::vector<Zero> kept;
  for (auto& z : zeros) {
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Zero& k) {
      return within_box(z.location, k.location, radius, root);
    });
    if (!dup) kept.push_back(std::move(z));
  }
  std::sort(kept.begin(), kept.end(), zero_less);
  return kept;
}

std::vector<Zero> merge_plateaus(const TargetFunction& f, std::vector<Zero> zeros, double reach,
                                 const Window& root) {
  constexpr int kProbes = 32;
  std::sort(zeros.begin(), zeros.end(), sort_by_magnitude);
  std::vector<Zero> kept;
  auto flat_between = [&](const Zero& a, const Zero& b) {
    const double gate = std::max(a.achieved_tol, b.achieved_tol);
    std::vector<double> c(a.location.dim());
    for (int j = 1; j <= kProbes; ++j) {
      const double t = static_cast<double>(j) / (kProbes + 1);
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.location[i] + t * (b.location[i] - a.location[i]);
      const Point x(c);
      try {
        if (!f.feasible(x) || !(magnitude(f, x) < gate)) return false;
      } catch (const EvaluationError&) {
        return false;
      }
    }
    return true;
  };
  for (auto& z : zeros) {
    const bool merged = std::any_of(kept.begin(), kept.end(), [&](const Zero& k) {
      return within_box(z.location, k.location, reach, root) && flat_between(k, z);
    });
    if (!merged) kept.push_back(std::move(z));
  }
  std::sort(kept.begin(), kept.end(), zero_less);
  return kept;
}

ZeroReport find_extrema(const TargetFunction& f, const Window& root, const AdaptiveConfig& cfg, double eps,
                        DifferenceScheme scheme) {
  if (f.kind() != TargetKind::real_scalar) {
    throw std::invalid_argument("find_extrema: target must be real-scalar");
  }
  ZeroReport report = run_adaptive(fd_gradient_target(f, eps, scheme), root, cfg);
  for (auto& z : report.zeros) {
    z.value = f.eval_real(z.location);
    if (!std::isfinite(*z.value)) throw EvaluationError("target evaluated to a non-finite value", z.location);
    z.kind = classify(f, z.location, root);
  }
  for (std::size_t i = 0; i < report.zeros.size(); ++i) {
    const double v = *report.zeros[i].value;
    if (!report.global_max || v > *report.zeros[*report.global_max].value) report.global_max = i;
    if (!report.global_min || v < *report.zeros[*report.global_min].value) report.global_min = i;
  }
  return report;
}

}  // namespace ppz

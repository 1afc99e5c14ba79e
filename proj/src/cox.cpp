#include "ppz/cox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ppz/core.hpp"
#include "ppz/parallel.hpp"
#include "ppz/sampling.hpp"

namespace ppz {

namespace {

// Quantile of sorted data, linear interpolation between order statistics.
double quantile(const std::vector<double>& sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

void validate(const GammaParams& gp) {
  if (!(gp.shape > 0.0) || !(gp.rate > 0.0) || !std::isfinite(gp.shape) || !std::isfinite(gp.rate)) {
    throw std::invalid_argument("gamma: shape and rate must be positive and finite");
  }
}

GammaParams gamma_from_shape_scale(double shape, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("gamma: scale must be positive");
  GammaParams gp{shape, 1.0 / scale};
  validate(gp);
  return gp;
}

std::vector<Point> make_grid(const Window& w, std::size_t per_axis) {
  if (per_axis < 2) throw std::invalid_argument("grid: need at least 2 points per axis");
  const std::size_t p = w.dim();
  std::size_t total = 1;
  for (std::size_t i = 0; i < p; ++i) {
    if (total > 100000000 / per_axis) throw std::invalid_argument("grid: more than 1e8 points");
    total *= per_axis;
  }
  std::vector<Point> grid;
  grid.reserve(total);
  std::vector<double> c(p);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rest = k;
    for (std::size_t i = 0; i < p; ++i) {
      const std::size_t idx = rest % per_axis;
      rest /= per_axis;
      c[i] = idx + 1 == per_axis ? w.hi(i) : w.lo(i) + w.side(i) * static_cast<double>(idx) / static_cast<double>(per_axis - 1);
    }
    grid.emplace_back(c);
  }
  return grid;
}

IntensityDraws random_intensity_draws(const TargetFunction& f, const Window& w, const std::vector<Point>& grid,
                                      double Q, const GammaParams& gp, std::size_t n_draws, std::uint64_t seed,
                                      unsigned threads) {
  validate(gp);
  if (!(Q > 0.0)) throw std::invalid_argument("Q must be positive");
  if (n_draws < 1) throw std::invalid_argument("need at least one draw");
  for (const auto& x : grid) {
    if (!contains(w, x)) throw std::invalid_argument("grid point outside the window");
  }
  IntensityDraws out;
  out.rows = n_draws;
  out.cols = grid.size();
  // m^Q per grid point; -1 marks points outside the constraint set.
  std::vector<double> mq(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t c) {
    mq[c] = f.feasible(grid[c]) ? std::pow(magnitude(f, grid[c]), Q) : -1.0;
  });
  out.k.resize(n_draws);
  out.values.resize(n_draws * grid.size());
  const Rng base(seed, 0x434f58ULL);
  parallel_for(n_draws, threads, [&](std::size_t r) {
    Rng rng = base.fork(r);
    const double K = rng.gamma(gp.shape, gp.rate);
    out.k[r] = K;
    double* row = out.values.data() + r * out.cols;
    for (std::size_t c = 0; c < out.cols; ++c) {
      row[c] = mq[c] < 0.0 ? 0.0 : (mq[c] == 0.0 ? 1.0 : std::exp(-K * mq[c]));
    }
  });
  return out;
}

double mean_intensity_closed_form(double m, double Q, const GammaParams& gp) {
  validate(gp);
  if (!(m >= 0.0)) throw std::invalid_argument("magnitude must be >= 0");
  if (m == 0.0) return 1.0;
  return std::pow(gp.rate / (gp.rate + std::pow(m, Q)), gp.shape);
}

std::vector<EnvelopePoint> envelope(const IntensityDraws& draws, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("envelope: level must be in (0, 1)");
  const double needed = std::ceil(1.0 / (1.0 - level) - 1e-9);
  if (static_cast<double>(draws.rows) < needed) {
    throw std::invalid_argument("envelope: level " + std::to_string(level) + " needs at least " +
                                std::to_string(static_cast<long long>(needed)) + " draws, got " +
                                std::to_string(draws.rows));
  }
  const double q_lo = (1.0 - level) / 2.0;
  const double q_hi = 1.0 - q_lo;
  std::vector<EnvelopePoint> out(draws.cols);
  std::vector<double> column(draws.rows);
  for (std::size_t c = 0; c < draws.cols; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < draws.rows; ++r) {
      column[r] = draws.at(r, c);
      sum += column[r];
    }
    std::sort(column.begin(), column.end());
    EnvelopePoint& e = out[c];
    e.lower = quantile(column, q_lo);
    e.upper = quantile(column, q_hi);
    e.median = quantile(column, 0.5);
    // A constant column keeps its value exactly.
    e.mean = column.front() == column.back() ? column.front() : sum / static_cast<double>(draws.rows);
  }
  return out;
}

}  // namespace ppz

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ppz/geometry.hpp"
#include "ppz/target.hpp"

namespace ppz {

/// K ~ Gamma(shape, rate), mean shape / rate.
struct GammaParams {
  double shape = 5.0;
  double rate = 2.0;
};

void validate(const GammaParams& gp);

/// Converts a shape-scale pair to shape-rate.
GammaParams gamma_from_shape_scale(double shape, double scale);

/// Regular grid with `per_axis` points per axis, endpoints included.
std::vector<Point> make_grid(const Window& w, std::size_t per_axis);

/// Row k holds exp(-K_k m(x)^Q) over the grid, K_k iid Gamma. Row-major.
struct IntensityDraws {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> k;       // the K drawn for each row
  std::vector<double> values;  // rows * cols
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Each row uses its own substream keyed by the row index, so the matrix
/// does not depend on `threads`.
IntensityDraws random_intensity_draws(const TargetFunction& f, const Window& w, const std::vector<Point>& grid,
                                      double Q, const GammaParams& gp, std::size_t n_draws, std::uint64_t seed,
                                      unsigned threads = 1);

/// E[exp(-K m^Q)] = (rate / (rate + m^Q))^shape.
double mean_intensity_closed_form(double m, double Q, const GammaParams& gp);

struct EnvelopePoint {
  double lower = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double upper = 0.0;
};

/// Pointwise empirical quantiles (1-level)/2 and 1-(1-level)/2 (linear
/// interpolation between order statistics), plus mean and median.
/// Needs at least 1/(1-level) draws.
std::vector<EnvelopePoint> envelope(const IntensityDraws& draws, double level = 0.95);

}  // namespace ppz

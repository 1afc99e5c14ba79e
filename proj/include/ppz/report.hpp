#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ppz/adaptive.hpp"
#include "ppz/cox.hpp"
#include "ppz/geometry.hpp"

namespace ppz {

/// Everything needed to rerun and audit one zeros or extrema run.
struct RunRecord {
  std::string command = "zeros";  // "zeros" or "extrema"
  std::string function;           // builtin name or expression text
  bool builtin = false;
  TargetKind kind = TargetKind::real_scalar;
  std::string constraint;         // empty when unconstrained
  Window window;
  /// The deadline is never serialized.
  AdaptiveConfig config;
  std::optional<double> eps;              // extrema only
  std::optional<DifferenceScheme> scheme;  // extrema only
  std::optional<std::size_t> eta_terms;   // eta / zeta builtins only
  ZeroReport result;
};

bool operator==(const RunRecord& a, const RunRecord& b);

/// Field order is fixed and numbers print as the shortest decimal that
/// reads back to the same double. Wall time and thread count sit in the
/// trailing "timing" object, the only part that may differ between runs.
std::string to_json(const RunRecord& r, int indent = 2);

/// Inverse of to_json. Throws std::invalid_argument on malformed input.
RunRecord run_record_from_json(const std::string& text);

/// The JSON text without its "timing" object.
std::string without_timing(const std::string& json_text);

/// Header plus one row per zero: coordinates, magnitude, achieved_tol,
/// depth. Extrema runs add value and kind.
std::string to_csv(const RunRecord& r);

/// Coordinate column names: x for one dimension, x1..xp otherwise,
/// sigma,t for complex targets.
std::vector<std::string> coordinate_names(std::size_t dim, TargetKind kind);

/// Shortest round-trip decimal.
std::string format_double(double v);

/// Grid coordinates, lower, mean, upper, median and the closed-form mean.
std::string envelope_csv(const std::vector<Point>& grid, const std::vector<EnvelopePoint>& env,
                         const std::vector<double>& closed_form, TargetKind kind);

}  // namespace ppz

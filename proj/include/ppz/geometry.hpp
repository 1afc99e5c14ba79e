#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppz {

/// A location in R^p. The complex plane is carried as p = 2 with
/// coordinates (sigma, t).
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords);

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }

  std::span<const double> coords() const { return coords_; }
  const std::vector<double>& vec() const { return coords_; }

  auto begin() const { return coords_.begin(); }
  auto end() const { return coords_.end(); }

  bool operator==(const Point&) const = default;
  // Lexicographic; used for canonical ordering of results.
  bool operator<(const Point& other) const { return coords_ < other.coords_; }

 private:
  std::vector<double> coords_;
};

/// Closed axis-aligned hyperrectangle [lo_1, hi_1] x ... x [lo_p, hi_p].
class Window {
 public:
  Window() = default;
  Window(std::vector<double> lo, std::vector<double> hi);

  /// Parses `lo1:hi1,lo2:hi2,...`, e.g. `-15:15` or `0:1.3,13:43`.
  static Window parse(std::string_view text);
  /// The same bounds on every axis.
  static Window cube(std::size_t dim, double lo, double hi);

  std::size_t dim() const { return lo_.size(); }
  double lo(std::size_t i) const { return lo_[i]; }
  double hi(std::size_t i) const { return hi_[i]; }
  double side(std::size_t i) const { return hi_[i] - lo_[i]; }
  double center(std::size_t i) const { return 0.5 * (lo_[i] + hi_[i]); }
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }

  std::string to_string() const;

  bool operator==(const Window&) const = default;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
};

double volume(const Window& w);

/// Closed-boundary membership. Throws std::invalid_argument on a
/// dimension mismatch.
bool contains(const Window& w, const Point& x);

/// True iff `inner` lies inside `outer` on every axis.
bool nested_in(const Window& inner, const Window& outer);

/// [c_i - r_i, c_i + r_i] per axis with r_i = r_frac * side_i(parent),
/// intersected with the parent.
Window subwindow(const Window& parent, const Point& center, double r_frac);

/// Scales every half-side by `factor` about the window center, then clips
/// to `root`. Requires factor > 1.
Window grow(const Window& w, double factor, const Window& root);

/// Intersection of two windows of equal dimension; throws if empty.
Window intersect(const Window& a, const Window& b);

}  // namespace ppz

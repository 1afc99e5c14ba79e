#include "ppz/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ppz {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double c : v) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument(std::string(what) + ": coordinates must be finite");
    }
  }
}

double parse_double(std::string_view s, std::string_view whole) {
  // std::from_chars rejects a leading '+', which users do type.
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("window: cannot parse bound '" + std::string(s) + "' in '" +
                                std::string(whole) + "'");
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw std::invalid_argument("point: dimension must be >= 1");
  require_finite(coords_, "point");
}

Point::Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

Window::Window(std::vector<double> lo, std::vector<double> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.empty() || lo_.size() != hi_.size()) {
    throw std::invalid_argument("window: lo and hi must have the same nonzero length");
  }
  require_finite(lo_, "window");
  require_finite(hi_, "window");
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (lo_[i] > hi_[i]) throw std::invalid_argument("window: lo > hi on axis " + std::to_string(i));
  }
}

Window Window::parse(std::string_view text) {
  std::vector<double> lo;
  std::vector<double> hi;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    std::string_view axis = trim(rest.substr(0, comma));
    // The separator is the first ':' that is not the sign of the lower bound.
    const auto colon = axis.find(':', 1);
    if (axis.empty() || colon == std::string_view::npos) {
      throw std::invalid_argument("window: expected lo:hi per axis, got '" + std::string(text) + "'");
    }
    lo.push_back(parse_double(trim(axis.substr(0, colon)), text));
    hi.push_back(parse_double(trim(axis.substr(colon + 1)), text));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return Window(std::move(lo), std::move(hi));
}

Window Window::cube(std::size_t dim, double lo, double hi) {
  return Window(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
}

std::string Window::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (i) os << ',';
    os << lo_[i] << ':' << hi_[i];
  }
  return os.str();
}

double volume(const Window& w) {
  double v = 1.0;
  for (std::size_t i = 0; i < w.dim(); ++i) v *= w.side(i);
  return v;
}

bool contains(const Window& w, const Point& x) {
  if (w.dim() != x.dim()) {
    throw std::invalid_argument("contains: window has dimension " + std::to_string(w.dim()) +
                                " but point has " + std::to_string(x.dim()));
  }
  for (std::size_t i = 0; i < w.dim(); ++i) {
    if (x[i] < w.lo(i) || x[i] > w.hi(i)) return false;
  }
  return true;
}

bool nested_in(const Window& inner, const Window& outer) {
  if (inner.dim() != outer.dim()) return false;
  for (std::size_t i = 0; i < inner.dim(); ++i) {
    if (inner.lo(i) < outer.lo(i) || inner.hi(i) > outer.hi(i)) return false;
  }
  return true;
}

Window intersect(const Window& a, const Window& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("intersect: dimension mismatch");
  std::vector<double> lo(a.dim());
  std::vector<double> hi(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    lo[i] = std::max(a.lo(i), b.lo(i));
    hi[i] = std::min(a.hi(i), b.hi(i));
    if (lo[i] > hi[i]) throw std::invalid_argument("intersect: windows do not overlap");
  }
  return Window(std::move(lo), std::move(hi));
}

Window subwindow(const Window& parent, const Point& center, double r_frac) {
  if (!(r_frac > 0.0)) throw std::invalid_argument("subwindow: r_frac must be positive");
  if (center.dim() != parent.dim()) throw std::invalid_argument("subwindow: dimension mismatch");
  std::vector<double> lo(parent.dim());
  std::vector<double> hi(parent.dim());
  for (std::size_t i = 0; i < parent.dim(); ++i) {
    const double r = r_frac * parent.side(i);
    lo[i] = center[i] - r;
    hi[i] = center[i] + r;
  }
  return intersect(Window(std::move(lo), std::move(hi)), parent);
}

Window grow(const Window& w, double factor, const Window& root) {
  if (!(factor > 1.0)) throw std::invalid_argument("grow: factor must be > 1");
  std::vector<double> lo(w.dim());
  std::vector<double> hi(w.dim());
  for (std::size_t i = 0; i < w.dim(); ++i) {
    const double half = 0.5 * w.side(i) * factor;
    lo[i] = w.center(i) - half;
    hi[i] = w.center(i) + half;
  }
  return intersect(Window(std::move(lo), std::move(hi)), root);
}

}  // namespace ppz

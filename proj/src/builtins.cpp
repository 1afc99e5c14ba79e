#include "ppz/builtins.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace ppz {

namespace {

using C = std::complex<double>;

void check_eta_args(C s, std::size_t terms) {
  if (terms == 0) throw std::invalid_argument("eta: number of terms must be >= 1");
  if (!(s.real() > 0.0)) {
    throw std::invalid_argument("eta: the alternating series diverges for sigma <= 0");
  }
}

// ln 1 .. ln L, shared by every evaluation of one target.
std::shared_ptr<const std::vector<double>> log_table(std::size_t terms) {
  auto t = std::make_shared<std::vector<double>>(terms);
  for (std::size_t n = 1; n <= terms; ++n) (*t)[n - 1] = std::log(static_cast<double>(n));
  return t;
}

C eta_sum(C s, const std::vector<double>& ln) {
  const double sigma = s.real();
  const double t = s.imag();
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 0; k < ln.size(); ++k) {
    const double l = ln[k];
    const double mag = std::exp(-sigma * l);
    const double a = t * l;
    // n = k + 1 is odd when k is even: sign (-1)^(n+1) = +1.
    if (k % 2 == 0) {
      re += mag * std::cos(a);
      im += mag * std::sin(a);
    } else {
      re -= mag * std::cos(a);
      im -= mag * std::sin(a);
    }
  }
  return {re, -im};
}

C eta_with(C s, const std::vector<double>& ln) {
  if (!(s.real() > 0.0)) {
    throw EvaluationError("eta: the alternating series diverges for sigma <= 0", Point{s.real(), s.imag()});
  }
  return eta_sum(s, ln);
}

C zeta_with(C s, const std::vector<double>& ln) {
  const C eta = eta_with(s, ln);
  const C denom = 1.0 - std::pow(C(2.0, 0.0), 1.0 - s);
  if (std::abs(denom) < 1e-12) throw PoleProximityError(s, eta);
  return eta / denom;
}

std::string describe_complex(C s) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "(%.17g, %.17g)", s.real(), s.imag());
  return buf;
}

double sincos1(double x) {
  const double c = std::cos(x);
  return std::sin(x / 20.0) + c * c;
}

// "sum-sq(3)" -> ("sum-sq", 3); plain names keep `dim`.
std::pair<std::string, std::size_t> split_name(std::string_view name, std::size_t dim) {
  const auto open = name.find('(');
  if (open == std::string_view::npos) return {std::string(name), dim};
  if (name.back() != ')') throw std::invalid_argument("builtin: malformed name '" + std::string(name) + "'");
  std::string_view arg = name.substr(open + 1, name.size() - open - 2);
  std::size_t p = 0;
  auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), p);
  if (ec != std::errc() || ptr != arg.data() + arg.size() || p == 0) {
    throw std::invalid_argument("builtin: bad dimension in '" + std::string(name) + "'");
  }
  return {std::string(name.substr(0, open)), p};
}

std::string inventory() {
  std::string out;
  for (const auto& n : builtin_names()) out += (out.empty() ? "" : ", ") + n;
  return out;
}

}  // namespace

PoleProximityError::PoleProximityError(C s, C eta)
    : EvaluationError("zeta: 1 - 2^(1-s) vanishes (pole of the continuation); eta = " + describe_complex(eta),
                      Point{s.real(), s.imag()}),
      eta_(eta) {}

C eta_partial(C s, std::size_t terms) {
  check_eta_args(s, terms);
  double re = 0.0;
  double im = 0.0;
  double ln = 0.0;
  for (std::size_t n = 1; n <= terms; ++n) {
    ln = std::log(static_cast<double>(n));
    const double mag = std::exp(-s.real() * ln);
    const double a = s.imag() * ln;
    if (n % 2 == 1) {
      re += mag * std::cos(a);
      im += mag * std::sin(a);
    } else {
      re -= mag * std::cos(a);
      im -= mag * std::sin(a);
    }
  }
  return {re, -im};
}

C zeta_from_eta(C s, std::size_t terms) {
  const C eta = eta_partial(s, terms);
  const C denom = 1.0 - std::pow(C(2.0, 0.0), 1.0 - s);
  if (std::abs(denom) < 1e-12) throw PoleProximityError(s, eta);
  return eta / denom;
}

TargetFunction poly_from_roots(const std::vector<Root>& roots) {
  int degree = 0;
  std::string desc;
  for (const auto& r : roots) {
    if (r.multiplicity < 1) throw std::invalid_argument("poly_from_roots: multiplicity must be >= 1");
    degree += r.multiplicity;
    desc += "(s-" + describe_complex(r.value) + ")";
    if (r.multiplicity > 1) desc += "^" + std::to_string(r.multiplicity);
  }
  if (degree < 1) throw std::invalid_argument("poly_from_roots: degree must be >= 1");
  return TargetFunction::complex(
      [roots](C s) {
        C p(1.0, 0.0);
        for (const auto& r : roots) {
          const C d = s - r.value;
          for (int k = 0; k < r.multiplicity; ++k) p *= d;
        }
        return p;
      },
      desc);
}

std::vector<std::string> builtin_names() {
  return {"cos", "sincos", "hard-poly", "sum-sq", "gauss", "sincos2d", "eta", "zeta"};
}

std::size_t builtin_dim(std::string_view name, std::size_t dim) {
  auto [base, p] = split_name(name, dim);
  if (base == "sincos2d" || base == "eta" || base == "zeta") return 2;
  if (base == "sum-sq" || base == "gauss") return p;
  return 1;
}

TargetFunction builtin(std::string_view name, std::size_t dim, std::size_t eta_terms) {
  auto [base, p] = split_name(name, dim);
  if (p == 0) throw std::invalid_argument("builtin: dimension must be >= 1");
  if (base == "cos") {
    return TargetFunction::real_scalar(1, [](const Point& x) { return std::cos(x[0]); }, "cos");
  }
  if (base == "sincos") {
    return TargetFunction::real_scalar(1, [](const Point& x) { return sincos1(x[0]); }, "sincos");
  }
  if (base == "hard-poly") {
    return TargetFunction::real_scalar(
        1,
        [](const Point& x) { return 35.0 * std::pow(x[0] - 3.0, 5) * std::pow(x[0] - 2.0, 10); },
        "hard-poly");
  }
  if (base == "sum-sq") {
    return TargetFunction::real_scalar(
        p,
        [](const Point& x) {
          double s = 0.0;
          for (double c : x) s += (c - 0.1) * (c - 0.1);
          return s;
        },
        "sum-sq(" + std::to_string(p) + ")");
  }
  if (base == "gauss") {
    return TargetFunction::real_scalar(
        p,
        [](const Point& x) {
          double s = 0.0;
          for (double c : x) s += (c - 1.0) * (c - 1.0);
          return std::exp(-0.5 * s);
        },
        "gauss(" + std::to_string(p) + ")");
  }
  if (base == "sincos2d") {
    return TargetFunction::real_scalar(
        2, [](const Point& x) { return sincos1(x[0]) * sincos1(x[1]); }, "sincos2d");
  }
  if (base == "eta" || base == "zeta") {
    if (eta_terms == 0) throw std::invalid_argument("builtin: eta terms must be >= 1");
    auto ln = log_table(eta_terms);
    const bool zeta = base == "zeta";
    return TargetFunction::complex(
        [ln, zeta](C s) { return zeta ? zeta_with(s, *ln) : eta_with(s, *ln); },
        base + "[L=" + std::to_string(eta_terms) + "]");
  }
  throw std::invalid_argument("unknown builtin '" + std::string(name) + "'; available: " + inventory());
}

}  // namespace ppz

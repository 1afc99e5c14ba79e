#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ppz/builtins.hpp"
#include "ppz/core.hpp"
#include "ppz/sampling.hpp"

using namespace ppz;
constexpr double kPi = std::numbers::pi;

// Midpoint rule at L = 1e7 cells, computed once and frozen.
constexpr double kCosReference = 0.080555739472779234;

namespace {

TargetFunction constant(double c, std::size_t dim = 1) {
  return TargetFunction::real_scalar(dim, [c](const Point&) { return c; });
}

PointPattern repeated(const Point& x, std::size_t n, const Window& w) {
  return PointPattern{std::vector<Point>(n, x), w};
}

}  // namespace

TEST_CASE("intensity examples") {
  CHECK(intensity_from_magnitude(0.0, 10, 0.5) == 1.0);
  CHECK(intensity_from_magnitude(0.01, 10, 0.5) == doctest::Approx(0.3678794412).epsilon(1e-10));
  CHECK(intensity_from_magnitude(0.1, 15, 2) == doctest::Approx(0.8607079764).epsilon(1e-10));
  CHECK(intensity_from_magnitude(1e6, 50, 1) == 0.0);
  CHECK(intensity(builtin("cos"), Point{kPi / 2}, 10, 0.5) > 0.9999);
  CHECK_THROWS_AS(intensity_from_magnitude(-1.0, 10, 0.5), std::invalid_argument);
}

TEST_CASE("config validation") {
  PpzConfig c;
  CHECK_NOTHROW(validate(c));
  c.K = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = PpzConfig{};
  c.Q = -1;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = PpzConfig{};
  c.N = 0.5;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = PpzConfig{};
  c.tol = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("property: intensity bounds and monotonicity") {
  Rng rng(4);
  for (int i = 0; i < 5000; ++i) {
    const double m = 3.0 * rng.uniform();
    const double K = 0.1 + 50 * rng.uniform();
    const double Q = 0.25 + 2 * rng.uniform();
    const double lam = intensity_from_magnitude(m, K, Q);
    CHECK(lam <= 1.0);
    CHECK(lam >= 0.0);
    const double m2 = m + 0.01 + rng.uniform();
    CHECK(intensity_from_magnitude(m2, K, Q) <= lam);
    if (m > 0 && lam > 1e-300) {
      CHECK(intensity_from_magnitude(m, K * 1.5, Q) < lam);
      CHECK(intensity_from_magnitude(m2, K, Q) < lam);
    }
    CHECK(intensity_from_magnitude(0.0, K, Q) == 1.0);
  }
  // Strictly positive where the exponent is representable.
  CHECK(intensity_from_magnitude(1.0, 10, 1) > 0.0);
}

TEST_CASE("retain rule") {
  CHECK(retain(0.0, 0.0, 10, 0.5, 0.1));
  CHECK(retain(0.999999, 0.0, 10, 0.5, 0.1));
  CHECK_FALSE(retain(0.0, 0.1, 10, 0.5, 0.1));
  CHECK_FALSE(retain(0.0, 1.0, 1e-9, 0.5, 0.1));
  CHECK(retain(0.3, 0.01, 10, 0.5, 0.1));
  CHECK_FALSE(retain(0.4, 0.01, 10, 0.5, 0.1));
}

TEST_CASE("realize: f = 1 accepts nothing") {
  PpzConfig cfg;
  cfg.tol = 0.1;
  for (double K : {1e-6, 1.0, 10.0}) {
    cfg.K = K;
    Rng rng(1);
    const Realization r = realize(constant(1.0), Window({0}, {5}), cfg, rng, {.keep_rejected = true});
    CHECK(r.accepted == 0);
    CHECK(r.drawn > 0);
    CHECK(r.candidates.size() == r.drawn);
  }
}

TEST_CASE("realize: cos candidates lie near odd multiples of pi/2") {
  PpzConfig cfg;
  cfg.K = 10;
  cfg.Q = 0.5;
  cfg.N = 1000;
  cfg.tol = 0.1;
  Rng rng(1);
  const Realization r = realize(builtin("cos"), Window({-15}, {15}), cfg, rng);
  REQUIRE(r.accepted > 0);
  CHECK(r.candidates.size() == r.accepted);
  for (const auto& c : r.candidates) {
    CHECK(c.accepted);
    CHECK(c.magnitude < 0.1);
    const double k = std::round((c.location[0] - kPi / 2) / kPi);
    CHECK(std::fabs(c.location[0] - (kPi / 2 + k * kPi)) < 0.10017);
  }
}

TEST_CASE("thinning: Bernoulli acceptance oracle") {
  const TargetFunction f = TargetFunction::real_scalar(1, [](const Point& x) { return x[0]; });
  const Window w({0}, {1});
  PpzConfig cfg;
  cfg.K = 10;
  cfg.Q = 0.5;
  cfg.tol = 0.1;
  const double ms[] = {0.0, 0.01, 0.05, 0.5};
  for (double m : ms) {
    Rng rng(123, static_cast<std::uint64_t>(m * 1000));
    const std::size_t n = 10000;
    const Realization r = thin_pattern(f, repeated(Point{m}, n, w), cfg, rng);
    const double p = m < cfg.tol ? std::exp(-cfg.K * std::pow(m, cfg.Q)) : 0.0;
    const double sigma = std::sqrt(p * (1 - p) / n);
    const double rate = static_cast<double>(r.accepted) / n;
    CAPTURE(m);
    CHECK(std::fabs(rate - p) <= 3 * sigma);
  }
}

TEST_CASE("thinning does not depend on the thread count") {
  const TargetFunction f = builtin("sincos2d");
  PpzConfig cfg;
  cfg.N = 200;
  cfg.tol = 0.5;
  Rng a(9), b(9);
  const Window w = Window::cube(2, -5, 5);
  RealizeOptions one{.keep_rejected = true, .threads = 1};
  RealizeOptions four{.keep_rejected = true, .threads = 4};
  const Realization ra = realize(f, w, cfg, a, one);
  const Realization rb = realize(f, w, cfg, b, four);
  CHECK(ra.candidates == rb.candidates);
  CHECK(ra.accepted == rb.accepted);
  CHECK(a.next() == b.next());
}

TEST_CASE("realize errors") {
  PpzConfig cfg;
  Rng rng(1);
  CHECK_THROWS_AS(realize(constant(1.0), Window({0}, {0}), cfg, rng), std::invalid_argument);
  CHECK_THROWS_AS(realize(constant(1.0, 2), Window({0}, {1}), cfg, rng), std::invalid_argument);
  const TargetFunction bad = TargetFunction::real_scalar(1, [](const Point& x) { return std::log(x[0] - 0.5); });
  CHECK_THROWS_AS(realize(bad, Window({0}, {1}), cfg, rng), EvaluationError);
}

TEST_CASE("expected_count_riemann examples") {
  CHECK(expected_count_riemann(constant(0.0), Window({0}, {1}), 10, 0.5, 1) == 1.0);
  CHECK(expected_count_riemann(constant(0.0), Window({0}, {1}), 10, 0.5, 1000) == doctest::Approx(1.0).epsilon(1e-12));
  const double c = std::exp(-10 * std::sqrt(0.3));
  for (std::uint64_t L : {1u, 7u, 100u}) {
    CHECK(expected_count_riemann(constant(0.3, 2), Window({0, 0}, {2, 3}), 10, 0.5, L) ==
          doctest::Approx(6 * c).epsilon(1e-12));
  }
  const double r6 = expected_count_riemann(builtin("cos"), Window({0}, {2 * kPi}), 10, 0.5, 1000000);
  CHECK(std::fabs(r6 - kCosReference) / kCosReference <= 1e-6);
  CHECK_THROWS_AS(expected_count_riemann(builtin("sum-sq", 3), Window::cube(3, 0, 1), 10, 0.5, 1000), std::invalid_argument);
  CHECK_THROWS_AS(expected_count_riemann(constant(0.0), Window({0}, {1}), 10, 0.5, 0), std::invalid_argument);
}

TEST_CASE("expected_count_mc examples") {
  Rng rng(10);
  const McEstimate c = expected_count_mc(constant(0.3), Window({0}, {4}), 10, 0.5, 1000, rng);
  CHECK(c.estimate == doctest::Approx(4 * std::exp(-10 * std::sqrt(0.3))).epsilon(1e-12));
  CHECK(c.std_error == 0.0);

  const McEstimate two = expected_count_mc(builtin("cos"), Window({0}, {2 * kPi}), 10, 0.5, 2, rng);
  CHECK(std::isfinite(two.std_error));
  CHECK_THROWS_AS(expected_count_mc(constant(0.3), Window({0}, {4}), 10, 0.5, 1, rng), std::invalid_argument);

  Rng r2(2024);
  const McEstimate mc = expected_count_mc(builtin("cos"), Window({0}, {2 * kPi}), 10, 0.5, 1000000, r2);
  CHECK(std::fabs(mc.estimate - kCosReference) <= 4 * mc.std_error);
}

TEST_CASE("property: Lambda_K nonincreasing in K and within its bounds") {
  const TargetFunction f = builtin("cos");
  const Window w({0}, {2 * kPi});
  double prev = volume(w);
  for (double K : {1.0, 10.0, 100.0, 1000.0}) {
    const double lam = expected_count_riemann(f, w, K, 0.5, 100000);
    CHECK(lam <= prev);
    CHECK(lam <= volume(w));
    CHECK(lam >= volume(w) * std::exp(-K * 1.0));
    prev = lam;
  }
  const TargetFunction g = builtin("sincos2d");
  const Window w2 = Window::cube(2, -2, 2);
  double sup = 0;
  const std::uint64_t L = 400;
  for (std::uint64_t i = 0; i < L; ++i) {
    for (std::uint64_t j = 0; j < L; ++j) {
      sup = std::max(sup, magnitude(g, Point{-2 + 4 * (i + 0.5) / L, -2 + 4 * (j + 0.5) / L}));
    }
  }
  for (double K : {0.5, 2.0, 8.0}) {
    const double lam = expected_count_riemann(g, w2, K, 1.0, L);
    CHECK(lam <= volume(w2));
    CHECK(lam >= volume(w2) * std::exp(-K * sup));
  }
}

TEST_CASE("property: accepted count matches the gated intensity measure") {
  const TargetFunction f = builtin("cos");
  const Window w({0}, {2 * kPi});
  PpzConfig cfg;
  cfg.K = 10;
  cfg.Q = 0.5;
  cfg.N = 1000;
  cfg.tol = 0.1;
  const double mean = cfg.N * expected_count_riemann(f, w, cfg.K, cfg.Q, 1000000, cfg.tol);
  const int reps = 400;
  double total = 0;
  Rng root(77);
  for (int i = 0; i < reps; ++i) {
    Rng rng = root.fork(static_cast<std::uint64_t>(i));
    total += static_cast<double>(realize(f, w, cfg, rng).accepted);
  }
  const double emp = total / reps;
  CHECK(std::fabs(emp - mean) <= 3 * std::sqrt(mean / reps));
}

TEST_CASE("expected count override") {
  PpzConfig cfg;
  Rng rng(1);
  const Realization r =
      realize(constant(0.0), Window({0}, {1}), cfg, rng, {.expected_count = 5.0, .keep_rejected = true});
  CHECK(r.drawn < 40);
  CHECK(r.accepted == r.drawn);
}

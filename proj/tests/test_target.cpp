#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ppz/builtins.hpp"
#include "ppz/core.hpp"
#include "ppz/sampling.hpp"
#include "ppz/target.hpp"

using namespace ppz;

namespace {

TargetFunction cos_target() {
  return TargetFunction::real_scalar(1, [](const Point& x) { return std::cos(x[0]); }, "cos");
}

}  // namespace

TEST_CASE("magnitude examples") {
  CHECK(magnitude(cos_target(), Point{std::numbers::pi / 2}) < 1e-15);

  const TargetFunction p = TargetFunction::complex([](std::complex<double> s) {
    using C = std::complex<double>;
    const C a = s - C(0.5, -1.0);
    const C b = s - C(1.0, 0.5);
    return a * a * b * b * b;
  });
  CHECK(magnitude(p, Point{1.0, 0.5}) == 0.0);
  CHECK(p.dim() == 2);
  CHECK(p.kind() == TargetKind::complex);

  const TargetFunction v = TargetFunction::real_vector(
      2, 2, [](const Point& x) { return std::vector<double>{x[0] - 1, x[1] + 2}; });
  CHECK(magnitude(v, Point{0, 0}) == 3.0);
  CHECK(v.components() == 2);
}

TEST_CASE("non-finite evaluations raise with the point") {
  const TargetFunction f = TargetFunction::real_scalar(1, [](const Point& x) { return 1.0 / x[0]; });
  try {
    magnitude(f, Point{0.0});
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(e.point() == Point{0.0});
  }
  const TargetFunction nanf =
      TargetFunction::real_scalar(1, [](const Point&) { return std::numeric_limits<double>::quiet_NaN(); });
  CHECK_THROWS_AS(magnitude(nanf, Point{1.0}), EvaluationError);
  CHECK_THROWS_AS(fd_partial(f, Point{0.0}, 0, 1e-6), EvaluationError);
}

TEST_CASE("kind-specific evaluators reject the wrong kind") {
  CHECK_THROWS(cos_target().eval_complex(Point{0, 0}));
  CHECK_THROWS(builtin("eta").eval_real(Point{0.5, 14}));
}

TEST_CASE("fd_partial examples") {
  const TargetFunction sq = TargetFunction::real_scalar(1, [](const Point& x) { return x[0] * x[0]; });
  const double d = fd_partial(sq, Point{1.0}, 0, 1e-6);
  CHECK(std::fabs(d - 2.000001) <= 1e-9);

  const TargetFunction c = TargetFunction::real_scalar(2, [](const Point&) { return 4.2; });
  for (double eps : {1e-1, 1e-6, 1e-9}) {
    CHECK(fd_partial(c, Point{0.3, -2}, 0, eps) == 0.0);
    CHECK(fd_partial(c, Point{0.3, -2}, 1, eps) == 0.0);
  }

  const double dc = fd_partial(cos_target(), Point{0.0}, 0, 1e-6);
  CHECK(std::fabs(dc - (-5e-7)) <= 1e-10);

  const double central = fd_partial(sq, Point{1.0}, 0, 1e-3, DifferenceScheme::central);
  CHECK(std::fabs(central - 2.0) <= 1e-10);
}

TEST_CASE("property: forward difference error decays linearly for a polynomial") {
  // f = x1^3 - 2 x1 x2 + x2^2, d/dx1 at (0.7, -0.4) is 3 x1^2 - 2 x2.
  const TargetFunction f = TargetFunction::real_scalar(
      2, [](const Point& x) { return x[0] * x[0] * x[0] - 2 * x[0] * x[1] + x[1] * x[1]; });
  const Point x{0.7, -0.4};
  const double exact = 3 * 0.49 + 0.8;
  double prev = 0;
  for (double eps : {1e-3, 1e-4, 1e-5}) {
    const double err = std::fabs(fd_partial(f, x, 0, eps) - exact);
    // second derivative 6 x1 bounds the error by 3 x1 eps + O(eps^2)
    CHECK(err <= (3 * 0.7 + 1e-2) * eps);
    if (prev > 0) {
      const double ratio = prev / err;
      CHECK(ratio > 8.0);
      CHECK(ratio < 12.0);
    }
    prev = err;
  }
}

TEST_CASE("fd_gradient_target") {
  const TargetFunction g = fd_gradient_target(cos_target());
  CHECK(g.kind() == TargetKind::real_vector);
  CHECK(g.components() == 1);
  for (int k = -4; k <= 4; ++k) CHECK(magnitude(g, Point{k * std::numbers::pi}) < 1e-6);
  CHECK(magnitude(g, Point{std::numbers::pi / 2}) > 0.99);

  const TargetFunction gauss = builtin("gauss", 3);
  CHECK(magnitude(fd_gradient_target(gauss), Point{1, 1, 1}) < 1e-5);

  const TargetFunction lin = TargetFunction::real_scalar(1, [](const Point& x) { return 3 * x[0] - 1; });
  const TargetFunction gl = fd_gradient_target(lin);
  for (double x : {-10.0, 0.0, 0.25, 7.0}) CHECK(std::fabs(magnitude(gl, Point{x}) - 3.0) < 1e-6);

  CHECK_THROWS_AS(fd_gradient_target(builtin("eta")), std::invalid_argument);
  CHECK_THROWS_AS(fd_gradient_target(cos_target(), 0.0), std::invalid_argument);
}

TEST_CASE("constrain examples") {
  const TargetFunction zero2 = TargetFunction::real_scalar(2, [](const Point&) { return 0.0; });
  const TargetFunction c = constrain(zero2, [](const Point& x) { return x[0] + x[1] >= 1; });
  CHECK_FALSE(c.feasible(Point{0, 0}));
  CHECK(intensity(c, Point{0, 0}, 10, 0.5) == 0.0);
  CHECK(intensity(c, Point{1, 1}, 10, 0.5) == 1.0);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) CHECK_FALSE(retain(rng.uniform(), std::numeric_limits<double>::infinity(), 10, 0.5, 0.1));

  // Identity constraint: the same realization as the bare target.
  const TargetFunction f = cos_target();
  const TargetFunction all = constrain(f, [](const Point&) { return true; });
  PpzConfig cfg;
  Rng r1(3), r2(3);
  const Window w({-15}, {15});
  const Realization a = realize(f, w, cfg, r1);
  const Realization b = realize(all, w, cfg, r2);
  CHECK(a.candidates == b.candidates);

  // Only positive zeros of cos survive C = {x > 0}.
  const TargetFunction pos = constrain(f, [](const Point& x) { return x[0] > 0; });
  int reachable = 0;
  for (int k = -10; k <= 9; ++k) {
    const double z = (2 * k + 1) * std::numbers::pi / 2;
    if (z > -15 && z < 15 && intensity(pos, Point{z}, 10, 0.5) > 0.99) ++reachable;
  }
  CHECK(reachable == 5);
}

TEST_CASE("property: constrain keeps magnitudes; magnitude is nonnegative") {
  const TargetFunction f = builtin("sincos2d");
  const TargetFunction c = constrain(f, [](const Point& x) { return x[0] > x[1]; });
  Rng rng(8);
  for (int i = 0; i < 2000; ++i) {
    const Point x{-5 + 10 * rng.uniform(), -5 + 10 * rng.uniform()};
    const double m = magnitude(f, x);
    CHECK(m >= 0.0);
    CHECK(magnitude(c, x) == m);
    if (c.feasible(x)) {
      CHECK(intensity(c, x, 10, 0.5) == intensity(f, x, 10, 0.5));
    } else {
      CHECK(intensity(c, x, 10, 0.5) == 0.0);
    }
  }
  // Constructed roots of a vector target: every component vanishes.
  const TargetFunction v = TargetFunction::real_vector(
      2, 3, [](const Point& x) { return std::vector<double>{x[0] - 0.25, x[1] + 0.5, x[0] * x[1] + 0.125}; });
  CHECK(magnitude(v, Point{0.25, -0.5}) == 0.0);
  for (double c0 : v.eval_vector(Point{0.25, -0.5})) CHECK(c0 == 0.0);
}

TEST_CASE("with_constraint combines by AND") {
  const TargetFunction f = cos_target()
                               .with_constraint([](const Point& x) { return x[0] > 0; })
                               .with_constraint([](const Point& x) { return x[0] < 1; });
  CHECK(f.constrained());
  CHECK(f.feasible(Point{0.5}));
  CHECK_FALSE(f.feasible(Point{-0.5}));
  CHECK_FALSE(f.feasible(Point{1.5}));
}

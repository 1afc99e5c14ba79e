#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ppz/sampling.hpp"

using namespace ppz;

namespace {

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("poisson_count: degenerate and invalid means") {
  Rng rng(1);
  CHECK(poisson_count(rng, 0.0) == 0);
  CHECK_THROWS_AS(poisson_count(rng, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(poisson_count(rng, std::numeric_limits<double>::infinity()), std::invalid_argument);
  CHECK_THROWS_AS(poisson_count(rng, std::nan("")), std::invalid_argument);
}

TEST_CASE("poisson_count: mean 30000 moment oracle") {
  Rng rng(2024, 3);
  const int draws = 10000;
  double sum = 0;
  for (int i = 0; i < draws; ++i) sum += static_cast<double>(poisson_count(rng, 30000.0));
  const double mean = sum / draws;
  CHECK(std::fabs(mean - 30000.0) <= 3.0 * std::sqrt(30000.0 / draws));
}

TEST_CASE("poisson_count: mean 5 variance oracle") {
  Rng rng(7, 1);
  const int draws = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < draws; ++i) {
    const double k = static_cast<double>(poisson_count(rng, 5.0));
    s += k;
    s2 += k * k;
  }
  const double mean = s / draws;
  const double var = (s2 - draws * mean * mean) / (draws - 1);
  CHECK(std::fabs(var - 5.0) <= 0.05 * 5.0);
  CHECK(std::fabs(mean - 5.0) <= 3.0 * std::sqrt(5.0 / draws));
}

TEST_CASE("poisson_count: both regimes around the switch point") {
  for (double mean : {0.3, 9.5, 10.0, 12.0, 150.0}) {
    Rng rng(99, static_cast<std::uint64_t>(mean * 10));
    const int draws = 50000;
    double s = 0, s2 = 0;
    for (int i = 0; i < draws; ++i) {
      const double k = static_cast<double>(poisson_count(rng, mean));
      s += k;
      s2 += k * k;
    }
    const double m = s / draws;
    const double var = (s2 - draws * m * m) / (draws - 1);
    CHECK(std::fabs(m - mean) <= 4.0 * std::sqrt(mean / draws));
    CHECK(std::fabs(var - mean) <= 0.05 * mean);
  }
}

TEST_CASE("uniform_in: empty, deciles, CLT oracle") {
  Rng rng(5);
  CHECK(uniform_in(rng, Window({0}, {1}), 0).points.empty());
  CHECK(uniform_in(rng, Window({0}, {0}), 0).points.empty());
  CHECK_THROWS_AS(uniform_in(rng, Window({0}, {0}), 3), std::invalid_argument);

  const PointPattern pp = uniform_in(rng, Window({0}, {1}), 100000);
  REQUIRE(pp.points.size() == 100000);
  std::vector<int> deciles(10, 0);
  for (const auto& p : pp.points) deciles[std::min(9, static_cast<int>(p[0] * 10))]++;
  const double band = 3.0 * std::sqrt(1e5 * 0.1 * 0.9);
  for (int d : deciles) CHECK(std::fabs(d - 1e4) <= band);

  const PointPattern sq = uniform_in(rng, Window::cube(2, 0, 2), 40000);
  double mx = 0;
  for (const auto& p : sq.points) mx += p[0];
  mx /= 40000.0;
  CHECK(std::fabs(mx - 1.0) <= 3.0 * (2.0 / std::sqrt(12.0)) / 200.0);
}

TEST_CASE("sample_hppp: count and placement") {
  Rng rng(1, 2);
  const Window w({-15}, {15});
  double total = 0;
  const int reps = 200;
  for (int i = 0; i < reps; ++i) {
    const PointPattern pp = sample_hppp(rng, w, 1000.0);
    total += static_cast<double>(pp.points.size());
    for (const auto& p : pp.points) REQUIRE(contains(w, p));
    CHECK(pp.window == w);
  }
  CHECK(std::fabs(total / reps - 30000.0) <= 3.0 * std::sqrt(30000.0 / reps));

  CHECK(sample_hppp(rng, Window({0}, {0}), 1000.0).points.empty());
  int nonempty = 0;
  for (int i = 0; i < 1000; ++i) nonempty += !sample_hppp(rng, Window({0}, {1}), 1e-9).points.empty();
  CHECK(nonempty == 0);
}

TEST_CASE("property: patterns lie in their window") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const std::size_t dim = 1 + t % 5;
    std::vector<double> lo(dim), hi(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      lo[i] = -5 + 10 * rng.uniform();
      hi[i] = lo[i] + 1e-6 + 3 * rng.uniform();
    }
    const Window w(lo, hi);
    const PointPattern pp = sample_poisson_pattern(rng, w, 50.0);
    for (const auto& p : pp.points) REQUIRE(contains(w, p));
  }
}

TEST_CASE("property: determinism of (seed, stream)") {
  Rng a(42, 7), b(42, 7);
  const Window w = Window::cube(3, -1, 1);
  const PointPattern pa = sample_hppp(a, w, 500.0);
  const PointPattern pb = sample_hppp(b, w, 500.0);
  CHECK(pa.points == pb.points);
  CHECK(a.next() == b.next());

  const std::uint64_t path[] = {3, 1, 4};
  Rng fa = Rng(9).fork_path(path);
  Rng fb = Rng(9).fork_path(path);
  for (int i = 0; i < 100; ++i) REQUIRE(fa.next() == fb.next());

  // Forks depend on identity, not position.
  Rng p(9);
  Rng before = p.fork(5);
  for (int i = 0; i < 10; ++i) p.next();
  Rng after = p.fork(5);
  CHECK(before.next() == after.next());
  CHECK(Rng(9).fork(5).next() != Rng(9).fork(6).next());
}

TEST_CASE("property: distinct streams are uncorrelated") {
  const std::size_t n = 100000;
  Rng s1(1234, 1), s2(1234, 2);
  Rng f1 = Rng(1234).fork(1), f2 = Rng(1234).fork(2);
  std::vector<double> a(n + 1), b(n + 1), c(n + 1), d(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    a[i] = s1.uniform();
    b[i] = s2.uniform();
    c[i] = f1.uniform();
    d[i] = f2.uniform();
  }
  auto lag = [&](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> x0(x.begin(), x.begin() + n), y1(y.begin() + 1, y.end());
    return correlation(x0, y1);
  };
  auto same = [&](const std::vector<double>& x, const std::vector<double>& y) {
    return correlation(std::vector<double>(x.begin(), x.begin() + n), std::vector<double>(y.begin(), y.begin() + n));
  };
  CHECK(std::fabs(lag(a, b)) < 0.01);
  CHECK(std::fabs(lag(b, a)) < 0.01);
  CHECK(std::fabs(same(a, b)) < 0.01);
  CHECK(std::fabs(lag(c, d)) < 0.01);
  CHECK(std::fabs(same(c, d)) < 0.01);
  CHECK(std::fabs(lag(a, a)) < 0.01);
}

TEST_CASE("uniform draws stay in range; gamma moments") {
  Rng rng(17);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double v = rng.uniform_open();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
  }
  const int draws = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < draws; ++i) {
    const double g = rng.gamma(5.0, 2.0);
    s += g;
    s2 += g * g;
  }
  const double mean = s / draws;
  const double var = s2 / draws - mean * mean;
  CHECK(std::fabs(mean - 2.5) <= 4.0 * std::sqrt(1.25 / draws));
  CHECK(std::fabs(var - 1.25) <= 0.03 * 1.25);
  double sn = 0;
  for (int i = 0; i < draws; ++i) sn += rng.gamma(0.5, 1.0);
  CHECK(std::fabs(sn / draws - 0.5) <= 4.0 * std::sqrt(0.5 / draws));
}

#include "ppz/repro.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ppz/builtins.hpp"
#include "ppz/core.hpp"
#include "ppz/cox.hpp"
#include "ppz/parallel.hpp"

namespace ppz {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

struct RunSpec {
  std::string command = "zeros";
  std::string function;
  bool builtin = true;
  Window window;
  AdaptiveConfig config;
  std::optional<std::size_t> eta_terms;
};

AdaptiveConfig make_config(double K, double Q, double N, double r_frac, int iters, std::uint64_t seed,
                           std::optional<double> child_n = std::nullopt) {
  AdaptiveConfig c;
  c.base.K = K;
  c.base.Q = Q;
  c.base.N = N;
  c.base.seed = seed;
  c.r_frac = r_frac;
  c.iters = iters;
  c.child_n = child_n;
  return c;
}

RunRecord execute(CaseRun& run, const TargetFunction& f, RunSpec spec) {
  spec.config.threads = run.threads();
  spec.config.deadline = run.deadline();
  RunRecord r;
  r.command = spec.command;
  r.function = spec.function;
  r.builtin = spec.builtin;
  r.kind = f.kind();
  r.window = spec.window;
  r.config = spec.config;
  r.eta_terms = spec.eta_terms;
  if (spec.command == "extrema") {
    r.eps = 1e-6;
    r.scheme = DifferenceScheme::forward;
    r.result = find_extrema(f, spec.window, spec.config, *r.eps, *r.scheme);
  } else {
    r.result = run_adaptive(f, spec.window, spec.config);
  }
  r.config.deadline.reset();
  run.record(r);
  return r;
}

RunRecord run_builtin(CaseRun& run, const std::string& name, const Window& w, const AdaptiveConfig& cfg,
                      const std::string& command = "zeros") {
  RunSpec s;
  s.command = command;
  s.function = name;
  s.window = w;
  s.config = cfg;
  return execute(run, builtin(name, w.dim()), s);
}

double dist_max(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

// Distance from each target to the closest located zero.
std::vector<double> coverage(const std::vector<Zero>& zeros, const std::vector<Point>& targets) {
  std::vector<double> out;
  for (const auto& t : targets) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& z : zeros) best = std::min(best, dist_max(z.location, t));
    out.push_back(best);
  }
  return out;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

double max_magnitude(const std::vector<Zero>& zeros) {
  double m = 0.0;
  for (const auto& z : zeros) m = std::max(m, z.magnitude);
  return m;
}

double cos_zero_error(double x) {
  const double k = std::round((x - kPi / 2) / kPi);
  return std::fabs(x - (kPi / 2 + k * kPi));
}

double max_cos_zero_error(const std::vector<Zero>& zeros) {
  double m = 0.0;
  for (const auto& z : zeros) m = std::max(m, cos_zero_error(z.location[0]));
  return m;
}

void check_count(CaseRun& run, std::size_t got, std::size_t want) {
  run.check("count == " + std::to_string(want), got == want, "found " + std::to_string(got));
}

void check_runtime(CaseRun& run, double seconds, double limit) {
  run.check("runtime < " + fmt("%g", limit) + " s", seconds < limit, fmt("%.2f s", seconds));
}

double sincos_g(double x) { return std::sin(x / 20.0) + std::cos(x) * std::cos(x); }

// ---- cases ----

void cos_zeros(CaseRun& run) {
  const auto t0 = Clock::now();
  const RunRecord r = run_builtin(run, "cos", Window::parse("-15:15"), make_config(10, 0.5, 1000, 0.01, 10, 1));
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const auto& zs = r.result.zeros;
  check_count(run, zs.size(), 10);
  const double err = max_cos_zero_error(zs);
  run.check("each zero within 1e-6 of an odd multiple of pi/2", !zs.empty() && err <= 1e-6, "max error " + sci(err));
  const double mag = max_magnitude(zs);
  run.check("each |f| < 1e-9", !zs.empty() && mag < 1e-9, "max |f| " + sci(mag));
  check_runtime(run, secs, 30.0);
  const auto& snaps = r.result.snapshots;
  if (snaps.size() >= 10 && !snaps[0].empty() && !snaps[4].empty() && !snaps[9].empty()) {
    const double e1 = max_cos_zero_error(snaps[0]);
    const double e5 = max_cos_zero_error(snaps[4]);
    const double e10 = max_cos_zero_error(snaps[9]);
    run.check("snapshot error depth 1 > depth 5 > depth 10", e1 > e5 && e5 > e10,
              sci(e1) + " > " + sci(e5) + " > " + sci(e10));
  } else {
    run.check("snapshot error depth 1 > depth 5 > depth 10", false,
              "only " + std::to_string(snaps.size()) + " snapshots");
  }
}

void cos_extrema(CaseRun& run) {
  const RunRecord r =
      run_builtin(run, "cos", Window::parse("-15:15"), make_config(10, 0.5, 1000, 0.01, 5, 1), "extrema");
  const auto& rep = r.result;
  check_count(run, rep.zeros.size(), 9);
  if (!rep.global_max || !rep.global_min) {
    run.check("global max and min located", false);
    return;
  }
  const double vmax = *rep.zeros[*rep.global_max].value;
  const double vmin = *rep.zeros[*rep.global_min].value;
  run.check("max value within 1e-6 of 1", std::fabs(vmax - 1.0) <= 1e-6, "max " + fmt("%.12f", vmax));
  run.check("min value within 1e-6 of -1", std::fabs(vmin + 1.0) <= 1e-6, "min " + fmt("%.12f", vmin));
  double err = 0.0;
  for (const auto& z : rep.zeros) {
    const double x = z.location[0];
    err = std::max(err, std::fabs(x - std::round(x / kPi) * kPi));
  }
  run.check("locations within 1e-4 of multiples of pi", err <= 1e-4, "max error " + sci(err));
}

void sincos_zeros(CaseRun& run) {
  const RunRecord r = run_builtin(run, "sincos", Window::parse("-15:15"), make_config(10, 0.5, 1000, 0.01, 10, 1));
  const auto& zs = r.result.zeros;
  check_count(run, zs.size(), 9);
  const double mag = max_magnitude(zs);
  run.check("each |f| < 1e-9", !zs.empty() && mag < 1e-9, "max |f| " + sci(mag));
  std::vector<Point> truth;
  for (double x : repro_detail::bracket_roots(sincos_g, -15, 15, 300000)) truth.push_back(Point{x});
  const double cov = max_of(coverage(zs, truth));
  run.check("every bracketed zero located within 1e-6", truth.size() == 9 && cov <= 1e-6,
            std::to_string(truth.size()) + " bracketed, max distance " + sci(cov));
}

void sincos_extrema(CaseRun& run) {
  const RunRecord r =
      run_builtin(run, "sincos", Window::parse("-15:15"), make_config(10, 0.5, 1000, 0.01, 5, 1), "extrema");
  const auto& rep = r.result;
  check_count(run, rep.zeros.size(), 19);
  if (!rep.global_max || !rep.global_min) {
    run.check("global max and min located", false);
    return;
  }
  const Zero& mx = rep.zeros[*rep.global_max];
  const Zero& mn = rep.zeros[*rep.global_min];
  run.check("global max 1.588194 (1e-3) at 12.58658 (1e-2)",
            std::fabs(*mx.value - 1.588194) <= 1e-3 && std::fabs(mx.location[0] - 12.58658) <= 1e-2,
            "max " + fmt("%.9f", *mx.value) + " at " + fmt("%.6f", mx.location[0]));
  run.check("global min -0.6498092 (1e-3) at -14.15617 (1e-2)",
            std::fabs(*mn.value + 0.6498092) <= 1e-3 && std::fabs(mn.location[0] + 14.15617) <= 1e-2,
            "min " + fmt("%.9f", *mn.value) + " at " + fmt("%.6f", mn.location[0]));
}

void sum_sq(CaseRun& run, std::size_t p) {
  const double Q = p >= 4 ? 1.0 : 0.5;
  const Window w = Window::cube(p, -1.0, 1.0);
  const RunRecord r = run_builtin(run, "sum-sq(" + std::to_string(p) + ")", w, make_config(10, Q, 10000, 0.16, 10, 1));
  const auto& zs = r.result.zeros;
  check_count(run, zs.size(), 1);
  if (zs.empty()) return;
  const double err = dist_max(zs.front().location, Point(std::vector<double>(p, 0.1)));
  run.check("zero within 1e-3 of 0.1 per coordinate", err <= 1e-3, "max error " + sci(err));
  run.check("magnitude < 1e-8", zs.front().magnitude < 1e-8, "|f| " + sci(zs.front().magnitude));
}

void sum_sq_p10(CaseRun& run) {
  AdaptiveConfig cfg = make_config(10, 1.0, 10000, 0.16, 5, 1);
  cfg.tol_end = 1e-4;
  const RunRecord r = run_builtin(run, "sum-sq(10)", Window::cube(10, -1.0, 1.0), cfg);
  const auto& zs = r.result.zeros;
  check_count(run, zs.size(), 1);
  if (zs.empty()) return;
  const double err = dist_max(zs.front().location, Point(std::vector<double>(10, 0.1)));
  run.check("zero within 1e-2 of 0.1 per coordinate", err <= 1e-2, "max error " + sci(err));
  run.check("magnitude < 1e-4", zs.front().magnitude < 1e-4, "|f| " + sci(zs.front().magnitude));
}

void gauss(CaseRun& run, std::size_t p) {
  const Window w = Window::cube(p, 0.0, 2.0);
  const RunRecord r = run_builtin(run, "gauss(" + std::to_string(p) + ")", w, make_config(10, 1.0, 10000, 0.04, 5, 1),
                                  "extrema");
  const auto& rep = r.result;
  check_count(run, rep.zeros.size(), 1);
  if (!rep.global_max) return;
  const Zero& z = rep.zeros[*rep.global_max];
  const double err = dist_max(z.location, Point(std::vector<double>(p, 1.0)));
  run.check("maximum within 1e-3 of the unit vector", err <= 1e-3, "max error " + sci(err));
  run.check("value within 1e-5 of 1", std::fabs(*z.value - 1.0) <= 1e-5, "f " + fmt("%.12f", *z.value));
}

void complex_multiplicity(CaseRun& run) {
  const std::vector<Root> roots = {{{0.5, -1.0}, 2}, {{1.0, 0.5}, 3}};
  RunSpec s;
  s.function = "(s-(0.5-1i))^2*(s-(1+0.5i))^3";
  s.builtin = false;
  s.window = Window::parse("-2:2,-2:2");
  s.config = make_config(15, 2, 1000, 0.05, 10, 1);
  const RunRecord r = execute(run, poly_from_roots(roots), s);
  const auto d = coverage(r.result.zeros, {Point{0.5, -1.0}, Point{1.0, 0.5}});
  run.check("0.5-1i recovered within 1e-4", d[0] <= 1e-4, "distance " + sci(d[0]));
  run.check("1+0.5i recovered within 1e-4", d[1] <= 1e-4,
            "distance " + sci(d[1]) + ", " + std::to_string(r.result.zeros.size()) + " zeros reported");
}

void random_poly(CaseRun& run) {
  const auto rs = repro_detail::random_roots(7);
  std::vector<Root> roots;
  std::vector<Point> truth;
  std::ostringstream text;
  for (std::size_t k = 0; k < rs.size(); ++k) {
    roots.push_back({rs[k], 1});
    truth.push_back(Point{rs[k].real(), rs[k].imag()});
    text << (k ? "*" : "") << "(s-(" << format_double(rs[k].real()) << (rs[k].imag() < 0 ? "" : "+")
         << format_double(rs[k].imag()) << "i))";
  }
  RunSpec s;
  s.function = text.str();
  s.builtin = false;
  s.window = Window::parse("-1:1,-1:1");
  s.config = make_config(10, 2, 10000, 0.05, 4, 1);
  const RunRecord r = execute(run, poly_from_roots(roots), s);
  const auto d = coverage(r.result.zeros, truth);
  const auto hit = std::count_if(d.begin(), d.end(), [](double x) { return x <= 1e-2; });
  run.check(">= 9 of 10 roots within 1e-2", hit >= 9,
            std::to_string(hit) + " of 10 recovered, " + std::to_string(r.result.zeros.size()) + " zeros reported");
}

const std::vector<Point> kEtaZeros = {Point{0.5, 14.1347}, Point{0.5, 21.0220}, Point{1.0, 18.1302}};

RunRecord eta_run(CaseRun& run, std::uint64_t seed) {
  RunSpec s;
  s.function = "eta";
  s.window = Window::parse("0:1.3,13:22");
  s.config = make_config(15, 2, 1000, 0.05, 2, seed, 1000.0);
  s.eta_terms = kDefaultEtaTerms;
  return execute(run, builtin("eta", 2, kDefaultEtaTerms), s);
}

bool eta_covered(const ZeroReport& rep, std::string* detail) {
  const auto d = coverage(rep.zeros, kEtaZeros);
  if (detail) {
    *detail = "distances " + sci(d[0]) + ", " + sci(d[1]) + ", " + sci(d[2]) + "; " +
              std::to_string(rep.zeros.size()) + " zeros reported";
  }
  return max_of(d) <= 2e-2;
}

void eta_strip(CaseRun& run) {
  const auto t0 = Clock::now();
  const RunRecord r = eta_run(run, 1);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::string detail;
  const bool covered = eta_covered(r.result, &detail);
  run.check("zeros near 0.5+14.1347i, 0.5+21.0220i, 1+18.1302i within 2e-2", covered, detail);
  check_runtime(run, secs, 900.0);
  const double e1 = eta_partial({1.0, 0.0}).real();
  run.check("eta partial sum at s=1 within 5e-5 of ln 2", std::fabs(e1 - std::numbers::ln2) <= 5e-5,
            "delta " + sci(e1 - std::numbers::ln2));
  const double z2 = zeta_from_eta({2.0, 0.0}).real();
  run.check("zeta(2) within 1e-7 of pi^2/6", std::fabs(z2 - kPi * kPi / 6) <= 1e-7, "delta " + sci(z2 - kPi * kPi / 6));
}

void robustness(CaseRun& run, const std::string& what, int passed, int total) {
  run.check(what + " passes on >= 95% of " + std::to_string(total) + " seeds", passed * 100 >= 95 * total,
            std::to_string(passed) + " of " + std::to_string(total));
}

void eta_seeds(CaseRun& run) {
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    if (eta_covered(eta_run(run, seed).result, nullptr)) ++passed;
  }
  robustness(run, "eta strip", passed, 20);
}

bool hard_poly_ok(const ZeroReport& rep, std::string* detail) {
  const auto d = coverage(rep.zeros, {Point{2.0}, Point{3.0}});
  bool ok = max_of(d) <= 1e-3 && (rep.zeros.size() == 2 || rep.zeros.size() == 3);
  if (ok && rep.zeros.size() == 3) {
    // The extra zero is the one farthest from both 2 and 3.
    double worst = 0.0;
    const Zero* extra = nullptr;
    for (const auto& z : rep.zeros) {
      const double dz = std::min(std::fabs(z.location[0] - 2.0), std::fabs(z.location[0] - 3.0));
      if (!extra || dz > worst) {
        worst = dz;
        extra = &z;
      }
    }
    ok = extra->magnitude < 1e-10;
  }
  if (detail) {
    *detail = std::to_string(rep.zeros.size()) + " zeros, distance to 2: " + sci(d[0]) + ", to 3: " + sci(d[1]);
  }
  return ok;
}

RunRecord hard_poly_run(CaseRun& run, std::uint64_t seed) {
  return run_builtin(run, "hard-poly", Window::parse("0:5"), make_config(10, 0.5, 1000, 0.01, 10, seed));
}

void hard_poly(CaseRun& run) {
  std::string detail;
  const bool ok = hard_poly_ok(hard_poly_run(run, 1).result, &detail);
  run.check("{2, 3} covered within 1e-3, at most one extra with |f| < 1e-10", ok, detail);
}

void hard_poly_seeds(CaseRun& run) {
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    if (hard_poly_ok(hard_poly_run(run, seed).result, nullptr)) ++passed;
  }
  robustness(run, "hard-poly", passed, 20);
}

void sincos2d_extrema(CaseRun& run) {
  const Window w = Window::parse("-5:5,-5:5");
  AdaptiveConfig cfg = make_config(10, 0.5, 10000, 0.02, 5, 1, 3000.0);
  // The last level needs about 30 growth steps where the tolerance
  // region is elongated along one axis.
  cfg.retry_cap = 40;
  const RunRecord r = run_builtin(run, "sincos2d", w, cfg, "extrema");
  // grad (g'(x) g(y), g(x) g'(y)) vanishes on crit x crit and zero x zero.
  auto dg = [](double x) { return (sincos_g(x + 1e-6) - sincos_g(x - 1e-6)) / 2e-6; };
  const auto crit = repro_detail::bracket_roots(dg, -5, 5, 100000);
  const auto zer = repro_detail::bracket_roots(sincos_g, -5, 5, 100000);
  std::vector<Point> truth;
  for (double a : crit)
    for (double b : crit) truth.push_back(Point{a, b});
  for (double a : zer)
    for (double b : zer) truth.push_back(Point{a, b});
  const auto d = coverage(r.result.zeros, truth);
  const auto hit = std::count_if(d.begin(), d.end(), [](double x) { return x <= 1e-2; });
  check_count(run, r.result.zeros.size(), truth.size());
  run.check("every oracle stationary point located within 1e-2", static_cast<std::size_t>(hit) == truth.size(),
            std::to_string(hit) + " of " + std::to_string(truth.size()));
}

void thinning(CaseRun& run) {
  const TargetFunction f = TargetFunction::real_scalar(1, [](const Point& x) { return x[0]; }, "x");
  PointPattern pattern{{Point{0.0}, Point{0.01}, Point{0.5}}, Window::parse("0:1")};
  PpzConfig cfg;
  cfg.K = 10;
  cfg.Q = 0.5;
  cfg.tol = 0.1;
  constexpr int kTrials = 10000;
  const Rng base(1, 0x544852);
  std::vector<int> hits(3, 0);
  for (int t = 0; t < kTrials; ++t) {
    Rng rng = base.fork(static_cast<std::uint64_t>(t));
    RealizeOptions opts;
    opts.keep_rejected = true;
    const Realization r = thin_pattern(f, pattern, cfg, rng, opts);
    for (std::size_t i = 0; i < 3; ++i) hits[i] += r.candidates[i].accepted ? 1 : 0;
  }
  const double want[] = {1.0, std::exp(-1.0), 0.0};
  const char* names[] = {"0", "0.01", "0.5"};
  std::ostringstream art;
  for (std::size_t i = 0; i < 3; ++i) {
    const double rate = static_cast<double>(hits[i]) / kTrials;
    const double sigma = std::sqrt(want[i] * (1 - want[i]) / kTrials);
    run.check(std::string("magnitude ") + names[i] + ": rate within 3 sigma of " + fmt("%.6f", want[i]),
              std::fabs(rate - want[i]) <= 3 * sigma, "rate " + fmt("%.4f", rate) + ", sigma " + sci(sigma));
    art << hits[i] << ' ';
  }
  run.artifact(art.str());
}

constexpr double kCosRiemannReference = 0.080555739472779234;  // L = 1e7

void intensity_measure(CaseRun& run) {
  const TargetFunction f = builtin("cos");
  const Window w({0.0}, {2 * kPi});
  const double riemann = expected_count_riemann(f, w, 10, 0.5, 1000000, std::nullopt, run.threads());
  Rng rng(1, 0x4d43);
  const McEstimate mc = expected_count_mc(f, w, 10, 0.5, 1000000, rng, run.threads());
  const double z = std::fabs(riemann - mc.estimate) / mc.std_error;
  run.check("Riemann and Monte Carlo agree within 4 standard errors", z <= 4.0,
            "Riemann " + fmt("%.10f", riemann) + ", MC " + fmt("%.10f", mc.estimate) + " +- " + sci(mc.std_error) +
                ", " + fmt("%.2f", z) + " SE");
  const double rel = std::fabs(riemann - kCosRiemannReference) / kCosRiemannReference;
  run.check("L = 1e6 within 1e-6 relative of the L = 1e7 reference", rel <= 1e-6, "relative " + sci(rel));
  std::vector<double> by_k;
  std::ostringstream detail;
  for (double K : {1.0, 10.0, 100.0, 1000.0}) {
    by_k.push_back(expected_count_riemann(f, w, K, 0.5, 1000000, std::nullopt, run.threads()));
    detail << (by_k.size() > 1 ? ", " : "") << fmt("%.6g", by_k.back());
  }
  bool mono = true;
  for (std::size_t i = 1; i < by_k.size(); ++i) mono = mono && by_k[i] <= by_k[i - 1];
  run.check("Lambda_K nonincreasing over K in {1, 10, 100, 1000}", mono, detail.str());
  run.artifact(format_double(riemann) + " " + format_double(mc.estimate) + " " + format_double(mc.std_error));
}

void cox_gamma_envelope(CaseRun& run) {
  const TargetFunction f = builtin("cos");
  const Window w = Window::parse("-10:10");
  std::vector<Point> grid = make_grid(w, 101);
  std::vector<std::size_t> zero_cols;
  for (int k = -4; k <= 3; ++k) {
    const double x = kPi / 2 + k * kPi;
    if (x < -10 || x > 10) continue;
    zero_cols.push_back(grid.size());
    grid.push_back(Point{x});
  }
  const GammaParams gp{5.0, 2.0};
  const double Q = 0.5;
  const IntensityDraws draws = random_intensity_draws(f, w, grid, Q, gp, 100000, 1, run.threads());
  const auto env = envelope(draws, 0.95);
  double worst = 0.0;
  std::vector<double> closed(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    closed[c] = mean_intensity_closed_form(magnitude(f, grid[c]), Q, gp);
    worst = std::max(worst, std::fabs(env[c].mean - closed[c]));
  }
  run.check("empirical mean within 1e-2 of the closed form at every grid point", worst <= 1e-2,
            "max deviation " + sci(worst) + " over " + std::to_string(grid.size()) + " points");
  bool exact = true;
  double off = 0.0;
  for (std::size_t c : zero_cols) {
    const auto& e = env[c];
    exact = exact && e.lower == 1.0 && e.mean == 1.0 && e.upper == 1.0;
    off = std::max({off, 1.0 - e.lower, 1.0 - e.mean, 1.0 - e.upper});
  }
  run.check("envelope equals {1} exactly at the zeros of cos", exact,
            "largest distance from 1 at the double nearest each zero: " + sci(off));
  run.artifact(envelope_csv(grid, env, closed, f.kind()));
}

std::vector<ReproCase> build_registry() {
  std::vector<ReproCase> cases;
  auto add = [&](std::string id, std::string desc, double budget, std::function<void(CaseRun&)> body,
                 bool optional = false) {
    cases.push_back({std::move(id), std::move(desc), optional, budget, std::move(body)});
  };
  add("cos-zeros-10it", "zeros of cos on [-15,15], 10 iterations", 30, cos_zeros);
  add("cos-extrema", "stationary points of cos on [-15,15]", 60, cos_extrema);
  add("sincos-zeros", "zeros of sin(x/20)+cos^2 x on [-15,15]", 60, sincos_zeros);
  add("sincos-extrema", "stationary points of sin(x/20)+cos^2 x on [-15,15]", 60, sincos_extrema);
  for (std::size_t p = 1; p <= 5; ++p) {
    add("sum-sq-p" + std::to_string(p), "zero of sum (x_i-0.1)^2 on [-1,1]^" + std::to_string(p), 120,
        [p](CaseRun& r) { sum_sq(r, p); });
  }
  add("sum-sq-p10", "zero of sum (x_i-0.1)^2 on [-1,1]^10, 5 iterations, tol 1e-4", 3600, sum_sq_p10, true);
  for (std::size_t p = 1; p <= 3; ++p) {
    add("gauss-p" + std::to_string(p), "maximum of exp(-|x-1|^2/2) on [0,2]^" + std::to_string(p), 120,
        [p](CaseRun& r) { gauss(r, p); });
  }
  add("complex-poly-multiplicity", "roots 0.5-1i (x2) and 1+0.5i (x3) on [-2,2]^2", 60, complex_multiplicity);
  add("random-poly-10", "ten seed-pinned random roots in [-1,1]^2", 300, random_poly);
  add("eta-strip", "eta zeros on 0<sigma<1.3, 13<t<22 with L=1e4", 900, eta_strip);
  add("eta-strip-20seeds", "eta strip over seeds 1..20", 18000, eta_seeds, true);
  add("hard-poly", "35(x-3)^5(x-2)^10 on [0,5]", 60, hard_poly);
  add("hard-poly-20seeds", "hard-poly over seeds 1..20", 600, hard_poly_seeds);
  add("sincos2d-extrema", "stationary points of the 2-D sin-cos product on [-5,5]^2", 600, sincos2d_extrema);
  add("thinning-acceptance", "acceptance rates at magnitudes 0, 0.01, 0.5", 60, thinning);
  add("intensity-measure", "Riemann vs Monte Carlo intensity measure of cos on [0,2pi]", 120, intensity_measure);
  add("cox-gamma-envelope", "Gamma(5,2) random intensity of cos on [-10,10], 1e5 draws", 300, cox_gamma_envelope);
  return cases;
}

std::string registry_list() {
  std::string s;
  for (const auto& c : repro_registry()) s += "\n  " + c.id;
  return s;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::timeout: return "timeout-fail";
    case Verdict::error: return "error";
  }
  return "?";
}

void CaseRun::check(std::string name, bool pass, std::string detail) {
  checks_.push_back({std::move(name), pass, std::move(detail)});
}

void CaseRun::record(const RunRecord& r) { artifacts_.push_back(without_timing(to_json(r))); }

void CaseRun::artifact(std::string text) { artifacts_.push_back(std::move(text)); }

const std::vector<ReproCase>& repro_registry() {
  static const std::vector<ReproCase> cases = build_registry();
  return cases;
}

const ReproCase& find_case(std::string_view id) {
  for (const auto& c : repro_registry()) {
    if (c.id == id) return c;
  }
  throw std::invalid_argument("unknown case '" + std::string(id) + "'; registered cases:" + registry_list());
}

CaseOutcome run_case(std::string_view id, const CaseContext& ctx) {
  const ReproCase& rc = find_case(id);
  CaseOutcome out;
  out.id = rc.id;
  const double budget = rc.budget_s * ctx.budget_scale;
  const auto t0 = Clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(budget));
  CaseRun run(ctx, deadline);
  try {
    rc.body(run);
    out.verdict = std::all_of(run.checks().begin(), run.checks().end(), [](const Check& c) { return c.pass; }) &&
                          !run.checks().empty()
                      ? Verdict::pass
                      : Verdict::fail;
  } catch (const BudgetExceeded& e) {
    out.verdict = Verdict::timeout;
    out.message = e.what();
  } catch (const std::exception& e) {
    out.verdict = Verdict::error;
    out.message = e.what();
  }
  out.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
  if (out.wall_time > budget && out.verdict != Verdict::error) {
    out.verdict = Verdict::timeout;
    out.message = "ran " + fmt("%.1f", out.wall_time) + " s, budget " + fmt("%.1f", budget) + " s";
  }
  out.checks = std::move(run.checks());
  out.artifacts = std::move(run.artifacts());
  return out;
}

std::vector<std::string> select_cases(std::string_view glob, bool include_optional) {
  const std::string pattern(glob);
  std::vector<std::string> ids;
  for (const auto& c : repro_registry()) {
    if (c.optional && !include_optional) continue;
    if (fnmatch(pattern.c_str(), c.id.c_str(), 0) == 0) ids.push_back(c.id);
  }
  return ids;
}

std::vector<CaseOutcome> run_all(const std::vector<std::string>& ids, const CaseContext& ctx, bool parallel) {
  for (const auto& id : ids) find_case(id);
  std::vector<CaseOutcome> out(ids.size());
  if (parallel) {
    CaseContext inner = ctx;
    inner.threads = 1;
    parallel_for(ids.size(), ctx.threads, [&](std::size_t i) { out[i] = run_case(ids[i], inner); });
  } else {
    for (std::size_t i = 0; i < ids.size(); ++i) out[i] = run_case(ids[i], ctx);
  }
  return out;
}

void print_summary(std::ostream& os, const std::vector<CaseOutcome>& outcomes) {
  std::size_t width = 4;
  for (const auto& o : outcomes) width = std::max(width, o.id.size());
  int failed = 0;
  for (const auto& o : outcomes) {
    os << o.id << std::string(width - o.id.size() + 2, ' ') << to_string(o.verdict) << "  "
       << fmt("%.2f s", o.wall_time) << '\n';
    for (const auto& c : o.checks) {
      os << "    [" << (c.pass ? "ok" : "FAIL") << "] " << c.name;
      if (!c.detail.empty()) os << " (" << c.detail << ')';
      os << '\n';
    }
    if (!o.message.empty()) os << "    " << o.message << '\n';
    if (o.verdict != Verdict::pass) ++failed;
  }
  os << outcomes.size() - failed << " of " << outcomes.size() << " cases passed\n";
}

std::string outcomes_json(const std::vector<CaseOutcome>& outcomes) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& o : outcomes) {
    nlohmann::ordered_json j;
    j["id"] = o.id;
    j["verdict"] = to_string(o.verdict);
    j["wall_time_s"] = o.wall_time;
    j["message"] = o.message;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : o.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = checks;
    arr.push_back(j);
  }
  return arr.dump(2);
}

namespace repro_detail {

std::vector<std::complex<double>> random_roots(std::uint64_t seed, std::size_t count) {
  Rng rng(seed, 99);
  std::vector<std::complex<double>> out;
  for (std::size_t k = 0; k < count; ++k) {
    const double a = -1.0 + 2.0 * rng.uniform();
    const double b = -1.0 + 2.0 * rng.uniform();
    out.emplace_back(a, b);
  }
  return out;
}

std::vector<double> bracket_roots(const std::function<double(double)>& g, double lo, double hi, std::size_t cells) {
  std::vector<double> roots;
  double a = lo;
  double ga = g(a);
  for (std::size_t i = 1; i <= cells; ++i) {
    const double b = i == cells ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
    const double gb = g(b);
    if (ga == 0.0) {
      roots.push_back(a);
    } else if (ga * gb < 0.0) {
      double l = a;
      double r = b;
      double gl = ga;
      for (int it = 0; it < 200 && r - l > 0.0; ++it) {
        const double m = 0.5 * (l + r);
        if (m <= l || m >= r) break;
        const double gm = g(m);
        if ((gm < 0.0) == (gl < 0.0)) {
          l = m;
          gl = gm;
        } else {
          r = m;
        }
      }
      roots.push_back(0.5 * (l + r));
    }
    a = b;
    ga = gb;
  }
  if (ga == 0.0) roots.push_back(a);
  return roots;
}

}  // namespace repro_detail

}  // namespace ppz

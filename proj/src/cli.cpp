#include "ppz/cli.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ppz/adaptive.hpp"
#include "ppz/builtins.hpp"
#include "ppz/core.hpp"
#include "ppz/cox.hpp"
#include "ppz/expr.hpp"
#include "ppz/repro.hpp"
#include "ppz/report.hpp"

namespace ppz {

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TargetOptions {
  std::string fn;
  std::string builtin_name;
  bool complex = false;
  std::optional<std::size_t> dim;
  std::string window;
  std::size_t eta_terms = kDefaultEtaTerms;
  std::string constraint;
  double K = 10.0;
  std::string Q = "auto";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
  std::string format = "json";
};

struct AdaptiveOptions {
  double N = 1000.0;
  double tol_start = 1e-1;
  double tol_end = 1e-10;
  int iters = 10;
  double r_frac = 0.01;
  double growth = 1.1;
  double n_growth = 1.1;
  int retry_cap = 25;
  std::size_t max_windows = 10000;
  std::optional<double> child_n;
  double dedup_radius = 1e-3;
  bool no_merge = false;
  bool diagnostics = false;
  double eps = 1e-6;
  bool central = false;
};

struct ExpectedOptions {
  std::uint64_t cells = 1000;
  std::uint64_t samples = 100000;
  double N = 1000.0;
  double tol = 1e-1;
};

struct CoxOptions {
  double shape = 5.0;
  double rate = 2.0;
  bool shape_scale = false;
  std::size_t draws = 1000;
  std::size_t grid = 201;
  double level = 0.95;
};

struct ReproOptions {
  std::vector<std::string> ids;
  bool all = false;
  std::string only;
  double budget_scale = 1.0;
  bool include_optional = false;
  bool list = false;
  bool parallel = false;
  unsigned threads = 0;
  std::string format = "text";
};

void add_target_options(CLI::App* app, TargetOptions& o) {
  app->add_option("--fn", o.fn, "Expression for f; ';' separates vector components");
  app->add_option("--builtin", o.builtin_name, "Named target: cos, sincos, hard-poly, sum-sq, gauss, sincos2d, eta, zeta");
  app->add_flag("--complex", o.complex, "Read --fn in the complex variable s (window sigma range, t range)");
  app->add_option("--dim", o.dim, "Dimension of the real variable (defaults to the window dimension)");
  app->add_option("--window", o.window, "Window lo1:hi1,lo2:hi2,...")->required();
  app->add_option("--eta-terms", o.eta_terms, "Series terms for eta and zeta")->check(CLI::PositiveNumber);
  app->add_option("--constraint", o.constraint, "Feasible set, e.g. \"x1 + x2 <= 1 && x1 > 0\"");
  app->add_option("--K", o.K, "Intensity scale K");
  app->add_option("--Q", o.Q, "Intensity exponent Q, or auto");
  app->add_option("--seed", o.seed, "Random seed");
  app->add_option("--threads", o.threads, "Worker threads, 0 = machine parallelism");
  app->add_option("--out", o.out, "Write the result to this file instead of stdout");
}

void add_adaptive_options(CLI::App* app, AdaptiveOptions& o) {
  app->add_option("--N", o.N, "Expected points per unit volume at the root, per refinement window below");
  app->add_option("--tol-start", o.tol_start, "Tolerance of the first iteration");
  app->add_option("--tol-end", o.tol_end, "Stop once the tolerance would drop below this");
  app->add_option("--iters", o.iters, "Maximum number of iterations");
  app->add_option("--r-frac", o.r_frac, "Child half-side as a fraction of the parent side");
  app->add_option("--growth", o.growth, "Window growth factor on a failed attempt");
  app->add_option("--n-growth", o.n_growth, "Point-count growth factor on a failed attempt");
  app->add_option("--retry-cap", o.retry_cap, "Failed attempts before a refinement window dies");
  app->add_option("--max-windows", o.max_windows, "Limit on live refinement windows per iteration");
  app->add_option("--child-n", o.child_n, "Expected points per refinement window (default: --N)");
  app->add_option("--dedup-radius", o.dedup_radius, "Global dedup radius as a fraction of the window side");
  app->add_flag("--no-plateau-merge", o.no_merge, "Keep zeros joined by a flat segment");
  app->add_flag("--diagnostics", o.diagnostics, "Keep rejected root candidates in the output");
}

double resolve_q(const std::string& q, TargetKind kind, std::size_t dim) {
  if (q == "auto") {
    if (kind == TargetKind::complex) return 2.0;
    return dim >= 4 ? 1.0 : 0.5;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(q, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != q.size()) throw UsageError("--Q must be a number or auto, got '" + q + "'");
  return v;
}

struct BuiltTarget {
  TargetFunction f;
  Window window;
  std::string text;
  bool builtin = false;
  std::optional<std::size_t> eta_terms;
};

BuiltTarget build_target(const TargetOptions& o) {
  if (o.fn.empty() == o.builtin_name.empty()) throw UsageError("give exactly one of --fn and --builtin");
  Window w = Window::parse(o.window);
  if (o.dim && *o.dim != w.dim()) {
    throw UsageError("--dim " + std::to_string(*o.dim) + " does not match the window dimension " +
                     std::to_string(w.dim()));
  }
  std::optional<TargetFunction> f;
  std::string text;
  bool is_builtin = false;
  std::optional<std::size_t> eta_terms;
  if (!o.builtin_name.empty()) {
    const std::size_t want = builtin_dim(o.builtin_name, o.dim.value_or(w.dim()));
    if (want != w.dim()) {
      throw UsageError("builtin " + o.builtin_name + " needs a " + std::to_string(want) + "-dimensional window, got " +
                       std::to_string(w.dim()));
    }
    f = builtin(o.builtin_name, w.dim(), o.eta_terms);
    if (o.complex && f->kind() != TargetKind::complex) {
      throw UsageError("--complex given but builtin " + o.builtin_name + " is real");
    }
    text = o.builtin_name;
    is_builtin = true;
    if (o.builtin_name.rfind("eta", 0) == 0 || o.builtin_name.rfind("zeta", 0) == 0) eta_terms = o.eta_terms;
  } else {
    if (o.complex && w.dim() != 2) throw UsageError("--complex needs a 2-dimensional window (sigma range, t range)");
    const expr::EvalMode mode = o.complex ? expr::EvalMode::complex() : expr::EvalMode::real(w.dim());
    f = expr::to_target(o.fn, mode);
    text = o.fn;
  }
  if (!o.constraint.empty()) f = f->with_constraint(expr::parse_constraint(o.constraint, w.dim()));
  return {*f, w, text, is_builtin, eta_terms};
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw UsageError("cannot open --out file '" + path + "'");
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

int run_search(const std::string& command, const TargetOptions& t, const AdaptiveOptions& a, std::ostream& out,
               std::ostream& err) {
  if (t.format != "json" && t.format != "csv") throw UsageError("--format must be json or csv");
  BuiltTarget bt = build_target(t);
  if (command == "extrema" && bt.f.kind() != TargetKind::real_scalar) {
    throw UsageError("extrema needs a real-scalar target");
  }
  AdaptiveConfig cfg;
  cfg.base.K = t.K;
  cfg.base.Q = resolve_q(t.Q, bt.f.kind(), bt.window.dim());
  cfg.base.N = a.N;
  cfg.base.seed = t.seed;
  cfg.tol_start = a.tol_start;
  cfg.tol_end = a.tol_end;
  cfg.iters = a.iters;
  cfg.r_frac = a.r_frac;
  cfg.growth = a.growth;
  cfg.n_growth = a.n_growth;
  cfg.retry_cap = a.retry_cap;
  cfg.max_windows = a.max_windows;
  cfg.child_n = a.child_n;
  cfg.dedup_radius = a.dedup_radius;
  cfg.merge_plateaus = !a.no_merge;
  cfg.diagnostics = a.diagnostics;
  cfg.threads = t.threads;
  validate(cfg);

  RunRecord r;
  r.command = command;
  r.function = bt.text;
  r.builtin = bt.builtin;
  r.kind = bt.f.kind();
  r.constraint = t.constraint;
  r.window = bt.window;
  r.config = cfg;
  r.eta_terms = bt.eta_terms;
  if (command == "extrema") {
    r.eps = a.eps;
    r.scheme = a.central ? DifferenceScheme::central : DifferenceScheme::forward;
    r.result = find_extrema(bt.f, bt.window, cfg, a.eps, *r.scheme);
  } else {
    r.result = run_adaptive(bt.f, bt.window, cfg);
  }
  Output o(t.out, out);
  o.stream() << (t.format == "csv" ? to_csv(r) : to_json(r) + "\n");
  if (r.result.zeros.empty()) {
    err << "no " << (command == "extrema" ? "stationary points" : "zeros") << " found\n";
    return kExitNoZeros;
  }
  return kExitOk;
}

int run_expected(const TargetOptions& t, const ExpectedOptions& e, std::ostream& out) {
  if (t.format != "json") throw UsageError("expected-count writes json only");
  BuiltTarget bt = build_target(t);
  const double Q = resolve_q(t.Q, bt.f.kind(), bt.window.dim());
  const double riemann = expected_count_riemann(bt.f, bt.window, t.K, Q, e.cells, std::nullopt, t.threads);
  const double gated = expected_count_riemann(bt.f, bt.window, t.K, Q, e.cells, e.tol, t.threads);
  Rng mc_rng(t.seed, 0x4d43);
  const McEstimate mc = expected_count_mc(bt.f, bt.window, t.K, Q, e.samples, mc_rng, t.threads);
  PpzConfig pc;
  pc.K = t.K;
  pc.Q = Q;
  pc.N = e.N;
  pc.tol = e.tol;
  pc.seed = t.seed;
  Rng rng(t.seed, 0);
  RealizeOptions opts;
  opts.threads = t.threads;
  const Realization real = realize(bt.f, bt.window, pc, rng, opts);

  nlohmann::ordered_json j;
  j["function"] = bt.text;
  j["window"] = {{"lo", bt.window.lo()}, {"hi", bt.window.hi()}};
  j["K"] = t.K;
  j["Q"] = Q;
  j["seed"] = t.seed;
  j["riemann"] = {{"cells_per_axis", e.cells}, {"value", riemann}, {"gated_value", gated}, {"tol", e.tol}};
  j["monte_carlo"] = {{"samples", e.samples}, {"estimate", mc.estimate}, {"std_error", mc.std_error}};
  j["accepted_count"] = {{"N", e.N}, {"tol", e.tol}, {"drawn", real.drawn}, {"accepted", real.accepted}};
  Output o(t.out, out);
  o.stream() << j.dump(2) << '\n';
  return kExitOk;
}

int run_cox(const TargetOptions& t, const CoxOptions& c, std::ostream& out) {
  if (t.format != "json" && t.format != "csv") throw UsageError("--format must be json or csv");
  BuiltTarget bt = build_target(t);
  const GammaParams gp = c.shape_scale ? gamma_from_shape_scale(c.shape, c.rate) : GammaParams{c.shape, c.rate};
  const double Q = resolve_q(t.Q, bt.f.kind(), bt.window.dim());
  const auto grid = make_grid(bt.window, c.grid);
  const IntensityDraws draws = random_intensity_draws(bt.f, bt.window, grid, Q, gp, c.draws, t.seed, t.threads);
  const auto env = envelope(draws, c.level);
  std::vector<double> closed(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    closed[i] = bt.f.feasible(grid[i]) ? mean_intensity_closed_form(magnitude(bt.f, grid[i]), Q, gp) : 0.0;
  }
  Output o(t.out, out);
  if (t.format == "csv") {
    o.stream() << envelope_csv(grid, env, closed, bt.f.kind());
    return kExitOk;
  }
  nlohmann::ordered_json j;
  j["function"] = bt.text;
  j["Q"] = Q;
  j["gamma"] = {{"shape", gp.shape}, {"rate", gp.rate}};
  j["draws"] = c.draws;
  j["level"] = c.level;
  j["seed"] = t.seed;
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    pts.push_back({{"x", grid[i].vec()},
                   {"lower", env[i].lower},
                   {"mean", env[i].mean},
                   {"upper", env[i].upper},
                   {"median", env[i].median},
                   {"closed_form_mean", closed[i]}});
  }
  j["points"] = pts;
  o.stream() << j.dump(2) << '\n';
  return kExitOk;
}

int run_repro(const ReproOptions& r, std::ostream& out, std::ostream& err) {
  if (r.format != "text" && r.format != "json") throw UsageError("--format must be text or json");
  if (r.list) {
    for (const auto& c : repro_registry()) {
      out << c.id << (c.optional ? " (optional)" : "") << "  " << c.description << '\n';
    }
    return kExitOk;
  }
  std::vector<std::string> ids;
  if (!r.ids.empty()) {
    if (r.all) throw UsageError("give case ids or --all, not both");
    for (const auto& id : r.ids) ids.push_back(find_case(id).id);
  } else if (r.all || !r.only.empty()) {
    ids = select_cases(r.only.empty() ? "*" : r.only, r.include_optional);
  } else {
    throw UsageError("give case ids, --all or --only GLOB (--list shows the registry)");
  }
  if (ids.empty()) throw UsageError("no registered case matches '" + r.only + "'");
  if (!(r.budget_scale > 0.0)) throw UsageError("--budget-scale must be positive");
  CaseContext ctx;
  ctx.threads = r.threads;
  ctx.budget_scale = r.budget_scale;
  const auto outcomes = run_all(ids, ctx, r.parallel);
  if (r.format == "json") {
    out << outcomes_json(outcomes) << '\n';
  } else {
    print_summary(out, outcomes);
  }
  for (const auto& o : outcomes) {
    if (o.verdict != Verdict::pass) {
      err << "case " << o.id << ": " << to_string(o.verdict) << '\n';
    }
  }
  for (const auto& o : outcomes) {
    if (o.verdict != Verdict::pass) return kExitNoZeros;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zeros and extrema of functions by thinning Poisson point processes"};
  app.name("ppz");
  app.require_subcommand(1);

  TargetOptions zt, et, ct, kt;
  AdaptiveOptions za, ea;
  ExpectedOptions eo;
  CoxOptions co;
  ReproOptions ro;

  auto* zeros = app.add_subcommand("zeros", "Locate zeros of f in a window");
  add_target_options(zeros, zt);
  add_adaptive_options(zeros, za);
  zeros->add_option("--format", zt.format, "json or csv");

  auto* extrema = app.add_subcommand("extrema", "Locate stationary points of a real-scalar f");
  add_target_options(extrema, et);
  add_adaptive_options(extrema, ea);
  extrema->add_option("--format", et.format, "json or csv");
  extrema->add_option("--eps", ea.eps, "Finite-difference step");
  extrema->add_flag("--central", ea.central, "Central instead of forward differences");

  auto* expected = app.add_subcommand("expected-count", "Intensity measure by Riemann sum and Monte Carlo");
  add_target_options(expected, kt);
  expected->add_option("--cells", eo.cells, "Riemann cells per axis")->check(CLI::PositiveNumber);
  expected->add_option("--samples", eo.samples, "Monte Carlo sample count")->check(CLI::Range(2, 2000000000));
  expected->add_option("--N", eo.N, "Density of the realization used for the accepted count");
  expected->add_option("--tol-start", eo.tol, "Tolerance gate of that realization");
  expected->add_option("--format", kt.format, "json");

  auto* cox = app.add_subcommand("cox-envelope", "Envelope of exp(-K m^Q) with K ~ Gamma");
  add_target_options(cox, ct);
  ct.format = "csv";
  cox->add_option("--gamma-shape", co.shape, "Gamma shape a");
  cox->add_option("--gamma-rate", co.rate, "Gamma rate b (mean a / b); the scale with --shape-scale");
  cox->add_flag("--shape-scale", co.shape_scale, "Read --gamma-rate as a scale parameter");
  cox->add_option("--draws", co.draws, "Number of K draws")->check(CLI::PositiveNumber);
  cox->add_option("--grid", co.grid, "Grid points per axis")->check(CLI::Range(2, 100000000));
  cox->add_option("--level", co.level, "Envelope level");
  cox->add_option("--format", ct.format, "csv or json");

  auto* repro = app.add_subcommand("repro", "Run registered reproduction cases");
  repro->add_option("ids", ro.ids, "Case ids");
  repro->add_flag("--all", ro.all, "Run every default case");
  repro->add_option("--only", ro.only, "Shell glob over case ids");
  repro->add_option("--budget-scale", ro.budget_scale, "Multiply every time budget");
  repro->add_flag("--include-optional", ro.include_optional, "Also select optional slow cases");
  repro->add_flag("--list", ro.list, "List the registry");
  repro->add_flag("--parallel", ro.parallel, "Run cases side by side");
  repro->add_option("--threads", ro.threads, "Worker threads, 0 = machine parallelism");
  repro->add_option("--format", ro.format, "text or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    out << sub->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ppz: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (zeros->parsed()) return run_search("zeros", zt, za, out, err);
    if (extrema->parsed()) return run_search("extrema", et, ea, out, err);
    if (expected->parsed()) return run_expected(kt, eo, out);
    if (cox->parsed()) return run_cox(ct, co, out);
    if (repro->parsed()) return run_repro(ro, out, err);
  } catch (const EvaluationError& e) {
    err << "ppz: evaluation error: " << e.what() << '\n';
    return kExitEvaluation;
  } catch (const std::invalid_argument& e) {
    err << "ppz: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "ppz: " << e.what() << '\n';
    return kExitEvaluation;
  }
  err << "ppz: no subcommand\n";
  return kExitUsage;
}

}  // namespace ppz

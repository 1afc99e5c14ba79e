#include "ppz/report.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ppz {

namespace {

using Json = nlohmann::ordered_json;

const char* scheme_name(DifferenceScheme s) { return s == DifferenceScheme::central ? "central" : "forward"; }

DifferenceScheme scheme_from(const std::string& s) {
  if (s == "forward") return DifferenceScheme::forward;
  if (s == "central") return DifferenceScheme::central;
  throw std::invalid_argument("unknown difference scheme '" + s + "'");
}

TargetKind kind_from(const std::string& s) {
  for (TargetKind k : {TargetKind::real_scalar, TargetKind::real_vector, TargetKind::complex}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown target kind '" + s + "'");
}

StationaryKind stationary_from(const Json& j) {
  if (j.is_null()) return StationaryKind::none;
  const auto s = j.get<std::string>();
  for (StationaryKind k : {StationaryKind::minimum, StationaryKind::maximum, StationaryKind::saddle}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown stationary kind '" + s + "'");
}

// JSON has no infinity; infeasible candidates carry null.
Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_or_inf(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <class T>
std::optional<T> optional_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

Json point_json(const Point& x) { return Json(x.vec()); }

Point point_from(const Json& j) { return Point(j.get<std::vector<double>>()); }

Json zero_json(const Zero& z) {
  Json j;
  j["location"] = point_json(z.location);
  j["magnitude"] = z.magnitude;
  j["achieved_tol"] = z.achieved_tol;
  j["depth"] = z.depth;
  j["lineage"] = z.lineage;
  j["value"] = optional_json(z.value);
  j["kind"] = z.kind == StationaryKind::none ? Json(nullptr) : Json(to_string(z.kind));
  return j;
}

Zero zero_from(const Json& j) {
  Zero z;
  z.location = point_from(j.at("location"));
  z.magnitude = j.at("magnitude").get<double>();
  z.achieved_tol = j.at("achieved_tol").get<double>();
  z.depth = j.at("depth").get<int>();
  z.lineage = j.at("lineage").get<std::vector<std::uint64_t>>();
  z.value = optional_from<double>(j.at("value"));
  z.kind = stationary_from(j.at("kind"));
  return z;
}

Json zeros_json(const std::vector<Zero>& zeros) {
  Json arr = Json::array();
  for (const auto& z : zeros) arr.push_back(zero_json(z));
  return arr;
}

std::vector<Zero> zeros_from(const Json& j) {
  std::vector<Zero> out;
  for (const auto& e : j) out.push_back(zero_from(e));
  return out;
}

bool same_config(const AdaptiveConfig& a, const AdaptiveConfig& b) {
  return a.base.K == b.base.K && a.base.Q == b.base.Q && a.base.N == b.base.N && a.base.seed == b.base.seed &&
         a.tol_start == b.tol_start && a.tol_end == b.tol_end && a.iters == b.iters && a.r_frac == b.r_frac &&
         a.growth == b.growth && a.n_growth == b.n_growth && a.first_escalation == b.first_escalation &&
         a.escalation_cap == b.escalation_cap && a.retry_cap == b.retry_cap && a.max_windows == b.max_windows &&
         a.dedup_radius == b.dedup_radius && a.merge_plateaus == b.merge_plateaus && a.child_n == b.child_n &&
         a.threads == b.threads && a.diagnostics == b.diagnostics;
}

bool same_result(const ZeroReport& a, const ZeroReport& b) {
  return a.zeros == b.zeros && a.died_windows == b.died_windows && a.iterations_run == b.iterations_run &&
         a.escalations == b.escalations && a.final_tol == b.final_tol && a.wall_time == b.wall_time &&
         a.evaluations == b.evaluations && a.snapshots == b.snapshots && a.root_candidates == b.root_candidates &&
         a.nodes == b.nodes &&
         a.global_max == b.global_max && a.global_min == b.global_min;
}

}  // namespace

bool operator==(const RunRecord& a, const RunRecord& b) {
  return a.command == b.command && a.function == b.function && a.builtin == b.builtin && a.kind == b.kind &&
         a.constraint == b.constraint && a.window == b.window && same_config(a.config, b.config) &&
         a.eps == b.eps && a.scheme == b.scheme && a.eta_terms == b.eta_terms && same_result(a.result, b.result);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_json(const RunRecord& r, int indent) {
  Json j;
  j["format"] = "ppz-run/1";
  j["command"] = r.command;

  Json fn;
  fn["source"] = r.builtin ? "builtin" : "expression";
  fn["text"] = r.function;
  fn["kind"] = to_string(r.kind);
  fn["constraint"] = r.constraint.empty() ? Json(nullptr) : Json(r.constraint);
  j["function"] = fn;

  Json win;
  win["lo"] = r.window.lo();
  win["hi"] = r.window.hi();
  j["window"] = win;

  const AdaptiveConfig& c = r.config;
  Json cfg;
  cfg["K"] = c.base.K;
  cfg["Q"] = c.base.Q;
  cfg["N"] = c.base.N;
  cfg["tol_start"] = c.tol_start;
  cfg["tol_end"] = c.tol_end;
  cfg["iters"] = c.iters;
  cfg["r_frac"] = c.r_frac;
  cfg["growth"] = c.growth;
  cfg["n_growth"] = c.n_growth;
  cfg["first_escalation"] = c.first_escalation;
  cfg["escalation_cap"] = c.escalation_cap;
  cfg["retry_cap"] = c.retry_cap;
  cfg["max_windows"] = c.max_windows;
  cfg["dedup_radius"] = c.dedup_radius;
  cfg["merge_plateaus"] = c.merge_plateaus;
  cfg["child_n"] = optional_json(c.child_n);
  cfg["eps"] = optional_json(r.eps);
  cfg["scheme"] = r.scheme ? Json(scheme_name(*r.scheme)) : Json(nullptr);
  cfg["eta_terms"] = optional_json(r.eta_terms);
  cfg["diagnostics"] = c.diagnostics;
  j["config"] = cfg;
  j["seed"] = c.base.seed;

  const ZeroReport& rep = r.result;
  Json sum;
  sum["zero_count"] = rep.zeros.size();
  sum["iterations_run"] = rep.iterations_run;
  sum["final_tol"] = rep.final_tol;
  sum["escalations"] = rep.escalations;
  sum["died_windows"] = rep.died_windows;
  sum["evaluations"] = rep.evaluations;
  sum["global_max"] = optional_json(rep.global_max);
  sum["global_min"] = optional_json(rep.global_min);
  j["summary"] = sum;

  j["zeros"] = zeros_json(rep.zeros);
  Json snaps = Json::array();
  for (const auto& s : rep.snapshots) snaps.push_back(zeros_json(s));
  j["snapshots"] = snaps;
  if (c.diagnostics) {
    Json cands = Json::array();
    for (const auto& cand : rep.root_candidates) {
      Json e;
      e["location"] = point_json(cand.location);
      e["magnitude"] = finite_or_null(cand.magnitude);
      e["accepted"] = cand.accepted;
      cands.push_back(e);
    }
    j["root_candidates"] = cands;
    Json nodes = Json::array();
    for (const auto& nd : rep.nodes) {
      Json e;
      e["depth"] = nd.depth;
      e["lineage"] = nd.lineage;
      e["tol"] = nd.tol;
      e["spawn_window"] = Json{{"lo", nd.spawn_window.lo()}, {"hi", nd.spawn_window.hi()}};
      e["window"] = Json{{"lo", nd.window.lo()}, {"hi", nd.window.hi()}};
      e["n_points"] = nd.n_points;
      e["attempts"] = nd.attempts;
      e["found"] = nd.found;
      nodes.push_back(e);
    }
    j["nodes"] = nodes;
  }

  Json timing;
  timing["wall_time_s"] = rep.wall_time;
  timing["threads"] = c.threads;
  j["timing"] = timing;
  return j.dump(indent);
}

RunRecord run_record_from_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    if (j.at("format").get<std::string>() != "ppz-run/1") throw std::invalid_argument("unsupported format tag");
    RunRecord r;
    r.command = j.at("command").get<std::string>();
    const Json& fn = j.at("function");
    r.builtin = fn.at("source").get<std::string>() == "builtin";
    r.function = fn.at("text").get<std::string>();
    r.kind = kind_from(fn.at("kind").get<std::string>());
    r.constraint = fn.at("constraint").is_null() ? std::string() : fn.at("constraint").get<std::string>();
    r.window = Window(j.at("window").at("lo").get<std::vector<double>>(),
                      j.at("window").at("hi").get<std::vector<double>>());

    const Json& cfg = j.at("config");
    AdaptiveConfig& c = r.config;
    c.base.K = cfg.at("K").get<double>();
    c.base.Q = cfg.at("Q").get<double>();
    c.base.N = cfg.at("N").get<double>();
    c.tol_start = cfg.at("tol_start").get<double>();
    c.tol_end = cfg.at("tol_end").get<double>();
    c.iters = cfg.at("iters").get<int>();
    c.r_frac = cfg.at("r_frac").get<double>();
    c.growth = cfg.at("growth").get<double>();
    c.n_growth = cfg.at("n_growth").get<double>();
    c.first_escalation = cfg.at("first_escalation").get<double>();
    c.escalation_cap = cfg.at("escalation_cap").get<int>();
    c.retry_cap = cfg.at("retry_cap").get<int>();
    c.max_windows = cfg.at("max_windows").get<std::size_t>();
    c.dedup_radius = cfg.at("dedup_radius").get<double>();
    c.merge_plateaus = cfg.at("merge_plateaus").get<bool>();
    c.child_n = optional_from<double>(cfg.at("child_n"));
    r.eps = optional_from<double>(cfg.at("eps"));
    if (!cfg.at("scheme").is_null()) r.scheme = scheme_from(cfg.at("scheme").get<std::string>());
    r.eta_terms = optional_from<std::size_t>(cfg.at("eta_terms"));
    c.diagnostics = cfg.at("diagnostics").get<bool>();
    c.base.seed = j.at("seed").get<std::uint64_t>();

    const Json& sum = j.at("summary");
    ZeroReport& rep = r.result;
    rep.iterations_run = sum.at("iterations_run").get<int>();
    rep.final_tol = sum.at("final_tol").get<double>();
    rep.escalations = sum.at("escalations").get<int>();
    rep.died_windows = sum.at("died_windows").get<std::size_t>();
    rep.evaluations = sum.at("evaluations").get<std::uint64_t>();
    rep.global_max = optional_from<std::size_t>(sum.at("global_max"));
    rep.global_min = optional_from<std::size_t>(sum.at("global_min"));
    rep.zeros = zeros_from(j.at("zeros"));
    if (sum.at("zero_count").get<std::size_t>() != rep.zeros.size()) {
      throw std::invalid_argument("zero_count does not match the zeros array");
    }
    for (const auto& s : j.at("snapshots")) rep.snapshots.push_back(zeros_from(s));
    if (j.contains("root_candidates")) {
      for (const auto& e : j.at("root_candidates")) {
        rep.root_candidates.push_back(
            {point_from(e.at("location")), number_or_inf(e.at("magnitude")), e.at("accepted").get<bool>()});
      }
    }
    if (j.contains("nodes")) {
      for (const auto& e : j.at("nodes")) {
        RefinementNode nd;
        nd.depth = e.at("depth").get<int>();
        nd.lineage = e.at("lineage").get<std::vector<std::uint64_t>>();
        nd.tol = e.at("tol").get<double>();
        nd.spawn_window = Window(e.at("spawn_window").at("lo").get<std::vector<double>>(),
                                 e.at("spawn_window").at("hi").get<std::vector<double>>());
        nd.window = Window(e.at("window").at("lo").get<std::vector<double>>(),
                           e.at("window").at("hi").get<std::vector<double>>());
        nd.n_points = e.at("n_points").get<double>();
        nd.attempts = e.at("attempts").get<int>();
        nd.found = e.at("found").get<bool>();
        rep.nodes.push_back(std::move(nd));
      }
    }
    rep.wall_time = j.at("timing").at("wall_time_s").get<double>();
    c.threads = j.at("timing").at("threads").get<unsigned>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("run record: ") + e.what());
  }
}

std::string without_timing(const std::string& json_text) {
  Json j = Json::parse(json_text);
  j.erase("timing");
  return j.dump(2);
}

std::vector<std::string> coordinate_names(std::size_t dim, TargetKind kind) {
  if (kind == TargetKind::complex) return {"sigma", "t"};
  if (dim == 1) return {"x"};
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

std::string to_csv(const RunRecord& r) {
  const bool extrema = r.command == "extrema";
  std::ostringstream os;
  const auto names = coordinate_names(r.window.dim(), r.kind);
  for (const auto& n : names) os << n << ',';
  os << "magnitude,achieved_tol,depth";
  if (extrema) os << ",value,kind";
  os << '\n';
  for (const auto& z : r.result.zeros) {
    for (double c : z.location) os << format_double(c) << ',';
    os << format_double(z.magnitude) << ',' << format_double(z.achieved_tol) << ',' << z.depth;
    if (extrema) {
      os << ',' << (z.value ? format_double(*z.value) : std::string()) << ','
         << (z.kind == StationaryKind::none ? "" : to_string(z.kind));
    }
    os << '\n';
  }
  return os.str();
}

std::string envelope_csv(const std::vector<Point>& grid, const std::vector<EnvelopePoint>& env,
                         const std::vector<double>& closed_form, TargetKind kind) {
  if (grid.size() != env.size() || grid.size() != closed_form.size()) {
    throw std::invalid_argument("envelope_csv: size mismatch");
  }
  std::ostringstream os;
  const std::size_t dim = grid.empty() ? 1 : grid.front().dim();
  for (const auto& n : coordinate_names(dim, kind)) os << n << ',';
  os << "lower,mean,upper,median,closed_form_mean\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (double c : grid[i]) os << format_double(c) << ',';
    os << format_double(env[i].lower) << ',' << format_double(env[i].mean) << ',' << format_double(env[i].upper)
       << ',' << format_double(env[i].median) << ',' << format_double(closed_form[i]) << '\n';
  }
  return os.str();
}

}  // namespace ppz

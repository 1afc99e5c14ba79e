#include <doctest.h>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ppz/builtins.hpp"
#include "ppz/report.hpp"
#include "ppz/sampling.hpp"

using namespace ppz;

namespace {

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

RunRecord cos_record(bool diagnostics) {
  RunRecord r;
  r.function = "cos";
  r.builtin = true;
  r.window = Window({-15}, {15});
  r.config.base.seed = 1;
  r.config.iters = 4;
  r.config.diagnostics = diagnostics;
  r.result = run_adaptive(builtin("cos"), r.window, r.config);
  return r;
}

}  // namespace

TEST_CASE("JSON round trip of a zeros run") {
  for (bool diag : {false, true}) {
    const RunRecord r = cos_record(diag);
    const std::string text = to_json(r);
    const RunRecord back = run_record_from_json(text);
    CHECK(back == r);
    CHECK(to_json(back) == text);
    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("snapshots").size() == static_cast<std::size_t>(r.result.iterations_run));
    CHECK(j.at("summary").at("zero_count") == r.result.zeros.size());
    CHECK(j.contains("root_candidates") == diag);
    CHECK(j.contains("nodes") == diag);
  }
}

TEST_CASE("JSON round trip of an extrema run with infeasible candidates") {
  RunRecord r;
  r.command = "extrema";
  r.function = "sin(x/20)+cos(x)^2";
  r.constraint = "x > 0";
  r.window = Window({-15}, {15});
  r.config.base.seed = 3;
  r.config.iters = 3;
  r.config.child_n = 250.0;
  r.config.diagnostics = true;
  r.eps = 1e-6;
  r.scheme = DifferenceScheme::forward;
  const TargetFunction f = builtin("sincos").with_constraint([](const Point& x) { return x[0] > 0; });
  r.result = find_extrema(f, r.window, r.config);
  bool has_inf = false;
  for (const auto& c : r.result.root_candidates) has_inf = has_inf || std::isinf(c.magnitude);
  CHECK(has_inf);
  const RunRecord back = run_record_from_json(to_json(r));
  CHECK(back == r);
  CHECK(back.result.global_max == r.result.global_max);
}

TEST_CASE("empty zeros serialize as an empty array") {
  RunRecord r;
  r.function = "x^2+1";
  r.window = Window({0}, {1});
  r.result.iterations_run = 1;
  r.result.snapshots.emplace_back();
  const std::string text = to_json(r);
  CHECK(text.find("\"zeros\": []") != std::string::npos);
  CHECK(run_record_from_json(text) == r);
  CHECK(to_csv(r) == "x,magnitude,achieved_tol,depth\n");
}

TEST_CASE("fixed field order and timing at the end") {
  const RunRecord r = cos_record(false);
  const auto j = nlohmann::ordered_json::parse(to_json(r));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  const std::vector<std::string> want = {"format", "command", "function", "window", "config", "seed",
                                         "summary", "zeros", "snapshots", "timing"};
  CHECK(keys == want);
  const std::string stripped = without_timing(to_json(r));
  CHECK(stripped.find("timing") == std::string::npos);
  CHECK(stripped.find("wall_time") == std::string::npos);
  RunRecord other = r;
  other.result.wall_time += 5;
  other.config.threads = 8;
  CHECK(without_timing(to_json(other)) == stripped);
}

TEST_CASE("malformed JSON is rejected") {
  CHECK_THROWS_AS(run_record_from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(run_record_from_json("{}"), std::invalid_argument);
  auto j = nlohmann::ordered_json::parse(to_json(cos_record(false)));
  j["summary"]["zero_count"] = 99;
  CHECK_THROWS_AS(run_record_from_json(j.dump()), std::invalid_argument);
  j = nlohmann::ordered_json::parse(to_json(cos_record(false)));
  j["format"] = "something-else";
  CHECK_THROWS_AS(run_record_from_json(j.dump()), std::invalid_argument);
}

TEST_CASE("CSV rows and columns") {
  const RunRecord r = cos_record(false);
  const std::string csv = to_csv(r);
  CHECK(line_count(csv) == r.result.zeros.size() + 1);
  CHECK(csv.rfind("x,magnitude,achieved_tol,depth\n", 0) == 0);

  CHECK(coordinate_names(1, TargetKind::real_scalar) == std::vector<std::string>{"x"});
  CHECK(coordinate_names(3, TargetKind::real_vector) == std::vector<std::string>{"x1", "x2", "x3"});
  CHECK(coordinate_names(2, TargetKind::complex) == std::vector<std::string>{"sigma", "t"});

  RunRecord c;
  c.function = "(s-1)^2";
  c.kind = TargetKind::complex;
  c.window = Window({0, -1}, {2, 1});
  Zero z;
  z.location = Point{1.0, 0.0};
  z.achieved_tol = 1e-5;
  z.depth = 5;
  c.result.zeros = {z, z};
  const std::string ccsv = to_csv(c);
  CHECK(ccsv.rfind("sigma,t,magnitude,achieved_tol,depth\n", 0) == 0);
  CHECK(line_count(ccsv) == 3);
  CHECK(ccsv.find("\n1,0,0,1e-05,5\n") != std::string::npos);

  RunRecord e = c;
  e.command = "extrema";
  e.kind = TargetKind::real_scalar;
  e.result.zeros[0].value = 0.5;
  e.result.zeros[0].kind = StationaryKind::maximum;
  CHECK(to_csv(e).find(",value,kind\n") != std::string::npos);
  CHECK(to_csv(e).find(",0.5,max\n") != std::string::npos);
}

TEST_CASE("property: shortest decimals read back exactly") {
  Rng rng(12);
  for (int i = 0; i < 20000; ++i) {
    const double v = std::bit_cast<double>(rng.next());
    if (!std::isfinite(v)) continue;
    const std::string s = format_double(v);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(v));
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-10) == "1e-10");
  CHECK(format_double(1.570796326794897) == "1.570796326794897");
}

TEST_CASE("envelope CSV") {
  const std::vector<Point> grid = {Point{0.0}, Point{1.0}};
  const std::vector<EnvelopePoint> env = {{1, 1, 1, 1}, {0.1, 0.2, 0.25, 0.3}};
  const std::string csv = envelope_csv(grid, env, {1.0, 0.2}, TargetKind::real_scalar);
  CHECK(csv == "x,lower,mean,upper,median,closed_form_mean\n0,1,1,1,1,1\n1,0.1,0.2,0.3,0.25,0.2\n");
  CHECK_THROWS_AS(envelope_csv(grid, env, {1.0}, TargetKind::real_scalar), std::invalid_argument);
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ppz/repro.hpp"

using namespace ppz;

TEST_CASE("unknown id lists the registry") {
  try {
    find_case("nope");
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    for (const auto& c : repro_registry()) CHECK(msg.find(c.id) != std::string::npos);
  }
  CHECK_THROWS_AS(run_case("nope"), std::invalid_argument);
  CHECK_THROWS_AS(run_all({"cos-zeros-10it", "nope"}, {}, false), std::invalid_argument);
}

TEST_CASE("registry contents") {
  const char* required[] = {"cos-zeros-10it", "complex-poly-multiplicity", "eta-strip", "hard-poly",
                            "hard-poly-20seeds", "sincos2d-extrema", "cox-gamma-envelope"};
  for (const char* id : required) CHECK_NOTHROW(find_case(id));
  CHECK(find_case("sum-sq-p10").optional);
  CHECK(find_case("eta-strip").budget_s == 900.0);
  CHECK(find_case("sincos2d-extrema").budget_s == 600.0);
  for (const auto& c : repro_registry()) {
    CHECK(!c.description.empty());
    CHECK(c.budget_s > 0);
  }
}

TEST_CASE("glob selection") {
  const auto cos = select_cases("cos-*", false);
  REQUIRE(cos.size() == 2);
  CHECK(cos[0] == "cos-zeros-10it");
  CHECK(cos[1] == "cos-extrema");
  CHECK(select_cases("zzz*", false).empty());
  const auto all = select_cases("*", false);
  const auto with_opt = select_cases("*", true);
  CHECK(with_opt.size() > all.size());
  for (const auto& id : all) CHECK_FALSE(find_case(id).optional);
  CHECK(select_cases("sum-sq-p?", false).size() == 5);
  CHECK(select_cases("sum-sq-p*", true).size() == 6);
}

TEST_CASE("run_case reports checks and artifacts") {
  const CaseOutcome o = run_case("thinning-acceptance");
  CHECK(o.verdict == Verdict::pass);
  CHECK(o.checks.size() == 3);
  CHECK(!o.artifacts.empty());
  CHECK(o.message.empty());
  const CaseOutcome again = run_case("thinning-acceptance", {4, 1.0});
  CHECK(again.artifacts == o.artifacts);
}

TEST_CASE("budget overrun is a timeout") {
  const CaseOutcome o = run_case("cos-zeros-10it", {1, 1e-9});
  CHECK(o.verdict == Verdict::timeout);
  CHECK(std::string(to_string(o.verdict)) == "timeout-fail");
}

TEST_CASE("summary and json") {
  const auto outcomes = run_all({"thinning-acceptance"}, {}, true);
  std::ostringstream os;
  print_summary(os, outcomes);
  CHECK(os.str().find("1 of 1 cases passed") != std::string::npos);
  const auto j = nlohmann::json::parse(outcomes_json(outcomes));
  REQUIRE(j.size() == 1);
  CHECK(j[0].at("id") == "thinning-acceptance");
  CHECK(j[0].at("verdict") == "pass");
}

TEST_CASE("helpers") {
  const auto a = repro_detail::random_roots(7);
  const auto b = repro_detail::random_roots(7);
  CHECK(a == b);
  CHECK(a.size() == 10);
  CHECK(repro_detail::random_roots(8) != a);
  for (const auto& r : a) {
    CHECK(std::fabs(r.real()) <= 1.0);
    CHECK(std::fabs(r.imag()) <= 1.0);
  }
  const auto z = repro_detail::bracket_roots([](double x) { return std::cos(x); }, -15, 15, 3000);
  REQUIRE(z.size() == 10);
  for (double x : z) {
    const double k = std::round((x - std::numbers::pi / 2) / std::numbers::pi);
    CHECK(std::fabs(x - (std::numbers::pi / 2 + k * std::numbers::pi)) < 1e-12);
  }
}

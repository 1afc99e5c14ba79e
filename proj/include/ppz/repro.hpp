#pragma once

#include <chrono>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ppz/report.hpp"

namespace ppz {

/// One compared expectation with the measured delta.
struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

enum class Verdict { pass, fail, timeout, error };

const char* to_string(Verdict v);

struct CaseOutcome {
  std::string id;
  Verdict verdict = Verdict::error;
  std::vector<Check> checks;
  double wall_time = 0.0;
  std::string message;  // set for timeout and error
  /// Serialized results, timing stripped; equal across reruns and thread
  /// counts for a deterministic case.
  std::vector<std::string> artifacts;
};

struct CaseContext {
  unsigned threads = 1;
  double budget_scale = 1.0;
};

/// Handed to a case body: records checks and artifacts, carries the
/// deadline for the adaptive runs.
class CaseRun {
 public:
  CaseRun(const CaseContext& ctx, std::chrono::steady_clock::time_point deadline)
      : ctx_(ctx), deadline_(deadline) {}

  unsigned threads() const { return ctx_.threads; }
  std::chrono::steady_clock::time_point deadline() const { return deadline_; }

  void check(std::string name, bool pass, std::string detail = {});
  /// Stores the record JSON (timing stripped) as an artifact.
  void record(const RunRecord& r);
  void artifact(std::string text);

  std::vector<Check>& checks() { return checks_; }
  std::vector<std::string>& artifacts() { return artifacts_; }

 private:
  CaseContext ctx_;
  std::chrono::steady_clock::time_point deadline_;
  std::vector<Check> checks_;
  std::vector<std::string> artifacts_;
};

struct ReproCase {
  std::string id;
  std::string description;
  bool optional = false;  // excluded from run_all unless asked
  double budget_s = 60.0;
  std::function<void(CaseRun&)> body;
};

const std::vector<ReproCase>& repro_registry();

/// Throws std::invalid_argument, listing the registry, for an unknown id.
const ReproCase& find_case(std::string_view id);

CaseOutcome run_case(std::string_view id, const CaseContext& ctx = {});

/// Ids matching a shell glob, in registry order. Optional cases are
/// included only when asked.
std::vector<std::string> select_cases(std::string_view glob, bool include_optional);

/// With `parallel`, cases run side by side, one thread each; otherwise in
/// order with ctx.threads inside each case.
std::vector<CaseOutcome> run_all(const std::vector<std::string>& ids, const CaseContext& ctx, bool parallel);

void print_summary(std::ostream& os, const std::vector<CaseOutcome>& outcomes);
std::string outcomes_json(const std::vector<CaseOutcome>& outcomes);

/// Helpers shared with the tests.
namespace repro_detail {

/// The seed-pinned roots of the random ten-root polynomial, drawn
/// uniformly in [-1, 1]^2.
std::vector<std::complex<double>> random_roots(std::uint64_t seed, std::size_t count = 10);

/// Zeros of a real function of one variable on [lo, hi]: sign changes on a
/// grid of `cells` cells, refined by bisection.
std::vector<double> bracket_roots(const std::function<double(double)>& g, double lo, double hi,
                                  std::size_t cells);

}  // namespace repro_detail

}  // namespace ppz

// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes. `--expect-fail N` (repeatable)
// names criteria known to fail; the run then exits 0 only if exactly those
// fail, so a known failure stays visible without masking new regressions.

#include "checks/benchmark_checks.hpp"
#include "checks/calibration.hpp"
#include "checks/golden_pf.hpp"
#include "checks/oracle.hpp"
#include "checks/planner_optimality.hpp"

#include <beltamp/belief/models.hpp>
#include <beltamp/harness/scenario.hpp>
#include <beltamp/priors/llm_priors.hpp>
#include <beltamp/sim/dataset.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <iomanip>
#include <iostream>
#include <set>

using namespace beltamp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x, int digits = 3) {
  std::ostringstream o;
  o << std::setprecision(digits) << x;
  return o.str();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome scenario_regression() {
  const auto t0 = Clock::now();
  const auto sc = harness::load_scenario(checks::data_dir() + "/two_room_fetch.json");
  const std::vector<std::pair<std::string, std::size_t>> want{{"baseline", 4}, {"comodel", 2}, {"mcqa+comodel", 1}};
  Outcome o{true, ""};
  for (const auto& [v, replans] : want) {
    const auto rep = harness::run_scenario(sc, v);
    const bool ok = rep.checked && rep.passed && rep.trace.replans == replans &&
                    (v != "baseline" || rep.detects.size() == 5);
    o.pass = o.pass && ok;
    o.detail += v + " " + std::to_string(rep.trace.replans) + " replans" + (ok ? "" : " (" + rep.divergence + ")") + ", ";
  }
  const double t = seconds_since(t0);
  o.pass = o.pass && t < 10.0;
  o.detail += fmt(t) + " s";
  return o;
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  const auto r = checks::run_oracle_check(200, 424242);
  const double t = seconds_since(t0);
  return {r.ok() && r.instances >= 100 && t < 30.0,
          std::to_string(r.instances) + " instances, worst TV " + fmt(r.worst_tv) + ", " + fmt(t) + " s" +
              (r.failure.empty() ? "" : ", " + r.failure)};
}

Outcome colocation_properties() {
  Rng rng(20240901);
  std::size_t draws = 0;
  std::size_t boundary = 0;
  for (; draws < 10000; ++draws) {
    const std::size_t R = 2 + rng.index(31);
    const double n = static_cast<double>(R);
    double sim = rng.uniform(-1.0, 1.0);
    switch (rng.index(4)) {
      case 1: sim = 1.0; break;
      case 2: sim = 0.0; break;
      case 3: sim = -1.0; break;
      default: break;
    }
    const double same = belief::colocation_prob(sim, true, R);
    const double diff = belief::colocation_prob(sim, false, R);
    bool ok = same >= 0.0 && diff >= 0.0 && std::abs(same + (n - 1.0) * diff - 1.0) <= 1e-12;
    if (sim == 1.0) ok = ok && same == 1.0 && diff == 0.0;
    if (sim == 0.0) ok = ok && same == 1.0 / n && diff == 1.0 / n;
    if (sim == -1.0) ok = ok && same == 0.0 && diff == 1.0 / (n - 1.0);
    if (sim == 1.0 || sim == 0.0 || sim == -1.0) ++boundary;
    if (!ok) return {false, "violated at sim=" + fmt(sim, 17) + " R=" + std::to_string(R)};
  }
  // Every R in [2, 32] at each boundary value, exhaustively.
  for (std::size_t R = 2; R <= 32; ++R) {
    const double n = static_cast<double>(R);
    if (belief::colocation_prob(1.0, true, R) != 1.0 || belief::colocation_prob(1.0, false, R) != 0.0 ||
        belief::colocation_prob(0.0, true, R) != 1.0 / n || belief::colocation_prob(0.0, false, R) != 1.0 / n ||
        belief::colocation_prob(-1.0, true, R) != 0.0 || belief::colocation_prob(-1.0, false, R) != 1.0 / (n - 1.0))
      return {false, "boundary collapse fails at R=" + std::to_string(R)};
  }
  return {true, std::to_string(draws) + " draws (" + std::to_string(boundary) + " at boundaries), R in [2, 32]"};
}

Outcome golden_filter() {
  const auto why = checks::run_golden_pf_check();
  return {why.empty(), why.empty() ? "3 scripted events match the frozen multisets" : why};
}

Outcome calibration() {
  Outcome o{true, ""};
  for (double v : {0.25, 0.5, 1.0}) {
    const auto hit = checks::run_calibration(v, true, 10000, 11, belief::NoiseParams{0.01, 0.0, 0.1, 1.0});
    const auto fp = checks::run_calibration(v, false, 10000, 12, belief::NoiseParams{0.01, 0.05, 0.1, 1.0});
    o.pass = o.pass && hit.ok() && fp.ok();
    o.detail += "v=" + fmt(v) + " hit " + fmt(hit.observed, 4) + "/" + fmt(hit.expected, 4) + " fp " +
                fmt(fp.observed, 4) + "/" + fmt(fp.expected, 4) + "; ";
  }
  o.detail += "10000 trials each, 3 sigma";
  return o;
}

harness::BenchmarkConfig standard_benchmark() {
  harness::BenchmarkConfig cfg;
  cfg.layout = {6, 12};
  cfg.num_envs = 50;
  cfg.seed = 1;
  return cfg;
}

Outcome benchmark_ordering() {
  const auto t0 = Clock::now();
  const auto provider = priors::make_provider(priors::ProviderConfig{}, checks::mock_sources());
  const auto r = checks::ordering_of(
      harness::run_benchmark(standard_benchmark(), harness::all_variants(), *checks::bundled_dataset(), provider.get()));
  const double t = seconds_since(t0);
  return {r.ok() && t < 900.0, r.summary() + "; " + fmt(t) + " s"};
}

Outcome adversarial() {
  const auto r = checks::run_adversarial_check(5, 1, 100);
  return {r.ok(), std::to_string(r.bayes_episodes) + " bayes-mode episodes, " + std::to_string(r.bayes_unsolved) +
                      " unsolved; adversarial LGBU " + std::to_string(r.lgbu_unsolved) + "/" +
                      std::to_string(r.lgbu_episodes) + " reported unsolved, " + std::to_string(r.lgbu_errors) +
                      " errors" + (r.detail.empty() ? "" : "; " + r.detail)};
}

Outcome annotation_fixture() {
  const sim::AnnotationEntry hub{"multiport hub", "kitchen",
                                 {"carpet", "fridge", "table", "counter", "sink"},
                                 {"chest", "cooktop", "microwave", "dishwasher", "stove"},
                                 {"oven", "shelf", "top cabinet", "chair", "bottom cabinet"},
                                 0};
  const std::vector<std::pair<std::string, int>> want{
      {"carpet", 15}, {"fridge", 14},    {"table", 13},     {"counter", 12},    {"sink", 11},
      {"chest", -15}, {"cooktop", -14}, {"microwave", -13}, {"dishwasher", -12}, {"stove", -11}};
  const bool ok = sim::score_annotation(hub, 15) == want && sim::score_annotation(hub) == want;
  return {ok, ok ? "carpet=15 .. sink=11, chest=-15 .. stove=-11" : "scores differ from the fixture"};
}

Outcome prior_properties() {
  Rng rng(31);
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> x(2 + rng.index(8));
    for (double& v : x) v = rng.uniform(-20.0, 0.0);
    const double c = rng.uniform(-500.0, 500.0);
    auto shifted = x;
    for (double& v : shifted) v += c;
    const auto p = priors::logprobs_to_prior(x);
    const auto q = priors::logprobs_to_prior(shifted);
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(p[i] - q[i]));
  }
  const auto dir = std::filesystem::temp_directory_path() / "beltamp_acceptance_replay";
  const auto r = checks::run_replay_determinism(standard_benchmark(), dir);
  std::filesystem::remove_all(dir);
  return {worst <= 1e-12 && r.identical,
          "max shift difference " + fmt(worst) + "; replay " + (r.identical ? "byte-identical" : "differs") + " over " +
              std::to_string(r.bytes) + " bytes from " + std::to_string(r.records) + " cached records" +
              (r.detail.empty() ? "" : "; " + r.detail)};
}

Outcome planner_optimality() {
  const auto r = checks::run_planner_optimality_check(4);
  return {r.ok(), std::to_string(r.fixtures) + " fixtures, search cost equals the enumerated optimum" +
                      (r.failure.empty() ? "" : "; " + r.failure)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> expect_fail;
  std::vector<int> only;
  app.add_option("--expect-fail", expect_fail, "criteria known to fail");
  app.add_option("--only", only, "run just these criteria");
  CLI11_PARSE(app, argc, argv);
  // Degenerate-update warnings are expected on adversarial runs; count them.
  std::size_t warnings = 0;
  warning_sink() = [&warnings](const std::string&) { ++warnings; };

  const std::vector<std::pair<std::string, Outcome (*)()>> criteria{
      {"two-room scenario regression", scenario_regression},
      {"oracle equivalence", oracle_equivalence},
      {"co-location model properties", colocation_properties},
      {"particle filter golden trace", golden_filter},
      {"detector calibration", calibration},
      {"benchmark replan ordering", benchmark_ordering},
      {"adversarial robustness", adversarial},
      {"annotation scoring fixture", annotation_fixture},
      {"softmax and replay determinism", prior_properties},
      {"planner optimality", planner_optimality},
  };
  const std::set<int> expected(expect_fail.begin(), expect_fail.end());
  const std::set<int> selected(only.begin(), only.end());
  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(n)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) failed.insert(n);
    std::cout << "criterion " << n << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  std::cout << warnings << " warning(s) suppressed\n";
  std::set<int> expected_run;
  for (int n : expected)
    if (selected.empty() || selected.count(n)) expected_run.insert(n);
  if (failed == expected_run) {
    if (!failed.empty()) std::cout << failed.size() << " known failure(s), listed with --expect-fail\n";
    return 0;
  }
  return 1;
}

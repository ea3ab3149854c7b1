// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Criteria 1-8 come from the verification suites (each suite timed on its own);
// 6 also emits the alpha sweep; 9 reruns `verify all` and compares the reports.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fairres/harness.hpp"

namespace {

using namespace fairres;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  int id;
  std::string name;
  bool passed;
  std::string detail;
};

std::vector<Outcome> outcomes;

void report(int id, const std::string& name, bool passed, const std::string& detail) {
  outcomes.push_back({id, name, passed, detail});
  std::printf("%s [%d] %s: %s\n", passed ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

const CheckResult& check(const std::vector<SuiteReport>& reps, const std::string& suite, const std::string& name) {
  for (const auto& r : reps)
    if (r.suite == suite)
      for (const auto& c : r.checks)
        if (c.name == name) return c;
  throw std::runtime_error("missing check " + suite + "/" + name);
}

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  const fs::path out = FAIRRES_ACCEPTANCE_OUT;
  fs::create_directories(out);
  VerifyOptions o;  // fixed master seed, harness parameters

  std::vector<SuiteReport> reps;
  std::map<std::string, double> secs;
  for (const auto& suite : suite_names()) {
    auto t0 = Clock::now();
    auto r = run_verify(suite, o);
    secs[suite] = seconds_since(t0);
    reps.insert(reps.end(), r.begin(), r.end());
  }
  const std::string first_dump = report_json("all", o, reps).dump(2);
  detail::write_text(out / "verify_all.json", first_dump + "\n");

  {  // 1
    bool ok = secs["reconstruction"] < 30.0;
    double worst = 0.0;
    std::size_t comparisons = 0;
    for (int m = 1; m <= 3; ++m) {
      const auto& c = check(reps, "reconstruction", "reconstruction_m" + std::to_string(m));
      ok = ok && c.passed;
      worst = std::max(worst, c.detail["max_relative_error"].get<double>());
      comparisons += c.detail["comparisons"].get<std::size_t>();
    }
    report(1, "reconstruction exactness", ok,
           "m=1..3 x 100 instances, " + std::to_string(comparisons) + " comparisons, max rel err " + fmt(worst) +
               " (tol 1e-9), " + fmt(secs["reconstruction"], "%.2f") + " s (limit 30 s)");
  }
  {  // 2
    const auto& a = check(reps, "lp", "lp_two_approx");
    const auto& b = check(reps, "lp", "lp_two_approx_with_fixing_costs");
    bool ok = a.passed && b.passed && secs["lp"] < 60.0;
    report(2, "LP 2-approximation", ok,
           "200 instances k=4..18, max rounded/opt " + fmt(a.detail["max_rounded_over_opt"].get<double>()) +
               " (with fixing costs " + fmt(b.detail["max_rounded_over_opt"].get<double>()) +
               "), half-integral tol 1e-9, " + fmt(secs["lp"], "%.2f") + " s (limit 60 s)");
  }
  {  // 3
    const auto& c = check(reps, "regret_scaling", "explore_exploit_scaling");
    report(3, "explore-exploit regret scaling", c.passed,
           "regret(8e4)/regret(2e4) = " + fmt(c.detail["growth_4x_horizon"].get<double>()) + " <= " +
               fmt(c.detail["allowed_growth"].get<double>()) + ", regret/T decreasing: " +
               (c.detail["regret_per_step_decreasing"].get<bool>() ? "yes" : "no"));
  }
  {  // 4
    const auto& c = check(reps, "regret_scaling", "ucb_scaling");
    report(4, "UCB sqrt(T) scaling", c.passed,
           "regret(8e4)/regret(2e4) = " + fmt(c.detail["growth_4x_horizon"].get<double>()) + " <= " +
               fmt(c.detail["allowed_growth"].get<double>()) + ", regret/T decreasing: " +
               (c.detail["regret_per_step_decreasing"].get<bool>() ? "yes" : "no") +
               ", oracle-call bound violations: " + std::to_string(c.detail["oracle_call_violations"].get<std::size_t>()));
  }
  {  // 5
    const auto& c = check(reps, "regret_scaling", "m1_comparison");
    std::string d;
    for (const auto& run : c.detail["runs"])
      d += "k=" + std::to_string(run["k"].get<std::size_t>()) + ": " + std::to_string(run["wins"].get<std::size_t>()) +
           "/" + std::to_string(run["seeds"].get<std::size_t>()) + " wins; ";
    report(5, "m=1 comparison", c.passed, d + "required >= 70%");
  }
  {  // 6
    const auto& c = check(reps, "regret_scaling", "alpha_tradeoff");
    SweepSpec sweep;
    sweep.base.cfg.k = 50;
    sweep.base.cfg.lambda = 10.0;
    sweep.base.T = 100000;
    sweep.base.seeds = 20;
    sweep.base.seed = o.seed;
    sweep.base.out = out / "alpha_sweep";
    sweep.param = "alpha";
    sweep.values = {0.1, 0.5, 1.0, 2.0, 4.0};
    sweep.algorithms = {AlgorithmId::ExploreExploit, AlgorithmId::UcbGeneral};
    std::ostringstream log;
    auto t0 = Clock::now();
    auto csv = cmd_sweep(sweep, log);
    const double sweep_secs = seconds_since(t0);
    auto in = detail::open_in(csv);
    auto rows = parse_sweep_csv(in);
    std::map<std::size_t, std::map<std::string, double>> final_loss;  // seed -> algorithm -> loss at T
    for (const auto& r : rows)
      if (r.param_value == "0.1" && r.checkpoint == sweep.base.T) final_loss[r.seed][r.algorithm] = r.cum_loss;
    std::size_t wins = 0;
    for (auto& [seed, m] : final_loss) wins += m["ucb_general"] < m["explore_exploit"];
    std::size_t charts = 0;
    for (const auto& e : fs::directory_iterator(sweep.base.out)) charts += e.path().extension() == ".svg";
    const std::size_t verify_wins = c.detail["wins"].get<std::size_t>();
    bool ok = c.passed && 2 * wins > final_loss.size() && charts == 5;
    report(6, "alpha tradeoff", ok,
           "alpha=0.1 ucb_general wins " + std::to_string(verify_wins) + "/20 (verify seeds), " +
               std::to_string(wins) + "/" + std::to_string(final_loss.size()) + " (sweep seeds); sweep CSV + " +
               std::to_string(charts) + " charts in " + sweep.base.out.string() + " (" + fmt(sweep_secs, "%.0f") + " s)");
  }
  {  // 7
    const auto& c = check(reps, "adversarial_ratio", "path2_crafted");
    // same figures through the CLI code path on the sample files
    RunSpec spec;
    spec.graph_file = fs::path(FAIRRES_SAMPLES_DIR) / "path2.graph";
    spec.sequence_file = fs::path(FAIRRES_SAMPLES_DIR) / "path2.seq";
    spec.seeds = 1;
    std::ostringstream log;
    spec.algorithm = AlgorithmId::Barrier;
    spec.out = out / "path2_barrier";
    cmd_run(spec, log);
    spec.algorithm = AlgorithmId::NaiveSki;
    spec.out = out / "path2_naive";
    cmd_run(spec, log);
    const std::string barrier_row = "0,barrier,2,55,1,26,15,1.7333333333333334,20,2";
    const std::string naive_row = "0,naive_ski,2,55,1,110,15,7.333333333333333,20,10";
    bool files_ok = read_file(out / "path2_barrier" / "summary.csv").find(barrier_row) != std::string::npos &&
                    read_file(out / "path2_naive" / "summary.csv").find(naive_row) != std::string::npos;
    report(7, "adversarial crafted instances", c.passed && files_ok,
           "offline_opt " + fmt(c.detail["offline_opt"].get<double>()) + " (=15), naive " +
               fmt(c.detail["naive_ski_rental"].get<double>()) + " (=110), barrier first phase " +
               fmt(c.detail["barrier_first_phase"].get<double>()) + " (=20); CLI summaries " +
               (files_ok ? "agree" : "disagree"));
  }
  {  // 8
    const auto& a = check(reps, "adversarial_ratio", "barrier_ratio_fuzz");
    const auto& b = check(reps, "adversarial_ratio", "edgeless_ski_rental");
    bool ok = a.passed && b.passed && secs["adversarial_ratio"] < 120.0;
    report(8, "competitive-ratio fuzz", ok,
           std::to_string(a.detail["sequences"].get<std::size_t>()) + " sequences, violations " +
               std::to_string(a.detail["violations"].get<std::size_t>()) + ", max ratio/(2B+4) " +
               fmt(a.detail["max_ratio_over_bound"].get<double>()) + "; edgeless max ratio " +
               fmt(b.detail["max_ratio"].get<double>()) + " <= 2; " + fmt(secs["adversarial_ratio"], "%.2f") +
               " s (limit 120 s)");
  }
  {  // 9
    auto second = report_json("all", o, run_verify("all", o)).dump(2);
    bool same = second == first_dump;
    report(9, "determinism", same,
           std::string("two `verify all` reports ") + (same ? "byte-identical" : "differ") + " (" +
               std::to_string(first_dump.size()) + " bytes)");
  }

  std::size_t failed = 0;
  for (const auto& r : outcomes) failed += !r.passed;
  std::printf("%zu/%zu criteria passed\n", outcomes.size() - failed, outcomes.size());
  return failed == 0 ? 0 : 1;
}

#pragma once

// Property suites behind `fairres verify`. Every suite is a pure function of
// its options; reports carry no timings so repeated runs are byte-identical.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "fairres/adversarial.hpp"
#include "fairres/cover.hpp"
#include "fairres/experiment.hpp"
#include "fairres/oracle.hpp"
#include "fairres/random_instances.hpp"
#include "fairres/stochastic.hpp"

namespace fairres {

using Json = nlohmann::ordered_json;

struct CheckResult {
  std::string name;
  bool passed = false;
  Json detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

struct VerifyOptions {
  std::uint64_t seed = 20240613;
  std::optional<std::size_t> seeds;  // overrides per-check trial counts (smoke runs)
  StochasticParams params;
  /// Progress lines for long suites; never part of the report.
  std::function<void(const std::string&)> progress;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"reconstruction", "lp", "regret_scaling", "adversarial_ratio"};
  return names;
}

namespace detail {

inline std::size_t trials(const VerifyOptions& o, std::size_t fallback) { return o.seeds ? *o.seeds : fallback; }

inline void note(const VerifyOptions& o, const std::string& msg) {
  if (o.progress) o.progress(msg);
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline SuiteReport verify_reconstruction(const VerifyOptions& o) {
  SuiteReport rep{"reconstruction", {}};
  const std::size_t n = detail::trials(o, 100);
  for (std::size_t m = 1; m <= 3; ++m) {
    detail::note(o, "reconstruction m=" + std::to_string(m));
    std::mt19937_64 rng(child_seed(o.seed, m, 100));
    double worst = 0.0;
    std::size_t comparisons = 0;
    std::size_t failures = 0;
    std::size_t max_cover = 0;
    for (std::size_t t = 0; t < n; ++t) {
      std::size_t k = 3 + t % 10;  // 3..12
      auto g = random_graph(k, 0.3, rng);
      auto model = random_model(k, m, k, rng);
      auto cover = build_cover(g, model);
      max_cover = std::max(max_cover, cover.size());
      auto means = true_cover_means(cover, model);
      auto x = x_values(cover, means);
      for_each_valid_state(g, [&](const CriteriaState& s) {
        auto mu = mean_loss_vector(model, s);
        for (std::size_t i = 0; i < k; ++i) {
          double got = reconstruct_mean(cover, x, means, s, i);
          double err = std::abs(got - mu[i]) / std::max(1.0, std::abs(mu[i]));
          worst = std::max(worst, err);
          ++comparisons;
          if (err > 1e-9) ++failures;
        }
      });
    }
    rep.checks.push_back({"reconstruction_m" + std::to_string(m), failures == 0,
                          Json{{"instances", n},
                               {"comparisons", comparisons},
                               {"failures", failures},
                               {"max_relative_error", worst},
                               {"tolerance", 1e-9},
                               {"max_cover_size", max_cover}}});
  }
  return rep;
}

// ---------------------------------------------------------------------------

inline SuiteReport verify_lp(const VerifyOptions& o) {
  SuiteReport rep{"lp", {}};
  const std::size_t n = detail::trials(o, 200);
  detail::note(o, "lp 2-approximation");
  for (bool with_fixing : {false, true}) {
    std::size_t bad_ratio = 0, bad_bound = 0, bad_half = 0, bad_valid = 0;
    double worst_ratio = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      ExperimentConfig cfg;
      cfg.k = 4 + t % 15;  // 4..18
      cfg.alpha = 0.0;
      cfg.lambda = 1.5 + static_cast<double>(t % 9);
      cfg.p = 0.1 + 0.1 * static_cast<double>(t % 6);
      cfg.seed = child_seed(o.seed, t, with_fixing ? 201 : 200);
      auto inst = generate_instance(cfg);
      auto costs = vertex_costs(inst.graph, true_means(inst.model), with_fixing);
      auto sol = lp_best_state_m1(inst.graph, costs);
      double opt = std::numeric_limits<double>::infinity();
      for_each_valid_state(inst.graph, [&](const CriteriaState& s) { opt = std::min(opt, costs.objective(s)); });
      const double tol = 1e-9 * std::max(1.0, opt);
      if (!validate_state(inst.graph, sol.state)) ++bad_valid;
      if (sol.rounded_value > 2.0 * opt + tol) ++bad_ratio;
      if (sol.lp_value > opt + tol) ++bad_bound;
      for (double y : sol.y)
        if (std::abs(2.0 * y - std::round(2.0 * y)) > 1e-9) {
          ++bad_half;
          break;
        }
      if (opt > 0.0) worst_ratio = std::max(worst_ratio, sol.rounded_value / opt);
    }
    std::string name = with_fixing ? "lp_two_approx_with_fixing_costs" : "lp_two_approx";
    rep.checks.push_back({name, bad_ratio + bad_bound + bad_half + bad_valid == 0,
                          Json{{"instances", n},
                               {"ratio_violations", bad_ratio},
                               {"lower_bound_violations", bad_bound},
                               {"non_half_integral", bad_half},
                               {"invalid_states", bad_valid},
                               {"max_rounded_over_opt", worst_ratio}}});
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace detail {

struct TrialOutcome {
  double total_loss = 0.0;
  double regret = 0.0;
  std::size_t oracle_calls = 0;
};

inline Instance verify_instance(std::size_t k, double alpha, double lambda, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.k = k;
  cfg.alpha = alpha;
  cfg.lambda = lambda;
  cfg.seed = seed;
  return generate_instance(cfg);
}

inline TrialOutcome run_trial(const Instance& inst, const OptimalState& best, AlgorithmId alg, std::size_t T,
                              const TrialSeeds& seeds, const StochasticParams& params) {
  RunOptions ro;
  ro.T = T;
  ro.seed = seeds.losses;
  auto tr = run_stochastic(inst, alg, ro, params, seeds.oracle);
  return {tr.total_loss(), pseudo_regret(tr, best.value), tr.oracle_calls};
}

/// Mean pseudo-regret per horizon for one algorithm over `n` generated instances.
inline Json scaling_check(const VerifyOptions& o, AlgorithmId alg, double alpha, std::uint64_t stream, std::size_t n,
                          const std::vector<std::size_t>& horizons, double allowed_growth, bool& passed,
                          std::size_t& call_violations) {
  std::vector<std::vector<double>> regret(horizons.size());
  call_violations = 0;
  for (std::size_t s = 0; s < n; ++s) {
    auto seeds = trial_seeds(child_seed(o.seed, stream), s);
    auto inst = verify_instance(10, alpha, 10.0, seeds.instance);
    auto best = optimal_state(inst.graph, inst.model);
    for (std::size_t h = 0; h < horizons.size(); ++h) {
      auto out = run_trial(inst, best, alg, horizons[h], seeds, o.params);
      regret[h].push_back(out.regret);
      const double bound = 11.0 + 2.0 * 10.0 * std::log2(static_cast<double>(horizons[h]));
      if (alg != AlgorithmId::ExploreExploit && static_cast<double>(out.oracle_calls) > bound) ++call_violations;
    }
  }
  Json series = Json::array();
  std::vector<double> means;
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    means.push_back(mean_of(regret[h]));
    series.push_back(Json{{"T", horizons[h]}, {"mean_regret", means.back()},
                          {"regret_per_step", means.back() / static_cast<double>(horizons[h])}});
  }
  // horizons are {T/2, T, 2T, 4T} with T = 2e4 at index 1 and 4T at index 3
  const double growth = means[3] / means[1];
  bool decreasing = true;
  for (std::size_t h = 1; h < horizons.size(); ++h)
    decreasing = decreasing && means[h] / static_cast<double>(horizons[h]) <
                                   means[h - 1] / static_cast<double>(horizons[h - 1]);
  passed = growth <= allowed_growth && decreasing && call_violations == 0;
  return Json{{"seeds", n},
              {"series", series},
              {"growth_4x_horizon", growth},
              {"allowed_growth", allowed_growth},
              {"regret_per_step_decreasing", decreasing}};
}

/// Fraction of seeds where `a` accumulates strictly less loss than `b`.
inline Json comparison_check(const VerifyOptions& o, std::size_t k, double alpha, AlgorithmId a, AlgorithmId b,
                             std::size_t T, std::uint64_t stream, std::size_t n, std::size_t& wins) {
  wins = 0;
  std::vector<double> la, lb;
  for (std::size_t s = 0; s < n; ++s) {
    auto seeds = trial_seeds(child_seed(o.seed, stream), s);
    auto inst = verify_instance(k, alpha, 10.0, seeds.instance);
    auto best = optimal_state(inst.graph, inst.model);
    auto ra = run_trial(inst, best, a, T, seeds, o.params);
    auto rb = run_trial(inst, best, b, T, seeds, o.params);
    la.push_back(ra.total_loss);
    lb.push_back(rb.total_loss);
    if (ra.total_loss < rb.total_loss) ++wins;
  }
  return Json{{"k", k},
              {"alpha", alpha},
              {"T", T},
              {"seeds", n},
              {"wins", wins},
              {"mean_loss_" + to_string(a), mean_of(la)},
              {"mean_loss_" + to_string(b), mean_of(lb)}};
}

}  // namespace detail

inline SuiteReport verify_regret_scaling(const VerifyOptions& o) {
  SuiteReport rep{"regret_scaling", {}};
  const std::size_t n = detail::trials(o, 20);
  const std::vector<std::size_t> horizons{10000, 20000, 40000, 80000};
  {
    detail::note(o, "explore_exploit regret scaling");
    bool ok = false;
    std::size_t calls = 0;
    auto d = detail::scaling_check(o, AlgorithmId::ExploreExploit, 0.5, 300, n, horizons,
                                   std::pow(4.0, 2.0 / 3.0) * 1.5, ok, calls);
    rep.checks.push_back({"explore_exploit_scaling", ok, d});
  }
  {
    detail::note(o, "ucb_m1 regret scaling");
    bool ok = false;
    std::size_t calls = 0;
    auto d = detail::scaling_check(o, AlgorithmId::UcbM1, 0.0, 301, n, horizons, 2.0 * 1.5, ok, calls);
    d["oracle_call_violations"] = calls;
    rep.checks.push_back({"ucb_scaling", ok, d});
  }
  {
    Json runs = Json::array();
    bool ok = true;
    for (std::size_t k : {10, 50}) {
      detail::note(o, "ucb_m1 vs explore_exploit k=" + std::to_string(k));
      std::size_t wins = 0;
      auto d = detail::comparison_check(o, k, 0.0, AlgorithmId::UcbM1, AlgorithmId::ExploreExploit, 100000, 302 + k, n,
                                        wins);
      ok = ok && static_cast<double>(wins) >= 0.7 * static_cast<double>(n);
      runs.push_back(d);
    }
    rep.checks.push_back({"m1_comparison", ok, Json{{"required_win_fraction", 0.7}, {"runs", runs}}});
  }
  {
    detail::note(o, "ucb_general vs explore_exploit alpha=0.1");
    std::size_t wins = 0;
    auto d = detail::comparison_check(o, 50, 0.1, AlgorithmId::UcbGeneral, AlgorithmId::ExploreExploit, 100000, 400,
                                      n, wins);
    d["required"] = "majority";
    rep.checks.push_back({"alpha_tradeoff", 2 * wins > n, d});
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace detail {

inline GroupedSequence random_steps(std::size_t k, std::size_t T, double B, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> vertex(0, k - 1);
  std::uniform_int_distribution<int> count(0, 3);
  std::uniform_real_distribution<double> loss(0.0, B);
  GroupedSequence out(T);
  for (auto& step : out) {
    int c = count(rng);
    for (int e = 0; e < c; ++e) step.push_back({vertex(rng), loss(rng)});
  }
  return out;
}

}  // namespace detail

inline SuiteReport verify_adversarial_ratio(const VerifyOptions& o) {
  SuiteReport rep{"adversarial_ratio", {}};
  {
    auto g = path2_graph(10.0);
    auto seq = path2_sequence(10, 5);
    double opt = offline_opt(g, seq);
    double naive = run_naive_ski_rental(g, seq).total_loss;
    auto barrier = run_barrier(g, seq, true);
    double first_phase = barrier.trace.at(9).cumulative_loss;
    bool ok = opt == 15.0 && naive == 110.0 && first_phase == 20.0;
    rep.checks.push_back({"path2_crafted", ok,
                          Json{{"C", 10},
                               {"rounds", 5},
                               {"offline_opt", opt},
                               {"naive_ski_rental", naive},
                               {"barrier_first_phase", first_phase},
                               {"barrier_total", barrier.total_loss}}});
  }
  {
    detail::note(o, "competitive ratio fuzz");
    const std::size_t n = detail::trials(o, 600);
    std::mt19937_64 rng(child_seed(o.seed, 0, 500));
    std::uniform_int_distribution<std::size_t> kd(2, 8), Td(1, 60);
    std::uniform_real_distribution<double> pd(0.1, 0.7);
    std::size_t violations = 0;
    double worst = 0.0;
    double worst_fraction = 0.0;  // ratio relative to its bound
    for (std::size_t t = 0; t < n; ++t) {
      const double B = t % 2 ? 5.0 : 1.0;
      auto g = random_graph(kd(rng), pd(rng), rng);
      auto steps = detail::random_steps(g.size(), Td(rng), B, rng);
      auto seq = flatten(steps);
      double alg = run_barrier(g, seq).total_loss;
      double opt = offline_opt(g, seq);
      auto r = competitive_ratio(alg, opt);
      if (r.infinite || alg > (2.0 * B + 4.0) * opt + 1e-9) ++violations;
      if (!r.infinite) {
        worst = std::max(worst, r.value);
        worst_fraction = std::max(worst_fraction, r.value / (2.0 * B + 4.0));
      }
    }
    rep.checks.push_back({"barrier_ratio_fuzz", violations == 0,
                          Json{{"sequences", n},
                               {"violations", violations},
                               {"max_ratio", worst},
                               {"max_ratio_over_bound", worst_fraction}}});
  }
  {
    const std::size_t n = detail::trials(o, 200);
    std::mt19937_64 rng(child_seed(o.seed, 0, 501));
    std::uniform_int_distribution<std::size_t> kd(1, 8), Td(1, 60);
    std::uniform_int_distribution<int> cd(1, 5);
    std::size_t violations = 0;
    double worst = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t k = kd(rng);
      std::vector<double> costs(k);
      for (auto& c : costs) c = cd(rng);
      IncompatibilityGraph g(k, {}, costs);
      std::uniform_int_distribution<std::size_t> vd(0, k - 1);
      ComplaintSequence seq(Td(rng));
      for (auto& c : seq) c = {vd(rng), 1.0};
      double alg = run_barrier(g, seq).total_loss;
      double opt = offline_opt(g, seq);
      if (alg > 2.0 * opt + 1e-9) ++violations;
      if (opt > 0) worst = std::max(worst, alg / opt);
    }
    rep.checks.push_back({"edgeless_ski_rental", violations == 0,
                          Json{{"sequences", n}, {"violations", violations}, {"max_ratio", worst}}});
  }
  return rep;
}

// ---------------------------------------------------------------------------

inline std::vector<SuiteReport> run_verify(const std::string& suite, const VerifyOptions& o) {
  std::vector<SuiteReport> out;
  auto want = [&](const char* name) { return suite == "all" || suite == name; };
  if (suite != "all" && std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    throw UsageError("unknown suite '" + suite + "' (expected reconstruction|lp|regret_scaling|adversarial_ratio|all)");
  if (want("reconstruction")) out.push_back(verify_reconstruction(o));
  if (want("lp")) out.push_back(verify_lp(o));
  if (want("regret_scaling")) out.push_back(verify_regret_scaling(o));
  if (want("adversarial_ratio")) out.push_back(verify_adversarial_ratio(o));
  return out;
}

inline Json report_json(const std::string& suite, const VerifyOptions& o, const std::vector<SuiteReport>& reports) {
  Json j;
  j["suite"] = suite;
  j["seed"] = o.seed;
  j["parameters"] = Json{{"explore_scale", o.params.explore_scale},
                         {"ucb_scale", o.params.ucb_scale},
                         {"B", o.params.B},
                         {"oracle", to_string(o.params.oracle)}};
  bool all = true;
  Json suites = Json::array();
  for (const auto& r : reports) {
    Json checks = Json::array();
    for (const auto& c : r.checks) checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    suites.push_back(Json{{"suite", r.suite}, {"passed", r.passed()}, {"checks", checks}});
    all = all && r.passed();
  }
  j["passed"] = all;
  j["suites"] = suites;
  return j;
}

}  // namespace fairres

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fairres/random_instances.hpp"
#include "fairres/stochastic.hpp"

using namespace fairres;

namespace {

struct Small {
  IncompatibilityGraph g;
  CorrelationModel model;
};

Small small_instance(std::uint64_t seed, std::size_t k, std::size_t m, std::size_t extra) {
  std::mt19937_64 rng(seed);
  auto g = random_graph(k, 0.3, rng);
  auto model = random_model(k, m, extra, rng);
  return {std::move(g), std::move(model)};
}

RunOptions opts(std::size_t T, std::uint64_t seed, LossDistribution dist = LossDistribution::exponential()) {
  RunOptions o;
  o.T = T;
  o.seed = seed;
  o.dist = dist;
  return o;
}

ExploreExploitParams ee_params() {
  ExploreExploitParams p;
  p.scale = 1.0;
  return p;
}

}  // namespace

TEST_CASE("simulator records the trace") {
  auto inst = small_instance(1, 4, 1, 0);
  Simulator sim(inst.g, inst.model, opts(3, 7, LossDistribution::constant()));
  CHECK(sim.structure().set_count() == inst.model.set_count());
  for (const auto& c : sim.structure().sets())
    for (double v : c.theta) CHECK(v == 0.0);
  sim.step(Action::fix(0));
  sim.step(Action::null());
  sim.step(Action::unfix(0));
  CHECK(sim.done());
  CHECK_THROWS_AS(sim.step(Action::null()), InvariantError);
  auto tr = sim.finish();
  REQUIRE(tr.length() == 3);
  CHECK(tr.state(0) == CriteriaState::with_fixed(4, {0}));
  CHECK(tr.state(2) == CriteriaState(4));
  CHECK(tr.steps[0].fix_cost == inst.g.cost(0));
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(tr.steps[t].realized_loss == Catch::Approx(expected_state_loss(inst.model, tr.state(t))));
    CHECK(tr.steps[t].expected_loss == Catch::Approx(expected_state_loss(inst.model, tr.state(t))));
  }
  CHECK(tr.total_loss() == Catch::Approx(tr.total_fixing_cost() + tr.steps[0].realized_loss +
                                         tr.steps[1].realized_loss + tr.steps[2].realized_loss));
}

TEST_CASE("pseudo-regret definition") {
  auto inst = small_instance(2, 5, 2, 3);
  auto best = optimal_state(inst.g, inst.model);
  RunOptions o = opts(50, 1);
  o.initial = best.state;
  Simulator sim(inst.g, inst.model, o);
  while (!sim.done()) sim.step(Action::null());
  for (double r : pseudo_regret_series(sim.finish(), best.value)) CHECK(std::abs(r) < 1e-9);

  auto states = enumerate_valid_states(inst.g);
  CriteriaState other = states.front() == best.state ? states.back() : states.front();
  double gap = expected_state_loss(inst.model, other) - best.value;
  RunOptions p = opts(40, 1);
  p.initial = other;
  Simulator pinned(inst.g, inst.model, p);
  while (!pinned.done()) pinned.step(Action::null());
  auto series = pseudo_regret_series(pinned.finish(), expected_state_loss(inst.model, other) - 1.0);
  for (std::size_t t = 0; t < series.size(); ++t) CHECK(series[t] == Catch::Approx(double(t + 1)));
  CHECK(gap >= 0.0);
}

TEST_CASE("exploration length formula") {
  double expect = std::pow(2e4, 2.0 / 3.0) * std::cbrt(std::log(11.0 * 10.0 * 2e4)) / std::pow(11.0, 2.0 / 3.0);
  CHECK(exploration_length(20000, 11, 10, 1.0) == static_cast<std::size_t>(std::ceil(expect)));
  CHECK(exploration_length(20000, 11, 10, 10.0) == static_cast<std::size_t>(std::ceil(10 * expect)));
}

TEST_CASE("explore-exploit with noiseless losses exploits the optimum") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = small_instance(100 + seed, 3 + seed % 8, 1 + seed % 3, 4);
    Simulator sim(inst.g, inst.model, opts(60000, seed, LossDistribution::constant()));
    auto tr = run_explore_exploit(sim, ee_params());
    auto best = optimal_state(inst.g, inst.model);
    auto chosen = CriteriaState::from_string(tr.meta.at("exploit_state"));
    CHECK(expected_state_loss(inst.model, chosen) == Catch::Approx(best.value).epsilon(1e-9));
    CHECK(tr.oracle_calls == 1);

    // regret is flat once the exploit state is reached
    auto series = pseudo_regret_series(tr, best.value);
    std::size_t start = std::stoul(tr.meta.at("explore_steps")) + inst.g.size();
    CHECK(series.back() == Catch::Approx(series[start]).margin(1e-6));
  }
}

TEST_CASE("explore-exploit phase lengths") {
  auto inst = small_instance(5, 8, 2, 6);
  Simulator sim(inst.g, inst.model, opts(50000, 3));
  auto tr = run_explore_exploit(sim, ee_params());
  CHECK(tr.length() == 50000);
  std::size_t r = std::stoul(tr.meta.at("cover_size"));
  std::size_t N = std::stoul(tr.meta.at("explore_N"));
  std::size_t explore = std::stoul(tr.meta.at("explore_steps"));
  CHECK(explore >= r * N);
  CHECK(explore <= r * N + r * 8);
  for (std::size_t t = 0; t < tr.length(); ++t) CHECK(validate_state(inst.g, tr.state(t)));
}

TEST_CASE("explore-exploit on a single vertex compares the two states") {
  IncompatibilityGraph g(1, {}, {2.0});
  CorrelationModel m(1, {{{0}, {3.0, 1.0}}});
  Simulator sim(g, m, opts(5000, 1, LossDistribution::constant()));
  auto tr = run_explore_exploit(sim, ee_params());
  CHECK(tr.meta.at("cover_size") == "2");
  CHECK(tr.meta.at("exploit_state") == "1");
  CHECK(tr.state(tr.length() - 1) == CriteriaState::from_string("1"));
}

TEST_CASE("explore-exploit rejects short horizons") {
  auto inst = small_instance(6, 10, 2, 5);
  Simulator sim(inst.g, inst.model, opts(20000, 1));
  ExploreExploitParams p;  // literal leading constant 10
  CHECK_THROWS_AS(run_explore_exploit(sim, p), ConfigError);
}

TEST_CASE("episode length is the minimum count") {
  CorrelationModel m(3, {{{0}, {1, 1}}, {{1}, {1, 1}}, {{2}, {1, 1}}});
  LocalEstimates est(m);
  auto s = CriteriaState::from_string("010");
  auto z = CriteriaState(3);
  for (int t = 0; t < 5; ++t) est.observe(0, est.key(0, s), 1.0);
  for (int t = 0; t < 3; ++t) est.observe(1, est.key(1, s), 1.0);
  for (int t = 0; t < 7; ++t) est.observe(2, est.key(2, s), 1.0);
  CHECK(episode_length(est, s) == 3);
  CHECK(episode_length(est, z) == 1);  // vertex 1 unfixed never seen
  for (int t = 0; t < 4; ++t) est.observe(1, est.key(1, z), 1.0);
  for (int t = 0; t < 9; ++t) est.observe(2, est.key(2, z), 1.0);
  CHECK(episode_length(est, z) == 4);
}

TEST_CASE("episode length clamps to one") {
  CorrelationModel m(2, {{{0, 1}, {1, 1, 1, 1}}});
  LocalEstimates est(m);
  CHECK(est.scope(0) == std::vector<std::size_t>{0, 1});
  CHECK(episode_length(est, CriteriaState(2)) == 1);
  est.observe(0, 0, 1.0);
  est.observe(1, 0, 1.0);
  est.observe(1, 0, 1.0);
  CHECK(episode_length(est, CriteriaState(2)) == 1);
  est.observe(0, 0, 1.0);
  CHECK(episode_length(est, CriteriaState(2)) == 2);
}

TEST_CASE("optimistic values") {
  LocalEstimates::Stat st{4, 8.0};
  CHECK(optimistic_value(st, 2.0) == Catch::Approx(1.0));
  CHECK(optimistic_value({}, 2.0) == 0.0);
  UcbParams p;
  p.scale = 1.0;
  p.B = 2.0;
  double expect = 2.0 * std::sqrt(std::log(10.0 * 1000.0 * std::pow(1000.0, 4)));
  CHECK(ucb_width(p, 10, 1000, 1) == Catch::Approx(expect));
  CHECK(ucb_width(p, 10, 1000, 2) == Catch::Approx(expect * std::sqrt(2.0)));
}

TEST_CASE("ucb with noiseless losses settles on the optimum") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = small_instance(200 + seed, 3 + seed % 8, 1, 0);
    UcbParams p;
    p.B = 0.0;  // no noise to cover
    Simulator sim(inst.g, inst.model, opts(3000, seed, LossDistribution::constant()));
    std::size_t first_call = 0;
    p.observer = [&](std::size_t t, const LocalEstimates&, double) {
      if (first_call == 0) first_call = t;
    };
    auto tr = run_ucb_m1(sim, p);
    auto best = optimal_state(inst.g, inst.model);
    // every step after the first decision sits in an optimal state
    for (std::size_t t = first_call + inst.g.size(); t < tr.length(); ++t)
      CHECK(tr.steps[t].expected_loss == Catch::Approx(best.value).epsilon(1e-9));
    CHECK(std::stoul(tr.meta.at("state_switches")) <= 1);
  }
}

TEST_CASE("general ucb with noiseless losses converges") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = small_instance(300 + seed, 4 + seed % 7, 2 + seed % 2, 4);
    UcbParams p;
    p.B = 0.0;
    Simulator sim(inst.g, inst.model, opts(4000, seed, LossDistribution::constant()));
    auto tr = run_ucb_general(sim, p);
    auto best = optimal_state(inst.g, inst.model);
    CHECK(tr.steps.back().expected_loss == Catch::Approx(best.value).epsilon(1e-9));
    CHECK(tr.steps[tr.length() - 100].expected_loss == Catch::Approx(best.value).epsilon(1e-9));
  }
}

TEST_CASE("ucb oracle calls stay logarithmic") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto inst = small_instance(400 + seed, 10, 1, 0);
    UcbParams p;
    p.scale = 1.0;
    Simulator sim(inst.g, inst.model, opts(20000, seed));
    auto tr = run_ucb_m1(sim, p);
    CHECK(tr.oracle_calls <= 11 + 2 * 10 * std::log2(20000.0));
  }
}

TEST_CASE("general ucb matches ucb_m1 on singleton models") {
  auto inst = small_instance(9, 9, 1, 0);
  UcbParams p;
  p.scale = 1.0;
  Simulator a(inst.g, inst.model, opts(5000, 4));
  Simulator b(inst.g, inst.model, opts(5000, 4));
  auto ta = run_ucb_m1(a, p);
  auto tb = run_ucb_general(b, p);
  REQUIRE(ta.length() == tb.length());
  for (std::size_t t = 0; t < ta.length(); ++t) {
    CHECK(ta.state(t) == tb.state(t));
    CHECK(ta.steps[t].action == tb.steps[t].action);
    CHECK(ta.steps[t].realized_loss == tb.steps[t].realized_loss);
  }
  CHECK(ta.oracle_calls == tb.oracle_calls);
}

TEST_CASE("ucb_m1 rejects larger sets") {
  auto inst = small_instance(10, 5, 2, 3);
  Simulator sim(inst.g, inst.model, opts(100, 1));
  CHECK_THROWS_AS(run_ucb_m1(sim, {}), ModeError);
}

TEST_CASE("optimistic estimates stay below the truth") {
  std::size_t checks = 0;
  std::size_t optimistic = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = small_instance(500 + seed, 6, 1, 0);
    UcbParams p;  // default width constant, delta = 1/T^4
    p.observer = [&](std::size_t, const LocalEstimates& est, double width) {
      for (std::size_t i = 0; i < est.size(); ++i) {
        est.for_each_seen(i, [&](std::uint64_t u, const LocalEstimates::Stat& st) {
          CriteriaState s(est.size());
          for (std::size_t t = 0; t < est.scope(i).size(); ++t)
            if ((u >> t) & 1U) s.set(est.scope(i)[t], true);
          double truth = mean_loss_vector(inst.model, s)[i];
          ++checks;
          if (optimistic_value(st, width) <= truth) ++optimistic;
        });
      }
    };
    Simulator sim(inst.g, inst.model, opts(3000, seed));
    run_ucb_m1(sim, p);
  }
  REQUIRE(checks > 0);
  CHECK(static_cast<double>(optimistic) >= 0.99 * static_cast<double>(checks));
}

TEST_CASE("eager mode visits every local configuration first") {
  auto inst = small_instance(11, 6, 2, 3);
  UcbParams p;
  p.mode = UcbMode::Eager;
  p.scale = 1.0;
  bool checked = false;
  p.observer = [&](std::size_t, const LocalEstimates& est, double) {
    if (checked) return;
    checked = true;
    for (std::size_t i = 0; i < est.size(); ++i) {
      const auto& sc = est.scope(i);
      for (std::uint64_t u = 0; u < (std::uint64_t{1} << sc.size()); ++u) {
        CriteriaState s(est.size());
        for (std::size_t t = 0; t < sc.size(); ++t)
          if ((u >> t) & 1U) s.set(sc[t], true);
        if (validate_state(inst.g, s)) CHECK(est.stat(i, u).count > 0);
      }
    }
  };
  Simulator sim(inst.g, inst.model, opts(3000, 2));
  auto tr = run_ucb_general(sim, p);
  CHECK(checked);
  CHECK(tr.meta.at("ucb_mode") == "eager");

  p.eager_cap = 4;
  Simulator small(inst.g, inst.model, opts(3000, 2));
  CHECK_THROWS_AS(run_ucb_general(small, p), CapacityError);
}

TEST_CASE("runs are deterministic") {
  auto inst = small_instance(12, 8, 2, 5);
  UcbParams p;
  p.scale = 1.0;
  Simulator a(inst.g, inst.model, opts(4000, 9));
  Simulator b(inst.g, inst.model, opts(4000, 9));
  auto ta = run_ucb_general(a, p);
  auto tb = run_ucb_general(b, p);
  CHECK(ta.states == tb.states);
  for (std::size_t t = 0; t < ta.length(); ++t) CHECK(ta.steps[t].realized_loss == tb.steps[t].realized_loss);
  Simulator c(inst.g, inst.model, opts(40000, 9));
  Simulator d(inst.g, inst.model, opts(40000, 9));
  CHECK(run_explore_exploit(c, ee_params()).total_loss() == run_explore_exploit(d, ee_params()).total_loss());
}

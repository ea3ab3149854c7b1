#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fairres/oracle.hpp"
#include "fairres/random_instances.hpp"

using namespace fairres;

namespace {

CriteriaState st(const char* bits) { return CriteriaState::from_string(bits); }

MeanFunction zero_means(std::size_t k) {
  return MeanFunction::separable(std::vector<double>(k, 0.0), std::vector<double>(k, 0.0));
}

VertexCosts random_costs(std::size_t k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 5.0);
  VertexCosts c{std::vector<double>(k), std::vector<double>(k)};
  for (std::size_t i = 0; i < k; ++i) {
    c.unfixed[i] = u(rng);
    c.fixed[i] = u(rng);
  }
  return c;
}

double brute_force(const IncompatibilityGraph& g, const VertexCosts& c) {
  double best = std::numeric_limits<double>::infinity();
  for_each_valid_state(g, [&](const CriteriaState& s) { best = std::min(best, c.objective(s)); });
  return best;
}

}  // namespace

TEST_CASE("exact oracle examples") {
  IncompatibilityGraph tri(3, {{0, 1}, {1, 2}, {0, 2}}, {1, 1, 1});
  CHECK(best_state_exact(tri, zero_means(3)).state == st("000"));

  IncompatibilityGraph free(4, {}, std::vector<double>(4, 1.0));
  auto f = MeanFunction::separable({3, 2, 5, 1}, {1, 1, 4, 0.5});
  CHECK(best_state_exact(free, f).state == st("1111"));

  auto h = MeanFunction::separable({3, 2, 5}, {1, 1, 4});
  auto r = best_state_exact(tri, h);
  CHECK(r.state == st("100"));
  CHECK(r.value == Catch::Approx(1 + 2 + 5));

  auto none = MeanFunction::separable({1, 1, 1}, {2, 2, 2});
  CHECK(best_state_exact(tri, none).state == st("000"));

  IncompatibilityGraph big(23, {}, std::vector<double>(23, 1.0));
  CHECK_THROWS_AS(best_state_exact(big, zero_means(23)), CapacityError);
}

TEST_CASE("exact oracle agrees with direct recomputation of g") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_graph(3 + trial % 8, 0.3, rng);
    auto model = random_model(g.size(), 3, 5, rng);
    auto r = best_state_exact(g, true_means(model));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : enumerate_valid_states(g)) best = std::min(best, expected_state_loss(model, s));
    CHECK(r.value == Catch::Approx(best).epsilon(1e-12));
    CHECK(expected_state_loss(model, r.state) == Catch::Approx(r.value).epsilon(1e-12));
  }
}

TEST_CASE("LP on an edgeless graph is the per-vertex optimum") {
  IncompatibilityGraph free(4, {}, std::vector<double>(4, 1.0));
  VertexCosts c{{3, 1, 5, 2}, {1, 2, 4, 2}};
  auto sol = lp_best_state_m1(free, c);
  CHECK(sol.state == st("1010"));
  CHECK(sol.y == std::vector<double>{0, 1, 0, 1});
  CHECK(sol.lp_value == Catch::Approx(brute_force(free, c)));
  CHECK(sol.rounded_value == Catch::Approx(sol.lp_value));
}

TEST_CASE("LP on a single edge with equal gains is half-integral") {
  IncompatibilityGraph edge(2, {{0, 1}}, {1, 1});
  VertexCosts c{{1, 1}, {0, 0}};
  auto sol = lp_best_state_m1(edge, c);
  CHECK(sol.y == std::vector<double>{0.5, 0.5});
  CHECK(sol.lp_value == Catch::Approx(1.0));
  CHECK(sol.state == st("00"));
  CHECK(sol.rounded_value == Catch::Approx(2.0));
  CHECK(sol.rounded_value <= 2.0 * sol.lp_value + 1e-12);
}

TEST_CASE("LP bounds on random instances") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t k = trial < 200 ? 3 : 4 + trial % 15;
    auto g = random_graph(k, trial < 200 ? 1.0 : 0.3, rng);
    auto c = random_costs(k, rng);
    auto sol = lp_best_state_m1(g, c);
    double opt = brute_force(g, c);
    CHECK(validate_state(g, sol.state));
    CHECK(sol.lp_value <= opt + 1e-9);
    CHECK(sol.rounded_value <= 2.0 * opt + 1e-9);
    CHECK(sol.rounded_value <= 2.0 * sol.lp_value + 1e-9);
    for (double y : sol.y) {
      double twice = 2.0 * y;
      CHECK(std::abs(twice - std::round(twice)) <= 1e-9);
    }
    for (const auto& e : g.edges()) CHECK(sol.y[e.u] + sol.y[e.v] >= 1.0 - 1e-9);
  }
}

TEST_CASE("vertex costs from a separable mean function") {
  IncompatibilityGraph g(2, {}, {2, 3});
  auto f = MeanFunction::separable({5, 6}, {1, 2});
  auto pure = vertex_costs(g, f, false);
  CHECK(pure.unfixed == std::vector<double>{5, 6});
  CHECK(pure.fixed == std::vector<double>{1, 2});
  auto faithful = vertex_costs(g, f, true);
  CHECK(faithful.fixed == std::vector<double>{3, 5});

  CorrelationModel pair(2, {{{0, 1}, {1, 1, 1, 1}}});
  CHECK_FALSE(true_means(pair).separable());
  CHECK_THROWS_AS(vertex_costs(g, true_means(pair), false), ModeError);
}

TEST_CASE("local search contracts") {
  IncompatibilityGraph g(4, {{0, 1}}, std::vector<double>(4, 1.0));
  auto start = st("0110");
  auto r = local_descent(g, zero_means(4), start);
  CHECK(r.state == start);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto h = random_graph(10, 0.3, rng);
    auto model = random_model(10, 2, 10, rng);
    std::vector<double> trace;
    auto res = local_descent(h, true_means(model), detail::random_valid_state(h, rng), &trace);
    for (std::size_t t = 1; t < trace.size(); ++t) CHECK(trace[t] < trace[t - 1]);
    CHECK(validate_state(h, res.state));
  }
}

TEST_CASE("local search quality against enumeration") {
  std::mt19937_64 rng(99);
  int good = 0;
  const int seeds = 100;
  for (int trial = 0; trial < seeds; ++trial) {
    auto g = random_graph(12, 2.0 * std::log(12.0) / 12.0, rng);
    auto model = random_model(12, 2, 12, rng);
    auto f = true_means(model);
    std::mt19937_64 ls(trial);
    auto approx = best_state_local_search(g, f, 16, ls);
    auto exact = best_state_exact(g, f);
    CHECK(approx.value >= exact.value - 1e-9);
    if (approx.value <= 1.05 * exact.value + 1e-12) ++good;
  }
  CHECK(good >= 90);
}

TEST_CASE("local search is deterministic given the seed") {
  std::mt19937_64 rng(1);
  auto g = random_graph(14, 0.2, rng);
  auto model = random_model(14, 3, 10, rng);
  std::mt19937_64 a(42), b(42);
  auto ra = best_state_local_search(g, true_means(model), 8, a);
  auto rb = best_state_local_search(g, true_means(model), 8, b);
  CHECK(ra.state == rb.state);
}

TEST_CASE("stateful oracle dispatch") {
  std::mt19937_64 rng(3);
  auto g = random_graph(8, 0.3, rng);
  auto model = random_model(8, 1, 0, rng);
  auto f = true_means(model);
  BestStateOracle oracle(g, {});
  CHECK(oracle.resolve(f) == OracleKind::Exact);
  auto r = oracle.solve(f);
  CHECK(r.state == best_state_exact(g, f).state);
  CHECK(oracle.calls() == 1);

  BestStateOracle lp(g, {OracleKind::Lp});
  auto rl = lp.solve(f);
  CHECK(rl.value <= 2.0 * r.value + 1e-9);
  CHECK(parse_oracle_kind("local") == OracleKind::Local);
  CHECK_THROWS_AS(parse_oracle_kind("simplex"), UsageError);

  auto best = optimal_state(g, model);
  CHECK_FALSE(best.approximate);
  CHECK(best.state == r.state);
}

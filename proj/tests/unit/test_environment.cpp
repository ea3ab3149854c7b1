#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fairres/environment.hpp"
#include "fairres/random_instances.hpp"

using namespace fairres;

TEST_CASE("correlation model validation") {
  CHECK_THROWS_AS(CorrelationModel(2, {{{0}, {1.0}}}), DimensionError);
  CHECK_THROWS_AS(CorrelationModel(2, {{{1, 0}, {1, 1, 1, 1}}}), InvariantError);
  CHECK_THROWS_AS(CorrelationModel(2, {{{0}, {1.0, -1.0}}}), InvariantError);
  CHECK_THROWS_AS(CorrelationModel(2, {{{2}, {1.0, 1.0}}}), DimensionError);
}

TEST_CASE("mean_loss_vector examples") {
  CorrelationModel zero(2, {{{0}, {0, 0}}, {{1}, {0, 0}}});
  CHECK(mean_loss_vector(zero, CriteriaState(2)) == std::vector<double>{0, 0});

  CorrelationModel one(1, {{{0}, {2.0, 0.5}}});
  CHECK(mean_loss_vector(one, CriteriaState::from_string("0"))[0] == 2.0);
  CHECK(mean_loss_vector(one, CriteriaState::from_string("1"))[0] == 0.5);

  CorrelationModel m(3, {{{0}, {1.0, 2.0}}, {{1}, {3.0, 4.0}}, {{2}, {5.0, 6.0}}, {{0, 1}, {0.1, 0.2, 0.3, 0.4}}});
  auto s = CriteriaState::from_string("100");
  auto mu = mean_loss_vector(m, s);
  CHECK(mu[0] == Catch::Approx(2.0 + 0.2));
  CHECK(mu[1] == Catch::Approx(3.0 + 0.2));
  CHECK(mu[2] == Catch::Approx(5.0));
}

TEST_CASE("g sums the mean vector") {
  std::vector<CorrelationSet> sets;
  for (std::size_t i = 0; i < 5; ++i) sets.push_back({{i}, {1.0, 1.0}});
  CHECK(expected_state_loss(CorrelationModel(5, sets), CriteriaState(5)) == 5.0);

  std::mt19937_64 rng(3);
  auto model = random_model(8, 3, 6, rng);
  auto g = random_graph(8, 0.3, rng);
  for (const auto& s : enumerate_valid_states(g)) {
    double sum = 0.0;
    for (double v : mean_loss_vector(model, s)) sum += v;
    CHECK(expected_state_loss(model, s) == Catch::Approx(sum));
  }
}

TEST_CASE("configuration locality") {
  CorrelationModel m(4, {{{1, 3}, {1, 2, 3, 4}}});
  auto a = CriteriaState::from_string("1101");
  auto b = CriteriaState::from_string("0111");
  CHECK(m.theta(0, a) == m.theta(0, b));
  CHECK(m.configuration(0, a) == 3);
}

TEST_CASE("sampling") {
  std::mt19937_64 rng(5);
  auto model = random_model(6, 2, 4, rng);
  auto s = CriteriaState::from_string("100100");
  auto mu = mean_loss_vector(model, s);
  CHECK(sample_losses(model, LossDistribution::constant(), s, rng) == mu);

  CorrelationModel zero(2, {{{0}, {0, 0}}, {{0, 1}, {0, 0, 0, 0}}});
  for (int t = 0; t < 100; ++t)
    for (double v : sample_losses(zero, LossDistribution::exponential(), CriteriaState(2), rng)) CHECK(v == 0.0);

  const int n = 100000;
  std::vector<double> sum(6, 0.0), sq(6, 0.0);
  std::vector<double> out;
  for (int t = 0; t < n; ++t) {
    sample_losses(model, LossDistribution::exponential(), s, rng, out);
    for (std::size_t i = 0; i < 6; ++i) {
      sum[i] += out[i];
      sq[i] += out[i] * out[i];
    }
  }
  for (std::size_t i = 0; i < 6; ++i) {
    double mean = sum[i] / n;
    double var = sq[i] / n - mean * mean;
    double se = std::sqrt(var / n);
    CHECK(std::abs(mean - mu[i]) <= 3.0 * se + 1e-12);
  }

  auto clip = LossDistribution::clipped(0.3);
  for (int t = 0; t < 1000; ++t)
    for (double v : sample_losses(model, clip, s, rng)) CHECK(v <= 0.3 * 4 + 1e-12);
}

TEST_CASE("generate_instance") {
  ExperimentConfig cfg;
  cfg.k = 50;
  cfg.alpha = 0.0;
  cfg.seed = 9;
  auto a = generate_instance(cfg);
  CHECK(a.model.set_count() == 50);
  CHECK(a.model.max_set_size() == 1);

  cfg.alpha = 1.0;
  auto b = generate_instance(cfg);
  CHECK(b.model.set_count() == 100);
  for (const auto& set : b.model.sets()) {
    if (set.members.size() == 1) {
      CHECK(set.theta[0] == Catch::Approx(cfg.lambda * set.theta[1]));
      continue;
    }
    CHECK(set.theta[0] == Catch::Approx(cfg.lambda * set.theta[1]));
    CHECK(set.theta[0] > set.theta[1]);
    CHECK(set.theta[1] == set.theta[2]);
    CHECK(set.theta[1] > set.theta[3]);
  }
  for (double c : b.graph.costs()) CHECK((c >= 1.0 && c <= 5.0));

  auto c = generate_instance(cfg);
  CHECK(b.graph == c.graph);
  CHECK(b.model == c.model);

  cfg.k = 4;
  cfg.alpha = 2.0;
  CHECK_THROWS_AS(generate_instance(cfg), ConfigError);
  cfg.alpha = 0.0;
  cfg.lambda = 1.0;
  CHECK_THROWS_AS(generate_instance(cfg), ConfigError);
}

#pragma once

// Small random graphs, correlation models and complaint sequences for
// property tests and the verify suites.

#include <algorithm>
#include <cstddef>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "fairres/core_model.hpp"
#include "fairres/environment.hpp"

namespace fairres {

template <typename Rng>
IncompatibilityGraph random_graph(std::size_t k, double p, Rng& rng, double cost_min = 1.0, double cost_max = 5.0) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (coin(rng)) edges.emplace_back(i, j);
  std::uniform_real_distribution<double> cost(cost_min, cost_max);
  std::vector<double> costs(k);
  for (auto& c : costs) c = cost(rng);
  return IncompatibilityGraph(k, edges, std::move(costs));
}

/**
 * One singleton per vertex plus `extra` random distinct sets whose sizes are
 * uniform on [2, m]. Theta entries are uniform on [0, scale).
 */
template <typename Rng>
CorrelationModel random_model(std::size_t k, std::size_t m, std::size_t extra, Rng& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> unit(0.0, scale);
  std::vector<CorrelationSet> sets;
  for (std::size_t i = 0; i < k; ++i) sets.push_back({{i}, {unit(rng), unit(rng)}});
  if (m >= 2 && k >= 2) {
    std::set<std::vector<std::size_t>> seen;
    std::vector<std::size_t> all(k);
    for (std::size_t i = 0; i < k; ++i) all[i] = i;
    std::uniform_int_distribution<std::size_t> size_dist(2, std::min(m, k));
    for (std::size_t t = 0; t < extra; ++t) {
      std::shuffle(all.begin(), all.end(), rng);
      std::vector<std::size_t> members(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size_dist(rng)));
      std::sort(members.begin(), members.end());
      if (!seen.insert(members).second) continue;
      std::vector<double> theta(std::size_t{1} << members.size());
      for (auto& v : theta) v = unit(rng);
      sets.push_back({std::move(members), std::move(theta)});
    }
  }
  return CorrelationModel(k, std::move(sets));
}

}  // namespace fairres

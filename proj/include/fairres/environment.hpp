#pragma once

// Correlation-set loss model, loss sampling and the synthetic instance
// generator (Erdos-Renyi conflict graph, Beta(0.5, 0.5) loss parameters).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fairres/core_model.hpp"
#include "fairres/errors.hpp"

namespace fairres {

inline constexpr std::size_t kMaxCorrelationSetSize = 20;

/**
 * One correlation set. `members` is strictly ascending; `theta` has one
 * per-vertex mean for each configuration of the members, where bit t of the
 * configuration index is the fixed bit of members[t].
 */
struct CorrelationSet {
  std::vector<std::size_t> members;
  std::vector<double> theta;

  bool operator==(const CorrelationSet&) const = default;
};

class CorrelationModel {
 public:
  CorrelationModel() = default;

  CorrelationModel(std::size_t k, std::vector<CorrelationSet> sets) : k_(k), sets_(std::move(sets)), by_vertex_(k) {
    for (std::size_t j = 0; j < sets_.size(); ++j) {
      const auto& c = sets_[j];
      if (c.members.empty()) throw InvariantError("empty correlation set");
      if (c.members.size() > kMaxCorrelationSetSize) throw CapacityError("correlation set too large");
      for (std::size_t t = 0; t < c.members.size(); ++t) {
        if (c.members[t] >= k_) throw DimensionError("correlation set member out of range");
        if (t > 0 && c.members[t] <= c.members[t - 1])
          throw InvariantError("correlation set members must be strictly ascending");
        by_vertex_[c.members[t]].push_back(j);
      }
      if (c.theta.size() != (std::size_t{1} << c.members.size()))
        throw DimensionError("theta table must cover all configurations of its set");
      for (double v : c.theta)
        if (!(v >= 0.0) || !std::isfinite(v)) throw InvariantError("theta entries must be finite and >= 0");
      m_ = std::max(m_, c.members.size());
    }
  }

  std::size_t size() const noexcept { return k_; }
  /// Largest correlation set size (m).
  std::size_t max_set_size() const noexcept { return m_; }
  std::size_t set_count() const noexcept { return sets_.size(); }
  const std::vector<CorrelationSet>& sets() const noexcept { return sets_; }
  const CorrelationSet& set(std::size_t j) const { return sets_.at(j); }
  /// Indices of the sets that contain vertex i.
  const std::vector<std::size_t>& sets_of(std::size_t i) const { return by_vertex_.at(i); }

  bool singletons_only() const noexcept { return m_ <= 1; }

  std::size_t configuration(std::size_t j, const CriteriaState& s) const {
    const auto& members = sets_[j].members;
    std::size_t cfg = 0;
    for (std::size_t t = 0; t < members.size(); ++t)
      if (s.fixed(members[t])) cfg |= std::size_t{1} << t;
    return cfg;
  }

  double theta(std::size_t j, const CriteriaState& s) const { return sets_[j].theta[configuration(j, s)]; }

  /// Vertices sharing at least one correlation set with i (ascending, excludes i).
  std::vector<std::size_t> correlated(std::size_t i) const {
    std::set<std::size_t> out;
    for (auto j : by_vertex_.at(i))
      for (auto v : sets_[j].members)
        if (v != i) out.insert(v);
    return {out.begin(), out.end()};
  }

  bool operator==(const CorrelationModel& o) const { return k_ == o.k_ && sets_ == o.sets_; }

 private:
  std::size_t k_ = 0;
  std::size_t m_ = 0;
  std::vector<CorrelationSet> sets_;
  std::vector<std::vector<std::size_t>> by_vertex_;
};

/// Per-vertex expected losses at state s: sum of theta over the sets containing the vertex.
inline std::vector<double> mean_loss_vector(const CorrelationModel& model, const CriteriaState& s) {
  if (s.size() != model.size()) throw DimensionError("state size does not match model");
  std::vector<double> mu(model.size(), 0.0);
  for (std::size_t j = 0; j < model.set_count(); ++j) {
    double th = model.theta(j, s);
    for (auto i : model.set(j).members) mu[i] += th;
  }
  return mu;
}

/// Expected per-step loss of staying in s.
inline double expected_state_loss(const CorrelationModel& model, const CriteriaState& s) {
  double total = 0.0;
  for (double v : mean_loss_vector(model, s)) total += v;
  return total;
}

struct LossDistribution {
  enum class Family { Exponential, ClippedExponential, Constant };

  Family family = Family::Exponential;
  double bound = 1.0;  // clip level B for ClippedExponential

  static LossDistribution exponential() { return {Family::Exponential, 1.0}; }
  static LossDistribution clipped(double b) { return {Family::ClippedExponential, b}; }
  static LossDistribution constant() { return {Family::Constant, 1.0}; }

  template <typename Rng>
  double draw(double mean, Rng& rng) const {
    switch (family) {
      case Family::Constant: return mean;
      case Family::ClippedExponential: return std::min(bound, mean * std::exponential_distribution<double>(1.0)(rng));
      default: return mean * std::exponential_distribution<double>(1.0)(rng);
    }
  }
};

/**
 * One independent draw per (set, member) pair, summed per vertex. Draws are
 * consumed in set order, then member order.
 */
template <typename Rng>
void sample_losses(const CorrelationModel& model, const LossDistribution& dist, const CriteriaState& s, Rng& rng,
                   std::vector<double>& out) {
  out.assign(model.size(), 0.0);
  for (std::size_t j = 0; j < model.set_count(); ++j) {
    double th = model.theta(j, s);
    for (auto i : model.set(j).members) out[i] += dist.draw(th, rng);
  }
}

template <typename Rng>
std::vector<double> sample_losses(const CorrelationModel& model, const LossDistribution& dist,
                                  const CriteriaState& s, Rng& rng) {
  std::vector<double> out;
  sample_losses(model, dist, s, rng, out);
  return out;
}

struct ExperimentConfig {
  std::size_t k = 50;
  double alpha = 0.0;   // average number of random pair sets per vertex
  double lambda = 10.0; // unfixed-loss multiplier
  double cost_min = 1.0;
  double cost_max = 5.0;
  std::optional<double> p;  // edge probability; default 2 ln(k) / k
  std::uint64_t seed = 0;

  double edge_probability() const {
    if (p) return *p;
    if (k < 2) return 0.0;
    return std::min(1.0, 2.0 * std::log(static_cast<double>(k)) / static_cast<double>(k));
  }

  std::size_t pair_count() const { return static_cast<std::size_t>(std::floor(alpha * static_cast<double>(k) + 1e-9)); }

  void validate() const {
    if (k == 0) throw ConfigError("k must be >= 1");
    if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
    if (!(lambda > 1.0)) throw ConfigError("lambda must be > 1");
    if (!(cost_min >= 0.0) || cost_max < cost_min) throw ConfigError("invalid cost range");
    if (p && !(*p > 0.0 && *p <= 1.0)) throw ConfigError("edge probability must be in (0, 1]");
    if (pair_count() > k * (k - 1) / 2)
      throw ConfigError("alpha * k = " + std::to_string(pair_count()) + " exceeds the number of distinct pairs");
  }
};

struct InstanceMetadata {
  std::optional<ExperimentConfig> config;  // absent for hand-written instances
  bool connected = false;
};

struct Instance {
  IncompatibilityGraph graph;
  CorrelationModel model;
  InstanceMetadata meta;
};

namespace detail {

template <typename Rng>
double beta_half(Rng& rng) {
  std::gamma_distribution<double> gamma(0.5, 1.0);
  for (;;) {
    double x = gamma(rng);
    double y = gamma(rng);
    if (x + y > 0.0) return x / (x + y);
  }
}

}  // namespace detail

/**
 * Synthetic instance: G(k, p) conflict graph, costs uniform on the cost
 * range, one singleton set per vertex plus floor(alpha k) distinct random
 * pairs. RNG consumption order: edges, costs, singleton parameters, then
 * for each pair its endpoints followed by its two parameters.
 */
inline Instance generate_instance(const ExperimentConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const std::size_t k = cfg.k;

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::bernoulli_distribution coin(cfg.edge_probability());
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (coin(rng)) edges.emplace_back(i, j);

  std::uniform_real_distribution<double> cost_dist(cfg.cost_min, cfg.cost_max);
  std::vector<double> costs(k);
  for (auto& c : costs) c = cfg.cost_min == cfg.cost_max ? cfg.cost_min : cost_dist(rng);

  std::vector<CorrelationSet> sets;
  sets.reserve(k + cfg.pair_count());
  for (std::size_t i = 0; i < k; ++i) {
    double fixed_mean = detail::beta_half(rng);
    sets.push_back({{i}, {cfg.lambda * fixed_mean, fixed_mean}});
  }

  std::set<std::pair<std::size_t, std::size_t>> chosen;
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  while (chosen.size() < cfg.pair_count()) {
    std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    if (a == b) continue;
    auto key = std::minmax(a, b);
    if (!chosen.insert({key.first, key.second}).second) continue;
    double x = 0.0;
    double y = 0.0;
    do {
      x = detail::beta_half(rng);
      y = detail::beta_half(rng);
    } while (x == y);
    const double one_fixed = std::max(x, y);
    const double both_fixed = std::min(x, y);
    // configuration index: bit0 = smaller vertex fixed, bit1 = larger vertex fixed
    sets.push_back({{key.first, key.second}, {cfg.lambda * one_fixed, one_fixed, one_fixed, both_fixed}});
  }

  Instance inst{IncompatibilityGraph(k, edges, std::move(costs)), CorrelationModel(k, std::move(sets)), {}};
  inst.meta.config = cfg;
  inst.meta.connected = inst.graph.connected();
  return inst;
}

}  // namespace fairres

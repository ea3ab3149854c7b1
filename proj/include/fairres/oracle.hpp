#pragma once

// Best-state oracles: exhaustive enumeration, the half-integral vertex-cover
// LP with threshold rounding for separable (m = 1) costs, and a hill-climbing
// local search for arbitrary mean functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fairres/core_model.hpp"
#include "fairres/cover.hpp"
#include "fairres/environment.hpp"
#include "fairres/errors.hpp"
#include "fairres/max_flow.hpp"

namespace fairres {

/**
 * Per-vertex mean loss as a function of the state, plus the influence
 * structure: dependents(v) lists every vertex whose mean may change when
 * bit v flips (v itself included).
 */
class MeanFunction {
 public:
  using Eval = std::function<double(const CriteriaState&, std::size_t)>;

  MeanFunction(std::vector<std::vector<std::size_t>> dependents, Eval eval)
      : dependents_(std::move(dependents)), eval_(std::move(eval)) {
    separable_ = true;
    for (std::size_t v = 0; v < dependents_.size(); ++v) {
      auto& d = dependents_[v];
      if (std::find(d.begin(), d.end(), v) == d.end()) d.push_back(v);
      std::sort(d.begin(), d.end());
      d.erase(std::unique(d.begin(), d.end()), d.end());
      if (d.size() != 1) separable_ = false;
    }
  }

  /// Influence lists derived from "mean of i reads the bits in reads[i]".
  static std::vector<std::vector<std::size_t>> dependents_from_reads(const std::vector<std::vector<std::size_t>>& reads) {
    std::vector<std::vector<std::size_t>> deps(reads.size());
    for (std::size_t i = 0; i < reads.size(); ++i) {
      deps[i].push_back(i);
      for (auto v : reads[i]) deps[v].push_back(i);
    }
    return deps;
  }

  /// Mean of i depends on s(i) only: unfixed[i] when unfixed, fixed[i] when fixed.
  static MeanFunction separable(std::vector<double> unfixed, std::vector<double> fixed) {
    if (unfixed.size() != fixed.size()) throw DimensionError("separable mean tables differ in length");
    std::vector<std::vector<std::size_t>> deps(unfixed.size());
    for (std::size_t v = 0; v < deps.size(); ++v) deps[v] = {v};
    return MeanFunction(std::move(deps), [u = std::move(unfixed), f = std::move(fixed)](const CriteriaState& s,
                                                                                     std::size_t i) {
      return s.fixed(i) ? f[i] : u[i];
    });
  }

  std::size_t size() const noexcept { return dependents_.size(); }
  double operator()(const CriteriaState& s, std::size_t i) const { return eval_(s, i); }
  double total(const CriteriaState& s) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < size(); ++i) sum += eval_(s, i);
    return sum;
  }
  const std::vector<std::size_t>& dependents(std::size_t v) const { return dependents_.at(v); }
  bool separable() const noexcept { return separable_; }

 private:
  std::vector<std::vector<std::size_t>> dependents_;
  Eval eval_;
  bool separable_ = true;
};

/// Ground-truth means of a correlation model.
inline MeanFunction true_means(const CorrelationModel& model) {
  std::vector<std::vector<std::size_t>> reads(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) reads[i] = model.correlated(i);
  auto shared = std::make_shared<const CorrelationModel>(model);
  return MeanFunction(MeanFunction::dependents_from_reads(reads), [shared](const CriteriaState& s, std::size_t i) {
    double mu = 0.0;
    for (auto j : shared->sets_of(i)) mu += shared->theta(j, s);
    return mu;
  });
}

/// Means reconstructed from (estimated) cover means.
inline MeanFunction reconstructed_means(const Cover& cover, CoverMeans means) {
  const std::size_t k = cover.dimension();
  std::vector<std::vector<std::size_t>> reads(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (cover.kind == CoverKind::General) {
      for (const auto& J : cover.blocks.of(i)) reads[i].insert(reads[i].end(), J.begin(), J.end());
    } else {
      reads[i] = cover.partners[i];
    }
  }
  struct Data {
    Cover cover;
    XTable x;
    CoverMeans means;
    std::vector<std::optional<std::size_t>> anchors;  // index 2*i + b
  };
  auto data = std::make_shared<Data>();
  data->x = x_values(cover, means);
  data->cover = cover;
  data->means = std::move(means);
  data->anchors.resize(2 * k);
  for (std::size_t i = 0; i < k; ++i)
    for (int b : {0, 1}) data->anchors[2 * i + b] = cover.anchor(i, b);
  return MeanFunction(MeanFunction::dependents_from_reads(reads), [data](const CriteriaState& s, std::size_t i) {
    auto a = data->anchors[2 * i + (s.fixed(i) ? 1 : 0)];
    return reconstruct_mean(data->cover, data->x, data->means, s, i, a);
  });
}

/// Per-vertex unfixed cost and fixed cost of a separable objective.
struct VertexCosts {
  std::vector<double> unfixed;
  std::vector<double> fixed;

  std::size_t size() const noexcept { return unfixed.size(); }

  double objective(const CriteriaState& s) const {
    double total = 0.0;
    for (std::size_t i = 0; i < size(); ++i) total += s.fixed(i) ? fixed[i] : unfixed[i];
    return total;
  }
};

/**
 * Reads the separable costs of `f`. With `include_fixing_costs` the fixed
 * cost of i also carries the one-time fixing cost c_i.
 */
inline VertexCosts vertex_costs(const IncompatibilityGraph& g, const MeanFunction& f, bool include_fixing_costs) {
  if (!f.separable()) throw ModeError("vertex costs need a separable mean function");
  const std::size_t k = g.size();
  VertexCosts out{std::vector<double>(k), std::vector<double>(k)};
  CriteriaState zero(k);
  for (std::size_t i = 0; i < k; ++i) {
    CriteriaState one = zero;
    one.set(i, true);
    out.unfixed[i] = f(zero, i);
    out.fixed[i] = f(one, i) + (include_fixing_costs ? g.cost(i) : 0.0);
  }
  return out;
}

struct LpSolution {
  CriteriaState state;        // rounded: fixed iff y_i < 1/2
  std::vector<double> y;      // y_i = 1 means unfixed
  double lp_value = 0.0;      // relaxation optimum
  double rounded_value = 0.0; // objective of `state`
};

/**
 * Solves min sum_i y_i (unfixed_i - fixed_i) + sum_i fixed_i subject to
 * y_i + y_j >= 1 on every edge, 0 <= y <= 1. Vertices whose unfixed cost
 * does not exceed the fixed cost are held at y = 1. The remaining vertex
 * cover LP is solved exactly via min cut on the bipartite double cover,
 * which yields a half-integral optimum.
 */
inline LpSolution lp_best_state_m1(const IncompatibilityGraph& g, const VertexCosts& costs) {
  const std::size_t k = g.size();
  if (costs.unfixed.size() != k || costs.fixed.size() != k) throw DimensionError("vertex cost vectors");
  for (std::size_t i = 0; i < k; ++i)
    if (!std::isfinite(costs.unfixed[i]) || !std::isfinite(costs.fixed[i])) throw InvariantError("non-finite cost");

  std::vector<double> gain(k);
  std::vector<char> active(k, 0);
  double finite_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    gain[i] = costs.unfixed[i] - costs.fixed[i];
    if (gain[i] > 0.0) {
      active[i] = 1;
      finite_sum += gain[i];
    }
  }

  // nodes: 0 source, 1 sink, 2 + i left copy, 2 + k + i right copy
  MaxFlow flow(2 + 2 * k);
  const double unbounded = 2.0 * finite_sum + 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!active[i]) continue;
    flow.add_edge(0, 2 + i, gain[i]);
    flow.add_edge(2 + k + i, 1, gain[i]);
  }
  for (const auto& e : g.edges()) {
    if (!active[e.u] || !active[e.v]) continue;
    flow.add_edge(2 + e.u, 2 + k + e.v, unbounded);
    flow.add_edge(2 + e.v, 2 + k + e.u, unbounded);
  }
  flow.solve(0, 1);
  auto side = flow.source_side();

  LpSolution sol;
  sol.y.assign(k, 1.0);
  sol.state = CriteriaState(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!active[i]) continue;
    int covered = (side[2 + i] ? 0 : 1) + (side[2 + k + i] ? 1 : 0);
    sol.y[i] = 0.5 * covered;
    if (sol.y[i] < 0.5) sol.state.set(i, true);
  }
  for (std::size_t i = 0; i < k; ++i) sol.lp_value += costs.fixed[i] + sol.y[i] * gain[i];
  sol.rounded_value = costs.objective(sol.state);
  if (!validate_state(g, sol.state)) throw InvariantError("LP rounding produced an invalid state");
  return sol;
}

struct OracleResult {
  CriteriaState state;
  double value = 0.0;
};

/// Exhaustive minimum of the total mean; ties go to the lexicographically smallest state.
inline OracleResult best_state_exact(const IncompatibilityGraph& g, const MeanFunction& f,
                                     std::size_t cap = kDefaultEnumerationCap) {
  OracleResult best{CriteriaState(g.size()), std::numeric_limits<double>::infinity()};
  for_each_valid_state(
      g,
      [&](const CriteriaState& s) {
        double v = f.total(s);
        if (v < best.value) best = {s, v};
      },
      cap);
  return best;
}

inline OracleResult best_state_exact(const std::vector<CriteriaState>& states, const MeanFunction& f) {
  OracleResult best{states.front(), std::numeric_limits<double>::infinity()};
  for (const auto& s : states) {
    double v = f.total(s);
    if (v < best.value) best = {s, v};
  }
  return best;
}

namespace detail {

/// Fix v (unfixing its neighbors) if unfixed, otherwise unfix it.
inline void flip(const IncompatibilityGraph& g, CriteriaState& s, std::size_t v) {
  if (s.fixed(v)) {
    s.set(v, false);
  } else {
    s.set(v, true);
    for (auto u : g.neighbors(v)) s.set(u, false);
  }
}

template <typename Rng>
CriteriaState random_valid_state(const IncompatibilityGraph& g, Rng& rng) {
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  CriteriaState s(g.size());
  std::bernoulli_distribution coin(0.5);
  for (auto v : order) {
    if (!coin(rng)) continue;
    bool free = true;
    for (auto u : g.neighbors(v)) free = free && !s.fixed(u);
    if (free) s.set(v, true);
  }
  return s;
}

}  // namespace detail

/**
 * Best-improvement hill climbing from `start` under single-vertex flips.
 * Each accepted move strictly lowers the objective; `trace`, when given,
 * receives the objective after every accepted move (starting value first).
 */
inline OracleResult local_descent(const IncompatibilityGraph& g, const MeanFunction& f, CriteriaState start,
                                  std::vector<double>* trace = nullptr) {
  const std::size_t k = g.size();
  CriteriaState s = std::move(start);
  double value = f.total(s);
  if (trace) trace->push_back(value);
  std::vector<std::size_t> mark(k, 0);
  std::size_t stamp = 0;
  std::vector<std::size_t> affected;
  for (;;) {
    double best_delta = 0.0;
    std::size_t best_v = k;
    for (std::size_t v = 0; v < k; ++v) {
      ++stamp;
      affected.clear();
      auto touch = [&](std::size_t x) {
        for (auto d : f.dependents(x)) {
          if (mark[d] != stamp) {
            mark[d] = stamp;
            affected.push_back(d);
          }
        }
      };
      touch(v);
      if (!s.fixed(v))
        for (auto u : g.neighbors(v))
          if (s.fixed(u)) touch(u);
      double before = 0.0;
      for (auto d : affected) before += f(s, d);
      CriteriaState t = s;
      detail::flip(g, t, v);
      double after = 0.0;
      for (auto d : affected) after += f(t, d);
      double delta = after - before;
      if (delta < best_delta - 1e-12 * (1.0 + std::abs(value))) {
        best_delta = delta;
        best_v = v;
      }
    }
    if (best_v == k) break;
    detail::flip(g, s, best_v);
    value = f.total(s);
    if (trace) trace->push_back(value);
  }
  return {std::move(s), value};
}

/// Local descent from the all-zeros state, an optional warm start and random valid starts; best by (value, state).
template <typename Rng>
OracleResult best_state_local_search(const IncompatibilityGraph& g, const MeanFunction& f, std::size_t restarts,
                                     Rng& rng, const CriteriaState* warm_start = nullptr) {
  std::vector<CriteriaState> starts;
  starts.emplace_back(g.size());
  if (warm_start) starts.push_back(*warm_start);
  for (std::size_t r = 0; r < restarts; ++r) starts.push_back(detail::random_valid_state(g, rng));
  std::optional<OracleResult> best;
  for (auto& st : starts) {
    auto res = local_descent(g, f, std::move(st));
    if (!best || res.value < best->value || (res.value == best->value && res.state < best->state)) best = std::move(res);
  }
  return *best;
}

enum class OracleKind { Auto, Exact, Lp, Local };

inline std::string to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::Exact: return "exact";
    case OracleKind::Lp: return "lp";
    case OracleKind::Local: return "local";
    default: return "auto";
  }
}

inline OracleKind parse_oracle_kind(const std::string& name) {
  if (name == "auto") return OracleKind::Auto;
  if (name == "exact") return OracleKind::Exact;
  if (name == "lp") return OracleKind::Lp;
  if (name == "local") return OracleKind::Local;
  throw UsageError("unknown oracle '" + name + "' (expected auto|exact|lp|local)");
}

struct OracleOptions {
  OracleKind kind = OracleKind::Auto;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  std::size_t restarts = 16;
  std::uint64_t seed = 0x5eed;
};

/**
 * Stateful oracle used inside the online algorithms: caches the valid-state
 * list for exact mode, owns the local-search RNG and counts calls.
 * Auto resolves to exact when k fits the enumeration cap, otherwise to local
 * search. Local search on separable means also descends from the LP rounding.
 */
class BestStateOracle {
 public:
  BestStateOracle(const IncompatibilityGraph& g, OracleOptions options)
      : graph_(&g), options_(options), rng_(options.seed) {}

  OracleKind resolve(const MeanFunction& /*f*/) const {
    if (options_.kind != OracleKind::Auto) return options_.kind;
    return graph_->size() <= options_.enumeration_cap ? OracleKind::Exact : OracleKind::Local;
  }

  /// True when the returned state is not guaranteed optimal.
  bool approximate(const MeanFunction& f) const { return resolve(f) != OracleKind::Exact; }

  OracleResult solve(const MeanFunction& f, const CriteriaState* warm_start = nullptr) {
    ++calls_;
    switch (resolve(f)) {
      case OracleKind::Exact:
        if (states_.empty()) states_ = enumerate_valid_states(*graph_, options_.enumeration_cap);
        return best_state_exact(states_, f);
      case OracleKind::Lp: {
        auto sol = lp_best_state_m1(*graph_, vertex_costs(*graph_, f, false));
        double v = f.total(sol.state);
        return {std::move(sol.state), v};
      }
      default: {
        auto res = best_state_local_search(*graph_, f, options_.restarts, rng_, warm_start);
        if (f.separable()) {
          // the LP rounding is a cheap extra start for separable means
          auto lp = local_descent(*graph_, f, lp_best_state_m1(*graph_, vertex_costs(*graph_, f, false)).state);
          if (lp.value < res.value || (lp.value == res.value && lp.state < res.state)) res = std::move(lp);
        }
        return res;
      }
    }
  }

  std::size_t calls() const noexcept { return calls_; }
  const OracleOptions& options() const noexcept { return options_; }

 private:
  const IncompatibilityGraph* graph_;
  OracleOptions options_;
  std::mt19937_64 rng_;
  std::vector<CriteriaState> states_;
  std::size_t calls_ = 0;
};

struct OptimalState {
  CriteriaState state;
  double value = 0.0;
  bool approximate = false;
};

/**
 * The regret comparator s* = argmin g(s). Exact up to the enumeration cap;
 * above it, the best of local search (and the LP rounding when means are
 * separable), flagged approximate.
 */
inline OptimalState optimal_state(const IncompatibilityGraph& g, const CorrelationModel& model,
                                  std::size_t cap = kDefaultEnumerationCap, std::size_t restarts = 64,
                                  std::uint64_t seed = 0x0b5e55ed) {
  auto f = true_means(model);
  if (g.size() <= cap) {
    auto r = best_state_exact(g, f, cap);
    return {std::move(r.state), r.value, false};
  }
  std::mt19937_64 rng(seed);
  std::optional<CriteriaState> warm;
  if (f.separable()) warm = lp_best_state_m1(g, vertex_costs(g, f, false)).state;
  auto r = best_state_local_search(g, f, restarts, rng, warm ? &*warm : nullptr);
  return {std::move(r.state), r.value, true};
}

}  // namespace fairres

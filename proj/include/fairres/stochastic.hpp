#pragma once

// Online learning in the stochastic setting: the simulator that plays the
// environment, the explore-then-exploit algorithm over a cover, and the
// episodic UCB algorithms (singleton sets and local-configuration keyed).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fairres/core_model.hpp"
#include "fairres/cover.hpp"
#include "fairres/environment.hpp"
#include "fairres/errors.hpp"
#include "fairres/oracle.hpp"

namespace fairres {

struct TraceStep {
  std::uint32_t state_id = 0;  // index into RunTrace::states; the state after the action
  Action action;
  double fix_cost = 0.0;
  double realized_loss = 0.0;  // sum of sampled vertex losses this step
  double expected_loss = 0.0;  // g(state)
};

struct RunTrace {
  std::string algorithm;
  std::vector<CriteriaState> states;  // distinct states in order of first visit
  std::vector<TraceStep> steps;
  std::vector<std::vector<double>> vertex_losses;  // per step, only when recording is enabled
  std::size_t oracle_calls = 0;
  std::map<std::string, std::string> meta;

  std::size_t length() const noexcept { return steps.size(); }
  const CriteriaState& state(std::size_t t) const { return states.at(steps.at(t).state_id); }

  double total_loss() const {
    double sum = 0.0;
    for (const auto& s : steps) sum += s.fix_cost + s.realized_loss;
    return sum;
  }
  double total_fixing_cost() const {
    double sum = 0.0;
    for (const auto& s : steps) sum += s.fix_cost;
    return sum;
  }
};

/// Copy of `model` with every theta zeroed: what an online algorithm may know.
inline CorrelationModel structure_only(const CorrelationModel& model) {
  auto sets = model.sets();
  for (auto& c : sets) std::fill(c.theta.begin(), c.theta.end(), 0.0);
  return CorrelationModel(model.size(), std::move(sets));
}

struct RunOptions {
  std::size_t T = 100000;
  std::uint64_t seed = 0;
  LossDistribution dist = LossDistribution::exponential();
  std::optional<CriteriaState> initial;  // defaults to all unfixed
  bool record_vertex_losses = false;
};

/**
 * Plays the environment for a fixed horizon. Each step applies one action,
 * then samples losses at the resulting state. Algorithms see the graph, the
 * correlation-set membership and the sampled losses; nothing else.
 */
class Simulator {
 public:
  Simulator(const IncompatibilityGraph& g, const CorrelationModel& model, const RunOptions& options)
      : graph_(&g),
        model_(&model),
        structure_(structure_only(model)),
        options_(options),
        rng_(options.seed),
        state_(options.initial ? *options.initial : CriteriaState(g.size())) {
    if (model.size() != g.size()) throw DimensionError("graph and model sizes differ");
    if (!validate_state(g, state_)) throw InvariantError("initial state is not valid");
    trace_.steps.reserve(options.T);
    state_id_ = intern(state_);
  }

  const IncompatibilityGraph& graph() const noexcept { return *graph_; }
  const CorrelationModel& structure() const noexcept { return structure_; }
  const CriteriaState& state() const noexcept { return state_; }
  std::size_t time() const noexcept { return trace_.steps.size(); }
  std::size_t horizon() const noexcept { return options_.T; }
  bool done() const noexcept { return time() >= options_.T; }
  std::size_t remaining() const noexcept { return options_.T - time(); }

  const std::vector<double>& step(const Action& a) {
    if (done()) throw InvariantError("simulator horizon exhausted");
    double cost = apply_action_in_place(*graph_, state_, a);
    if (a.kind != Action::Kind::Null) state_id_ = intern(state_);
    sample_losses(*model_, options_.dist, state_, rng_, losses_);
    double realized = 0.0;
    for (double v : losses_) realized += v;
    trace_.steps.push_back({state_id_, a, cost, realized, expected_[state_id_]});
    if (options_.record_vertex_losses) trace_.vertex_losses.push_back(losses_);
    return losses_;
  }

  RunTrace& trace() noexcept { return trace_; }
  RunTrace finish() { return std::move(trace_); }

 private:
  std::uint32_t intern(const CriteriaState& s) {
    auto [it, inserted] = ids_.try_emplace(s, static_cast<std::uint32_t>(trace_.states.size()));
    if (inserted) {
      trace_.states.push_back(s);
      expected_.push_back(expected_state_loss(*model_, s));
    }
    return it->second;
  }

  const IncompatibilityGraph* graph_;
  const CorrelationModel* model_;
  CorrelationModel structure_;
  RunOptions options_;
  std::mt19937_64 rng_;
  CriteriaState state_;
  std::uint32_t state_id_ = 0;
  std::vector<double> losses_;
  std::vector<double> expected_;
  std::unordered_map<CriteriaState, std::uint32_t, CriteriaStateHash> ids_;
  RunTrace trace_;
};

namespace detail {

/// Plays the move to `target` one action per step. Calls `observe` after each step.
template <typename Observe>
bool move_to(Simulator& sim, const CriteriaState& target, Observe&& observe) {
  auto plan = move_path(sim.graph(), sim.state(), target);
  for (const auto& a : plan.actions) {
    if (sim.done()) return false;
    observe(sim.step(a));
  }
  return true;
}

inline std::string fmt(double v) {
  char buf[32];
  auto n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Explore then exploit
// ---------------------------------------------------------------------------

struct ExploreExploitParams {
  double scale = 10.0;  // leading constant of the exploration length
  OracleOptions oracle;
};

/// N = ceil(scale * T^{2/3} * ln(r k T)^{1/3} / r^{2/3}).
inline std::size_t exploration_length(std::size_t T, std::size_t r, std::size_t k, double scale) {
  const double t = static_cast<double>(T);
  const double rr = static_cast<double>(r);
  const double lg = std::log(rr * static_cast<double>(k) * t);
  double n = scale * std::pow(t, 2.0 / 3.0) * std::cbrt(std::max(lg, 0.0)) / std::pow(rr, 2.0 / 3.0);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(n)));
}

inline RunTrace run_explore_exploit(Simulator& sim, const ExploreExploitParams& params) {
  const auto& g = sim.graph();
  const std::size_t k = g.size();
  const Cover cover = build_cover(g, sim.structure());
  const std::size_t r = cover.size();
  const std::size_t T = sim.horizon();
  const std::size_t N = exploration_length(T, r, k, params.scale);
  if (T < r * (N + k)) {
    throw ConfigError("horizon T=" + std::to_string(T) + " is below r*(N+k)=" + std::to_string(r * (N + k)) +
                      " (r=" + std::to_string(r) + ", N=" + std::to_string(N) + ")");
  }

  auto ignore = [](const std::vector<double>&) {};
  CoverMeans means(r, std::vector<double>(k, 0.0));
  for (std::size_t idx = 0; idx < r; ++idx) {
    detail::move_to(sim, cover.states[idx], ignore);
    for (std::size_t t = 0; t < N; ++t) {
      const auto& loss = sim.step(Action::null());
      for (std::size_t i = 0; i < k; ++i) means[idx][i] += loss[i];
    }
    for (auto& v : means[idx]) v /= static_cast<double>(N);
  }
  const std::size_t explore_steps = sim.time();

  BestStateOracle oracle(g, params.oracle);
  auto f = reconstructed_means(cover, std::move(means));
  auto best = oracle.solve(f);
  detail::move_to(sim, best.state, ignore);
  while (!sim.done()) sim.step(Action::null());

  auto& tr = sim.trace();
  tr.algorithm = "explore_exploit";
  tr.oracle_calls = oracle.calls();
  tr.meta["cover_size"] = std::to_string(r);
  tr.meta["explore_N"] = std::to_string(N);
  tr.meta["explore_scale"] = detail::fmt(params.scale);
  tr.meta["explore_steps"] = std::to_string(explore_steps);
  tr.meta["oracle"] = to_string(oracle.resolve(f));
  tr.meta["exploit_state"] = best.state.to_string();
  return sim.finish();
}

// ---------------------------------------------------------------------------
// Episodic UCB
// ---------------------------------------------------------------------------

/**
 * Loss statistics keyed by (vertex i, configuration of i's scope), where the
 * scope of i is {i} together with every vertex sharing a correlation set
 * with it. Bit t of a configuration key is the fixed bit of scope(i)[t].
 */
class LocalEstimates {
 public:
  struct Stat {
    std::uint64_t count = 0;
    double sum = 0.0;
  };

  static constexpr std::size_t kMaxScope = 63;
  static constexpr std::size_t kFlatScope = 12;

  explicit LocalEstimates(const CorrelationModel& structure) : scope_(structure.size()), flat_(structure.size()),
                                                                sparse_(structure.size()) {
    for (std::size_t i = 0; i < structure.size(); ++i) {
      auto& sc = scope_[i];
      sc = structure.correlated(i);
      sc.insert(std::lower_bound(sc.begin(), sc.end(), i), i);
      if (sc.size() > kMaxScope) throw CapacityError("scope of vertex " + std::to_string(i + 1) + " is too large");
      if (sc.size() <= kFlatScope) flat_[i].resize(std::size_t{1} << sc.size());
    }
  }

  std::size_t size() const noexcept { return scope_.size(); }
  const std::vector<std::size_t>& scope(std::size_t i) const { return scope_.at(i); }

  std::uint64_t key(std::size_t i, const CriteriaState& s) const {
    std::uint64_t u = 0;
    const auto& sc = scope_[i];
    for (std::size_t t = 0; t < sc.size(); ++t)
      if (s.fixed(sc[t])) u |= std::uint64_t{1} << t;
    return u;
  }

  void observe(std::size_t i, std::uint64_t key, double loss) {
    Stat& st = flat_[i].empty() ? sparse_[i][key] : flat_[i][key];
    ++st.count;
    st.sum += loss;
  }

  Stat stat(std::size_t i, std::uint64_t key) const {
    if (!flat_[i].empty()) return flat_[i][key];
    auto it = sparse_[i].find(key);
    return it == sparse_[i].end() ? Stat{} : it->second;
  }

  /// Seen configurations of vertex i with their statistics.
  template <typename Visit>
  void for_each_seen(std::size_t i, Visit&& visit) const {
    if (!flat_[i].empty()) {
      for (std::uint64_t u = 0; u < flat_[i].size(); ++u)
        if (flat_[i][u].count) visit(u, flat_[i][u]);
    } else {
      std::vector<std::uint64_t> keys;
      for (const auto& [u, st] : sparse_[i]) keys.push_back(u);
      std::sort(keys.begin(), keys.end());
      for (auto u : keys) visit(u, sparse_[i].at(u));
    }
  }

 private:
  std::vector<std::vector<std::size_t>> scope_;
  std::vector<std::vector<Stat>> flat_;
  std::vector<std::unordered_map<std::uint64_t, Stat>> sparse_;
};

/// Optimistic estimate: empirical mean minus `width / sqrt(count)`; unseen reads as 0.
inline double optimistic_value(const LocalEstimates::Stat& st, double width) {
  if (st.count == 0) return 0.0;
  const double n = static_cast<double>(st.count);
  return st.sum / n - width / std::sqrt(n);
}

/// Episode length: the smallest count among the configurations `s` induces, at least 1.
inline std::size_t episode_length(const LocalEstimates& est, const CriteriaState& s) {
  std::uint64_t least = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t i = 0; i < est.size(); ++i) least = std::min(least, est.stat(i, est.key(i, s)).count);
  return static_cast<std::size_t>(std::max<std::uint64_t>(least, 1));
}

enum class UcbMode { Lazy, Eager };

struct UcbParams {
  double B = 1.0;                // loss scale
  std::optional<double> delta;   // confidence level; default 1/T^4
  double scale = 10.0;           // leading constant of the confidence width
  UcbMode mode = UcbMode::Lazy;
  std::size_t eager_cap = std::size_t{1} << 16;  // total local configurations visited up front
  OracleOptions oracle{OracleKind::Auto, kDefaultEnumerationCap, 4, 0x5eed};
  /// Called at every episode start with (t, estimates, width); width / sqrt(count) is the confidence radius.
  std::function<void(std::size_t, const LocalEstimates&, double)> observer;
};

/// scale * B * sqrt(m * log(k T / delta)), with the log expanded to avoid overflow.
inline double ucb_width(const UcbParams& p, std::size_t k, std::size_t T, std::size_t m) {
  const double logT = std::log(static_cast<double>(T));
  const double log_delta = p.delta ? std::log(*p.delta) : -4.0 * logT;
  const double lg = std::log(static_cast<double>(k)) + logT - log_delta;
  return p.scale * p.B * std::sqrt(static_cast<double>(std::max<std::size_t>(m, 1)) * std::max(lg, 0.0));
}

namespace detail {

inline void observe_all(LocalEstimates& est, const CriteriaState& s, const std::vector<double>& loss) {
  for (std::size_t i = 0; i < est.size(); ++i) est.observe(i, est.key(i, s), loss[i]);
}

/// Valid configurations of every vertex scope, embedded in an otherwise unfixed state.
inline std::vector<CriteriaState> scope_configurations(const IncompatibilityGraph& g, const LocalEstimates& est,
                                                       std::size_t cap) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (est.scope(i).size() > 20) throw CapacityError("eager mode: scope too large");
    total += std::size_t{1} << est.scope(i).size();
    if (total > cap) throw CapacityError("eager mode: local configuration space exceeds cap " + std::to_string(cap));
  }
  std::vector<CriteriaState> out;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const auto& sc = est.scope(i);
    for (std::uint64_t u = 0; u < (std::uint64_t{1} << sc.size()); ++u) {
      CriteriaState s(g.size());
      for (std::size_t t = 0; t < sc.size(); ++t)
        if ((u >> t) & 1U) s.set(sc[t], true);
      if (validate_state(g, s)) out.push_back(std::move(s));
    }
  }
  return out;
}

inline RunTrace run_ucb(Simulator& sim, const UcbParams& params, const char* name) {
  const auto& g = sim.graph();
  const std::size_t k = g.size();
  const std::size_t T = sim.horizon();
  LocalEstimates est(sim.structure());
  const double width = ucb_width(params, k, T, sim.structure().max_set_size());

  auto observe = [&](const std::vector<double>& loss) { observe_all(est, sim.state(), loss); };
  auto visit = [&](const CriteriaState& target) {
    bool moved = false;
    for (const auto& a : move_path(g, sim.state(), target).actions) {
      if (sim.done()) return;
      observe(sim.step(a));
      moved = true;
    }
    if (!moved && !sim.done()) observe(sim.step(Action::null()));
  };

  // initial pass: the singleton cover (lazy) or every scope configuration (eager)
  if (params.mode == UcbMode::Eager) {
    for (const auto& s : scope_configurations(g, est, params.eager_cap)) {
      bool seen = true;
      for (std::size_t i = 0; i < k && seen; ++i) seen = est.stat(i, est.key(i, s)).count > 0;
      if (!seen) visit(s);
    }
  } else {
    visit(CriteriaState(k));
    for (std::size_t i = 0; i < k; ++i) visit(CriteriaState::with_fixed(k, {i}));
  }
  const std::size_t initial_steps = sim.time();

  std::vector<std::vector<std::size_t>> reads(k);
  for (std::size_t i = 0; i < k; ++i) reads[i] = est.scope(i);
  MeanFunction f(MeanFunction::dependents_from_reads(reads),
                 [&est, width](const CriteriaState& s, std::size_t i) {
                   return optimistic_value(est.stat(i, est.key(i, s)), width);
                 });

  BestStateOracle oracle(g, params.oracle);
  std::size_t episodes = 0;
  std::size_t switches = 0;
  while (!sim.done()) {
    if (params.observer) params.observer(sim.time(), est, width);
    CriteriaState current = sim.state();
    auto choice = oracle.solve(f, &current);
    const std::size_t stay = episode_length(est, choice.state);
    ++episodes;
    if (choice.state != current) ++switches;
    for (const auto& a : move_path(g, sim.state(), choice.state).actions) {
      if (sim.done()) break;
      observe(sim.step(a));
    }
    for (std::size_t t = 0; t < stay && !sim.done(); ++t) observe(sim.step(Action::null()));
  }

  auto& tr = sim.trace();
  tr.algorithm = name;
  tr.oracle_calls = oracle.calls();
  tr.meta["episodes"] = std::to_string(episodes);
  tr.meta["initial_steps"] = std::to_string(initial_steps);
  tr.meta["oracle"] = to_string(oracle.resolve(f));
  tr.meta["state_switches"] = std::to_string(switches);
  tr.meta["ucb_B"] = detail::fmt(params.B);
  tr.meta["ucb_mode"] = params.mode == UcbMode::Eager ? "eager" : "lazy";
  tr.meta["ucb_scale"] = detail::fmt(params.scale);
  tr.meta["ucb_width"] = detail::fmt(width);
  return sim.finish();
}

}  // namespace detail

/// Episodic UCB for singleton correlation sets.
inline RunTrace run_ucb_m1(Simulator& sim, UcbParams params) {
  if (!sim.structure().singletons_only()) throw ModeError("run_ucb_m1 requires singleton correlation sets");
  params.mode = UcbMode::Lazy;
  return detail::run_ucb(sim, params, "ucb_m1");
}

/// Episodic UCB keyed by local configurations; any set size.
inline RunTrace run_ucb_general(Simulator& sim, const UcbParams& params) {
  return detail::run_ucb(sim, params, "ucb_general");
}

// ---------------------------------------------------------------------------
// Pseudo-regret
// ---------------------------------------------------------------------------

/// Cumulative pseudo-regret after each step against a comparator of per-step value g_star.
inline std::vector<double> pseudo_regret_series(const RunTrace& trace, double g_star) {
  std::vector<double> out;
  out.reserve(trace.length());
  double acc = 0.0;
  for (const auto& s : trace.steps) {
    acc += s.fix_cost + s.expected_loss - g_star;
    out.push_back(acc);
  }
  return out;
}

inline double pseudo_regret(const RunTrace& trace, double g_star) {
  double acc = 0.0;
  for (const auto& s : trace.steps) acc += s.fix_cost + s.expected_loss - g_star;
  return acc;
}

}  // namespace fairres

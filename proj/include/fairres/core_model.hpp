#pragma once

// Incompatibility graph, criteria states, actions and the deterministic
// transition rule. Vertices are 0-based in the API; text formats and
// Action::to_string() use 1-based indices.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <queue>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairres/errors.hpp"

namespace fairres {

inline constexpr std::size_t kDefaultEnumerationCap = 22;

struct Edge {
  std::size_t u = 0;  // u < v
  std::size_t v = 0;

  auto operator<=>(const Edge&) const = default;
};

/**
 * Undirected conflict graph over k criteria with per-criterion fixing costs.
 *
 * An edge (i, j) means criteria i and j cannot be fixed at the same time.
 * Duplicate edges are merged; self loops and negative costs are rejected.
 */
class IncompatibilityGraph {
 public:
  IncompatibilityGraph() = default;

  IncompatibilityGraph(std::size_t k, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                       std::vector<double> fixing_costs)
      : k_(k), costs_(std::move(fixing_costs)), adjacency_(k * k, 0), neighbors_(k) {
    if (k_ == 0) throw InvariantError("graph must have at least one criterion");
    if (costs_.size() != k_) {
      throw DimensionError("expected " + std::to_string(k_) + " fixing costs, got " +
                           std::to_string(costs_.size()));
    }
    for (std::size_t i = 0; i < k_; ++i) {
      if (!(costs_[i] >= 0.0)) {
        throw InvariantError("fixing cost of criterion " + std::to_string(i + 1) + " is negative");
      }
    }
    for (auto [a, b] : edges) {
      if (a >= k_ || b >= k_) throw DimensionError("edge endpoint out of range");
      if (a == b) throw InvariantError("self loop on criterion " + std::to_string(a + 1));
      if (adjacency_[a * k_ + b]) continue;
      adjacency_[a * k_ + b] = adjacency_[b * k_ + a] = 1;
      edges_.push_back({std::min(a, b), std::max(a, b)});
      neighbors_[a].push_back(b);
      neighbors_[b].push_back(a);
    }
    std::sort(edges_.begin(), edges_.end());
    for (auto& n : neighbors_) std::sort(n.begin(), n.end());
  }

  std::size_t size() const noexcept { return k_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighbors_.at(i); }
  bool adjacent(std::size_t i, std::size_t j) const { return adjacency_[i * k_ + j] != 0; }
  double cost(std::size_t i) const { return costs_.at(i); }
  const std::vector<double>& costs() const noexcept { return costs_; }

  /// The adversarial analysis needs every fixing cost to be at least one.
  void require_adversarial_costs() const {
    for (std::size_t i = 0; i < k_; ++i) {
      if (costs_[i] < 1.0) {
        throw ValidationError("adversarial mode requires fixing costs >= 1 (criterion " +
                              std::to_string(i + 1) + " has " + std::to_string(costs_[i]) + ")");
      }
    }
  }

  bool connected() const {
    std::vector<char> seen(k_, 0);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!q.empty()) {
      auto v = q.front();
      q.pop();
      for (auto w : neighbors_[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          q.push(w);
        }
      }
    }
    return count == k_;
  }

  bool operator==(const IncompatibilityGraph& o) const {
    return k_ == o.k_ && costs_ == o.costs_ && edges_ == o.edges_;
  }

 private:
  std::size_t k_ = 0;
  std::vector<double> costs_;
  std::vector<Edge> edges_;
  std::vector<std::uint8_t> adjacency_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

/// Fixed/unfixed bit per criterion. Ordering is lexicographic on the bits.
class CriteriaState {
 public:
  CriteriaState() = default;
  explicit CriteriaState(std::size_t k) : bits_(k, 0) {}

  /// Parses "0101"-style strings; character t is criterion t+1.
  static CriteriaState from_string(std::string_view text) {
    CriteriaState s(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '1') {
        s.bits_[i] = 1;
      } else if (text[i] != '0') {
        throw ParseError("state string may only contain 0 and 1: '" + std::string(text) + "'");
      }
    }
    return s;
  }

  static CriteriaState with_fixed(std::size_t k, const std::vector<std::size_t>& fixed) {
    CriteriaState s(k);
    for (auto i : fixed) s.set(i, true);
    return s;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool fixed(std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool value) {
    if (i >= bits_.size()) throw DimensionError("criterion index out of range");
    bits_[i] = value ? 1 : 0;
  }
  std::size_t count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }
  std::vector<std::size_t> fixed_set() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out.push_back(i);
    return out;
  }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  std::string to_string() const {
    std::string out(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out[i] = '1';
    return out;
  }

  auto operator<=>(const CriteriaState&) const = default;
  bool operator==(const CriteriaState&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct CriteriaStateHash {
  std::size_t operator()(const CriteriaState& s) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto b : s.bits()) {
      h ^= b;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Null, Fix(i) or Unfix(i). Unfix is an extension of the base action set and costs nothing.
struct Action {
  enum class Kind : std::uint8_t { Null, Fix, Unfix };

  Kind kind = Kind::Null;
  std::size_t vertex = 0;

  static constexpr Action null() { return {}; }
  static constexpr Action fix(std::size_t i) { return {Kind::Fix, i}; }
  static constexpr Action unfix(std::size_t i) { return {Kind::Unfix, i}; }

  bool operator==(const Action&) const = default;

  std::string to_string() const {
    switch (kind) {
      case Kind::Fix: return "fix:" + std::to_string(vertex + 1);
      case Kind::Unfix: return "unfix:" + std::to_string(vertex + 1);
      default: return "null";
    }
  }
};

inline double action_cost(const IncompatibilityGraph& g, const Action& a) {
  return a.kind == Action::Kind::Fix ? g.cost(a.vertex) : 0.0;
}

/// True iff the fixed criteria of `s` form an independent set of `g`.
inline bool validate_state(const IncompatibilityGraph& g, const CriteriaState& s) {
  if (s.size() != g.size()) {
    throw DimensionError("state has " + std::to_string(s.size()) + " bits, graph has " +
                         std::to_string(g.size()) + " criteria");
  }
  for (const auto& e : g.edges())
    if (s.fixed(e.u) && s.fixed(e.v)) return false;
  return true;
}

/// Applies `a` to a state already known to be valid. Returns the fixing cost paid.
inline double apply_action_in_place(const IncompatibilityGraph& g, CriteriaState& s, const Action& a) {
  switch (a.kind) {
    case Action::Kind::Null: return 0.0;
    case Action::Kind::Fix:
      if (a.vertex >= g.size()) throw DimensionError("fix target out of range");
      s.set(a.vertex, true);
      for (auto j : g.neighbors(a.vertex)) s.set(j, false);
      return g.cost(a.vertex);
    case Action::Kind::Unfix:
      if (a.vertex >= g.size()) throw DimensionError("unfix target out of range");
      s.set(a.vertex, false);
      return 0.0;
  }
  return 0.0;
}

struct Transition {
  CriteriaState state;
  double cost = 0.0;
};

inline Transition apply_action(const IncompatibilityGraph& g, const CriteriaState& s, const Action& a) {
  if (!validate_state(g, s)) throw InvariantError("apply_action on invalid state " + s.to_string());
  Transition t{s, 0.0};
  t.cost = apply_action_in_place(g, t.state, a);
  return t;
}

enum class MoveMode {
  WithUnfix,  // may use zero-cost Unfix actions; always reaches the target
  Strict,     // Fix actions only; reaches the target's superset closure
};

struct MovePlan {
  std::vector<Action> actions;
  CriteriaState reached;
  double fixing_cost = 0.0;
};

/**
 * Actions that move `from` to `to`: Fix in ascending index first (conflicts
 * unfix for free), then Unfix in ascending index for leftovers.
 *
 * In strict mode no Unfix is emitted; `reached` then keeps every criterion
 * of `from` that no newly fixed criterion conflicts with.
 */
inline MovePlan move_path(const IncompatibilityGraph& g, const CriteriaState& from, const CriteriaState& to,
                          MoveMode mode = MoveMode::WithUnfix) {
  if (!validate_state(g, from) || !validate_state(g, to))
    throw InvariantError("move_path requires valid endpoint states");
  MovePlan plan;
  plan.reached = from;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (to.fixed(i) && !from.fixed(i)) {
      auto a = Action::fix(i);
      plan.fixing_cost += apply_action_in_place(g, plan.reached, a);
      plan.actions.push_back(a);
    }
  }
  if (mode == MoveMode::WithUnfix) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (plan.reached.fixed(i) && !to.fixed(i)) {
        auto a = Action::unfix(i);
        apply_action_in_place(g, plan.reached, a);
        plan.actions.push_back(a);
      }
    }
  }
  return plan;
}

namespace detail {

template <typename Visit>
void for_each_independent_set(const IncompatibilityGraph& g, CriteriaState& s, std::size_t v, Visit& visit) {
  if (v == g.size()) {
    visit(static_cast<const CriteriaState&>(s));
    return;
  }
  for_each_independent_set(g, s, v + 1, visit);
  for (auto u : g.neighbors(v))
    if (u < v && s.fixed(u)) return;
  s.set(v, true);
  for_each_independent_set(g, s, v + 1, visit);
  s.set(v, false);
}

}  // namespace detail

/// Calls `visit(state)` for every valid state in lexicographic order.
template <typename Visit>
void for_each_valid_state(const IncompatibilityGraph& g, Visit&& visit,
                          std::size_t cap = kDefaultEnumerationCap) {
  if (g.size() > cap) {
    throw CapacityError("state enumeration over " + std::to_string(g.size()) +
                        " criteria exceeds cap " + std::to_string(cap));
  }
  CriteriaState s(g.size());
  detail::for_each_independent_set(g, s, 0, visit);
}

inline std::vector<CriteriaState> enumerate_valid_states(const IncompatibilityGraph& g,
                                                         std::size_t cap = kDefaultEnumerationCap) {
  std::vector<CriteriaState> out;
  for_each_valid_state(g, [&](const CriteriaState& s) { out.push_back(s); }, cap);
  return out;
}

}  // namespace fairres

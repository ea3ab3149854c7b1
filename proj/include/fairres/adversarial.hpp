#pragma once

// Adversarial complaints: the barrier algorithm, per-vertex ski rental, the
// offline optimum by dynamic programming over valid states, and competitive
// ratios.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fairres/core_model.hpp"
#include "fairres/errors.hpp"

namespace fairres {

struct Complaint {
  std::size_t vertex = 0;
  double loss = 0.0;

  bool operator==(const Complaint&) const = default;
};

/// One complaint per step.
using ComplaintSequence = std::vector<Complaint>;
/// Any number of complaints per step.
using GroupedSequence = std::vector<std::vector<Complaint>>;

inline constexpr std::size_t kOfflineOptCap = 12;

/// Orders each step's complaints by ascending vertex (stable) and concatenates; empty steps vanish.
inline ComplaintSequence flatten(const GroupedSequence& steps) {
  ComplaintSequence out;
  for (const auto& step : steps) {
    auto sorted = step;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Complaint& a, const Complaint& b) { return a.vertex < b.vertex; });
    out.insert(out.end(), sorted.begin(), sorted.end());
  }
  return out;
}

/// Each complaint as its own step.
inline GroupedSequence as_steps(const ComplaintSequence& seq) {
  GroupedSequence out;
  out.reserve(seq.size());
  for (const auto& c : seq) out.push_back({c});
  return out;
}

inline void validate_sequence(const IncompatibilityGraph& g, const ComplaintSequence& seq) {
  for (const auto& c : seq) {
    if (c.vertex >= g.size()) throw DimensionError("complaint vertex out of range");
    if (!(c.loss >= 0.0) || !std::isfinite(c.loss)) throw ValidationError("complaint losses must be finite and >= 0");
  }
}

struct BarrierSnapshot {
  std::vector<double> tau;
  std::vector<double> kappa;
  CriteriaState state;
  double cumulative_loss = 0.0;
};

struct AdversarialResult {
  double total_loss = 0.0;
  double fixing_cost = 0.0;
  double complaint_loss = 0.0;
  std::size_t fixes = 0;
  CriteriaState final_state;
  std::vector<double> tau;
  std::vector<double> kappa;
  std::vector<BarrierSnapshot> trace;  // after each complaint, when requested
};

/**
 * Barrier algorithm. Complaints on fixed vertices are ignored. Otherwise the
 * loss is charged and added to tau_i, the same amount is burned against the
 * barriers of i's neighbors in ascending order, and i is fixed once tau_i
 * reaches max(c_i, remaining neighbor barriers). A fix installs kappa_i = c_i
 * and resets tau on i and its neighbors.
 */
inline AdversarialResult run_barrier(const IncompatibilityGraph& g, const ComplaintSequence& seq,
                                     bool record_trace = false) {
  g.require_adversarial_costs();
  validate_sequence(g, seq);
  const std::size_t k = g.size();
  AdversarialResult res;
  res.final_state = CriteriaState(k);
  res.tau.assign(k, 0.0);
  res.kappa.assign(k, 0.0);
  auto& s = res.final_state;
  auto& tau = res.tau;
  auto& kappa = res.kappa;

  for (const auto& [i, loss] : seq) {
    if (!s.fixed(i)) {
      res.complaint_loss += loss;
      tau[i] += loss;
      double residual = loss;
      for (auto j : g.neighbors(i)) {
        if (residual <= 0.0) break;
        double d = std::min(residual, kappa[j]);
        kappa[j] -= d;
        residual -= d;
      }
      double barrier = 0.0;
      for (auto j : g.neighbors(i)) barrier += kappa[j];
      if (tau[i] >= std::max(g.cost(i), barrier)) {
        res.fixing_cost += apply_action_in_place(g, s, Action::fix(i));
        ++res.fixes;
        tau[i] = 0.0;
        kappa[i] = g.cost(i);
        for (auto j : g.neighbors(i)) tau[j] = 0.0;
      }
    }
    if (record_trace) res.trace.push_back({tau, kappa, s, res.complaint_loss + res.fixing_cost});
  }
  res.total_loss = res.complaint_loss + res.fixing_cost;
  return res;
}

/**
 * Per-vertex ski rental that ignores the graph when deciding: fix i once the
 * loss charged to i since its last fix reaches c_i. Fixing still unfixes the
 * neighbors.
 */
inline AdversarialResult run_naive_ski_rental(const IncompatibilityGraph& g, const ComplaintSequence& seq,
                                              bool record_trace = false) {
  validate_sequence(g, seq);
  const std::size_t k = g.size();
  AdversarialResult res;
  res.final_state = CriteriaState(k);
  res.tau.assign(k, 0.0);
  res.kappa.assign(k, 0.0);
  auto& s = res.final_state;
  for (const auto& [i, loss] : seq) {
    if (!s.fixed(i)) {
      res.complaint_loss += loss;
      res.tau[i] += loss;
      if (res.tau[i] >= g.cost(i)) {
        res.fixing_cost += apply_action_in_place(g, s, Action::fix(i));
        ++res.fixes;
        res.tau[i] = 0.0;
      }
    }
    if (record_trace) res.trace.push_back({res.tau, res.kappa, s, res.complaint_loss + res.fixing_cost});
  }
  res.total_loss = res.complaint_loss + res.fixing_cost;
  return res;
}

/**
 * Offline optimum over valid-state sequences starting all unfixed. Before each
 * step's complaints the state may change arbitrarily, paying c_i for every
 * bit switched on; unfixing is free. Complaints on unfixed vertices are then
 * charged.
 */
inline double offline_opt(const IncompatibilityGraph& g, const GroupedSequence& steps) {
  const std::size_t k = g.size();
  if (k > kOfflineOptCap) {
    throw CapacityError("offline_opt supports k <= " + std::to_string(kOfflineOptCap) + ", got " +
                        std::to_string(k));
  }
  for (const auto& step : steps) validate_sequence(g, step);
  const std::size_t full = std::size_t{1} << k;
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<char> valid(full, 1);
  for (std::size_t mask = 0; mask < full; ++mask)
    for (const auto& e : g.edges())
      if (((mask >> e.u) & 1U) && ((mask >> e.v) & 1U)) valid[mask] = 0;

  std::vector<double> cost(full, inf);
  cost[0] = 0.0;
  for (const auto& step : steps) {
    // free unfixing: best over supersets
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t mask = 0; mask < full; ++mask)
        if (!((mask >> b) & 1U)) cost[mask] = std::min(cost[mask], cost[mask | (std::size_t{1} << b)]);
    // paid fixing: add bits in increasing mask order
    for (std::size_t mask = 1; mask < full; ++mask) {
      if (!valid[mask]) continue;
      for (std::size_t b = 0; b < k; ++b)
        if ((mask >> b) & 1U) cost[mask] = std::min(cost[mask], cost[mask ^ (std::size_t{1} << b)] + g.cost(b));
    }
    for (std::size_t mask = 0; mask < full; ++mask) {
      if (!valid[mask] || cost[mask] == inf) continue;
      for (const auto& c : step)
        if (!((mask >> c.vertex) & 1U)) cost[mask] += c.loss;
    }
  }
  return *std::min_element(cost.begin(), cost.end());
}

inline double offline_opt(const IncompatibilityGraph& g, const ComplaintSequence& seq) {
  return offline_opt(g, as_steps(seq));
}

struct CompetitiveRatio {
  double value = 1.0;
  bool infinite = false;
};

/// alg / opt; 1 when both are zero, flagged infinite when only opt is zero.
inline CompetitiveRatio competitive_ratio(double alg_loss, double opt_loss) {
  if (opt_loss > 0.0) return {alg_loss / opt_loss, false};
  if (alg_loss > 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {1.0, false};
}

/// Two vertices joined by an edge, c_1 = 1 and c_2 = C.
inline IncompatibilityGraph path2_graph(double C) { return IncompatibilityGraph(2, {{0, 1}}, {1.0, C}); }

/// `rounds` repetitions of C unit complaints on vertex 2 followed by one on vertex 1.
inline ComplaintSequence path2_sequence(std::size_t C, std::size_t rounds) {
  ComplaintSequence seq;
  for (std::size_t r = 0; r < rounds; ++r) {
    for (std::size_t t = 0; t < C; ++t) seq.push_back({1, 1.0});
    seq.push_back({0, 1.0});
  }
  return seq;
}

/// Star with center 0 (cost C) and `leaves` leaves of cost 1.
inline IncompatibilityGraph star_graph(std::size_t leaves, double C) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<double> costs{C};
  for (std::size_t l = 1; l <= leaves; ++l) {
    edges.emplace_back(0, l);
    costs.push_back(1.0);
  }
  return IncompatibilityGraph(leaves + 1, edges, std::move(costs));
}

}  // namespace fairres

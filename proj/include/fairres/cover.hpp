#pragma once

// Covers: small sets of states whose per-vertex mean losses determine the
// mean loss of every vertex in every valid state.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fairres/core_model.hpp"
#include "fairres/environment.hpp"
#include "fairres/errors.hpp"

namespace fairres {

inline constexpr std::size_t kMaxBlockSize = 16;

using Block = std::vector<std::size_t>;

/// Per vertex i, the partition of the vertices correlated with i into blocks.
struct CorrelationBlocks {
  std::vector<std::vector<Block>> per_vertex;

  const std::vector<Block>& of(std::size_t i) const { return per_vertex.at(i); }
};

/**
 * Finest partition of corr(i): connected components of corr(i) where two
 * vertices are linked when they appear together in any correlation set.
 * Blocks are ordered by their smallest member.
 */
inline CorrelationBlocks correlation_blocks(const CorrelationModel& model) {
  const std::size_t k = model.size();
  CorrelationBlocks out;
  out.per_vertex.resize(k);
  std::vector<std::size_t> parent(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto corr = model.correlated(i);
    if (corr.empty()) continue;
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::vector<char> in_corr(k, 0);
    for (auto v : corr) in_corr[v] = 1;
    for (const auto& c : model.sets()) {
      std::size_t first = k;
      for (auto v : c.members) {
        if (!in_corr[v]) continue;
        if (first == k) {
          first = v;
        } else {
          auto a = find(first);
          auto b = find(v);
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
      }
    }
    std::map<std::size_t, Block> groups;
    for (auto v : corr) groups[find(v)].push_back(v);
    for (auto& [root, members] : groups) out.per_vertex[i].push_back(std::move(members));
  }
  return out;
}

enum class CoverKind {
  Singleton,  // m = 1: the all-zeros state and the k indicator states
  Pairwise,   // m <= 2: one (i, j, b)-pair per pair set and valid dichotomy
  General,    // any m: one state per valid configuration of each (i, b, J) family
};

struct DichotomyKey {
  std::size_t i = 0;
  std::size_t j = 0;
  int b = 0;
  auto operator<=>(const DichotomyKey&) const = default;
};

struct FamilyKey {
  std::size_t i = 0;
  int b = 0;
  std::size_t block = 0;  // index into blocks.of(i)
  auto operator<=>(const FamilyKey&) const = default;
};

class Cover {
 public:
  CoverKind kind = CoverKind::Singleton;
  std::vector<CriteriaState> states;
  /// (i, j, b) -> (state with j unfixed, state with j fixed); both have bit i = b.
  std::map<DichotomyKey, std::pair<std::size_t, std::size_t>> pair_index;
  /// (i, b, J) -> configuration of J -> member state.
  std::map<FamilyKey, std::map<std::uint64_t, std::size_t>> family_index;
  CorrelationBlocks blocks;
  /// Pair-set partners of each vertex (Pairwise and Singleton kinds).
  std::vector<std::vector<std::size_t>> partners;
  /// Vertices that belong to at least one correlation set; the others have zero mean everywhere.
  std::vector<char> modeled;

  std::size_t size() const noexcept { return states.size(); }
  std::size_t dimension() const noexcept { return modeled.size(); }

  /// First cover state with bit i equal to b, in cover order.
  std::optional<std::size_t> anchor(std::size_t i, int b) const {
    for (std::size_t t = 0; t < states.size(); ++t)
      if (states[t].fixed(i) == (b == 1)) return t;
    return std::nullopt;
  }

  std::size_t add(const CriteriaState& s) {
    auto [it, inserted] = lookup_.try_emplace(s, states.size());
    if (inserted) states.push_back(s);
    return it->second;
  }

 private:
  std::unordered_map<CriteriaState, std::size_t, CriteriaStateHash> lookup_;
};

namespace detail {

inline void init_cover(Cover& c, const CorrelationModel& model, CoverKind kind) {
  c.kind = kind;
  c.modeled.assign(model.size(), 0);
  c.partners.assign(model.size(), {});
  for (const auto& set : model.sets()) {
    for (auto v : set.members) c.modeled[v] = 1;
    if (set.members.size() == 2) {
      c.partners[set.members[0]].push_back(set.members[1]);
      c.partners[set.members[1]].push_back(set.members[0]);
    }
  }
  for (auto& p : c.partners) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
}

inline CriteriaState unit_state(std::size_t k, std::initializer_list<std::size_t> fixed) {
  CriteriaState s(k);
  for (auto v : fixed) s.set(v, true);
  return s;
}

}  // namespace detail

/// Cover of size k + 1 for singleton-only models.
inline Cover build_singleton_cover(const IncompatibilityGraph& g, const CorrelationModel& model) {
  if (!model.singletons_only()) throw ModeError("singleton cover requires correlation sets of size one");
  Cover c;
  detail::init_cover(c, model, CoverKind::Singleton);
  const std::size_t k = g.size();
  c.add(CriteriaState(k));
  for (std::size_t i = 0; i < k; ++i) c.add(detail::unit_state(k, {i}));
  return c;
}

/// Cover for models with sets of size at most two; at most 4n states.
inline Cover build_pairwise_cover(const IncompatibilityGraph& g, const CorrelationModel& model) {
  if (model.max_set_size() > 2) throw ModeError("pairwise cover requires correlation sets of size <= 2");
  Cover c;
  detail::init_cover(c, model, CoverKind::Pairwise);
  const std::size_t k = g.size();
  for (const auto& set : model.sets()) {
    if (set.members.size() == 1) {
      c.add(CriteriaState(k));
      c.add(detail::unit_state(k, {set.members[0]}));
      continue;
    }
    const std::size_t a = set.members[0];
    const std::size_t b = set.members[1];
    for (auto [i, j] : {std::pair{a, b}, std::pair{b, a}}) {
      for (int bit : {0, 1}) {
        if (bit == 1 && g.adjacent(i, j)) continue;  // (i, j, 1) is not a dichotomy
        CriteriaState lo(k);
        if (bit) lo.set(i, true);
        CriteriaState hi = lo;
        hi.set(j, true);
        c.pair_index[{i, j, bit}] = {c.add(lo), c.add(hi)};
      }
    }
  }
  return c;
}

/// Cover built from per-vertex block families; works for any set size.
inline Cover build_general_cover(const IncompatibilityGraph& g, const CorrelationModel& model,
                                 const CorrelationBlocks& blocks, std::size_t max_block = kMaxBlockSize) {
  Cover c;
  detail::init_cover(c, model, CoverKind::General);
  c.blocks = blocks;
  const std::size_t k = g.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (!c.modeled[i]) continue;
    for (int b : {0, 1}) {
      CriteriaState base(k);
      if (b) base.set(i, true);
      c.add(base);
      const auto& bl = blocks.of(i);
      for (std::size_t q = 0; q < bl.size(); ++q) {
        const auto& J = bl[q];
        if (J.size() > max_block) {
          throw CapacityError("correlation block of size " + std::to_string(J.size()) + " for vertex " +
                              std::to_string(i + 1) + " exceeds cap " + std::to_string(max_block));
        }
        auto& family = c.family_index[{i, b, q}];
        for (std::uint64_t u = 0; u < (std::uint64_t{1} << J.size()); ++u) {
          CriteriaState s = base;
          for (std::size_t t = 0; t < J.size(); ++t)
            if ((u >> t) & 1U) s.set(J[t], true);
          if (validate_state(g, s)) family[u] = c.add(s);
        }
      }
    }
  }
  return c;
}

inline Cover build_general_cover(const IncompatibilityGraph& g, const CorrelationModel& model) {
  return build_general_cover(g, model, correlation_blocks(model));
}

/// Smallest applicable construction for the model's largest set size.
inline Cover build_cover(const IncompatibilityGraph& g, const CorrelationModel& model) {
  if (g.size() != model.size()) throw DimensionError("graph and model sizes differ");
  if (model.max_set_size() <= 1) return build_singleton_cover(g, model);
  if (model.max_set_size() == 2) return build_pairwise_cover(g, model);
  return build_general_cover(g, model);
}

/// Per-vertex means at every cover state (rows follow cover order).
using CoverMeans = std::vector<std::vector<double>>;

inline CoverMeans true_cover_means(const Cover& cover, const CorrelationModel& model) {
  CoverMeans out;
  out.reserve(cover.size());
  for (const auto& s : cover.states) out.push_back(mean_loss_vector(model, s));
  return out;
}

/**
 * Differences of cover means. For pairwise covers X(i, j, b) is the mean of
 * i with j fixed minus the mean with j unfixed; absent pairs read as zero.
 * General covers keep the member means of each (i, b, J) family.
 */
class XTable {
 public:
  double pairwise(std::size_t i, std::size_t j, int b) const {
    auto it = pairs.find({i, j, b});
    return it == pairs.end() ? 0.0 : it->second;
  }

  /// X^{i,u1,u2}_{b,J}: mean of i at the u1 member minus the mean at the u2 member.
  double general(std::size_t i, int b, std::size_t block, std::uint64_t u1, std::uint64_t u2) const {
    return member_mean(i, b, block, u1) - member_mean(i, b, block, u2);
  }

  double member_mean(std::size_t i, int b, std::size_t block, std::uint64_t u) const {
    auto fam = families.find({i, b, block});
    if (fam == families.end()) throw CoverageError("no (i, b, J) family in cover");
    auto it = fam->second.find(u);
    if (it == fam->second.end()) throw CoverageError("configuration missing from (i, b, J) family");
    return it->second;
  }

  std::map<DichotomyKey, double> pairs;
  std::map<FamilyKey, std::map<std::uint64_t, double>> families;
};

inline XTable x_values(const Cover& cover, const CoverMeans& means) {
  if (means.size() != cover.size()) {
    throw IncompletenessError("means supplied for " + std::to_string(means.size()) + " of " +
                              std::to_string(cover.size()) + " cover states");
  }
  for (const auto& row : means)
    if (row.size() != cover.dimension()) throw IncompletenessError("cover mean row has wrong length");
  XTable x;
  for (const auto& [key, idx] : cover.pair_index) x.pairs[key] = means[idx.second][key.i] - means[idx.first][key.i];
  for (const auto& [key, family] : cover.family_index) {
    auto& out = x.families[key];
    for (const auto& [u, idx] : family) out[u] = means[idx][key.i];
  }
  return x;
}

namespace detail {

inline std::uint64_t block_configuration(const Block& J, const CriteriaState& s) {
  std::uint64_t u = 0;
  for (std::size_t t = 0; t < J.size(); ++t)
    if (s.fixed(J[t])) u |= std::uint64_t{1} << t;
  return u;
}

}  // namespace detail

/**
 * Mean loss of vertex i at state s from cover data, anchored at a cover
 * state s'' with s''(i) = s(i). By default the first admissible anchor is used.
 */
inline double reconstruct_mean(const Cover& cover, const XTable& x, const CoverMeans& means, const CriteriaState& s,
                               std::size_t i, std::optional<std::size_t> anchor_index = std::nullopt) {
  if (i >= cover.dimension() || s.size() != cover.dimension()) throw DimensionError("reconstruct_mean index");
  if (!cover.modeled[i]) return 0.0;
  const int b = s.fixed(i) ? 1 : 0;
  auto a = anchor_index ? anchor_index : cover.anchor(i, b);
  if (!a || *a >= cover.size()) throw CoverageError("no cover state anchors vertex " + std::to_string(i + 1));
  const CriteriaState& anchor = cover.states[*a];
  if (anchor.fixed(i) != (b == 1)) throw CoverageError("anchor disagrees with the state at the target vertex");
  double value = means.at(*a).at(i);
  if (cover.kind == CoverKind::General) {
    const auto& bl = cover.blocks.of(i);
    for (std::size_t q = 0; q < bl.size(); ++q) {
      auto u1 = detail::block_configuration(bl[q], s);
      auto u2 = detail::block_configuration(bl[q], anchor);
      if (u1 != u2) value += x.general(i, b, q, u1, u2);
    }
    return value;
  }
  for (auto j : cover.partners[i]) {
    if (s.fixed(j) && !anchor.fixed(j)) {
      value += x.pairwise(i, j, b);
    } else if (!s.fixed(j) && anchor.fixed(j)) {
      value -= x.pairwise(i, j, b);
    }
  }
  return value;
}

/// Debug listing: member states then dichotomy / family indices, in stable order.
inline std::string describe(const Cover& cover) {
  std::ostringstream out;
  const char* kinds[] = {"singleton", "pairwise", "general"};
  out << "cover kind=" << kinds[static_cast<int>(cover.kind)] << " size=" << cover.size() << "\n";
  for (std::size_t t = 0; t < cover.size(); ++t) out << "state " << t << " " << cover.states[t].to_string() << "\n";
  for (const auto& [key, idx] : cover.pair_index) {
    out << "pair " << key.i + 1 << " " << key.j + 1 << " " << key.b << " -> " << idx.first << " " << idx.second
        << "\n";
  }
  for (const auto& [key, family] : cover.family_index) {
    out << "family " << key.i + 1 << " " << key.b << " block";
    for (auto v : cover.blocks.of(key.i)[key.block]) out << " " << v + 1;
    out << " ->";
    for (const auto& [u, idx] : family) out << " " << u << ":" << idx;
    out << "\n";
  }
  return out.str();
}

}  // namespace fairres

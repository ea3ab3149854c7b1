#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace fairres {

/// Dinic max-flow on real capacities.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t n) : graph_(n), level_(n), next_(n) {}

  std::size_t add_edge(std::size_t from, std::size_t to, double cap) {
    graph_[from].push_back(arcs_.size());
    arcs_.push_back({to, cap});
    graph_[to].push_back(arcs_.size());
    arcs_.push_back({from, 0.0});
    max_cap_ = std::max(max_cap_, cap);
    return arcs_.size() - 2;
  }

  double solve(std::size_t source, std::size_t sink) {
    source_ = source;
    eps_ = 1e-12 * std::max(1.0, max_cap_);
    double total = 0.0;
    while (bfs(source, sink)) {
      std::fill(next_.begin(), next_.end(), 0);
      for (;;) {
        double pushed = dfs(source, sink, std::numeric_limits<double>::infinity());
        if (pushed <= eps_) break;
        total += pushed;
      }
    }
    return total;
  }

  /// Nodes reachable from the source in the residual graph after solve().
  std::vector<char> source_side() const {
    std::vector<char> seen(graph_.size(), 0);
    std::queue<std::size_t> q;
    q.push(source_);
    seen[source_] = 1;
    while (!q.empty()) {
      auto v = q.front();
      q.pop();
      for (auto id : graph_[v]) {
        const auto& a = arcs_[id];
        if (a.cap > eps_ && !seen[a.to]) {
          seen[a.to] = 1;
          q.push(a.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Arc {
    std::size_t to;
    double cap;  // residual capacity
  };

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      auto v = q.front();
      q.pop();
      for (auto id : graph_[v]) {
        const auto& a = arcs_[id];
        if (a.cap > eps_ && level_[a.to] < 0) {
          level_[a.to] = level_[v] + 1;
          q.push(a.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(std::size_t v, std::size_t t, double limit) {
    if (v == t) return limit;
    for (auto& i = next_[v]; i < graph_[v].size(); ++i) {
      auto id = graph_[v][i];
      auto& a = arcs_[id];
      if (a.cap <= eps_ || level_[a.to] != level_[v] + 1) continue;
      double pushed = dfs(a.to, t, std::min(limit, a.cap));
      if (pushed > eps_) {
        a.cap -= pushed;
        arcs_[id ^ 1].cap += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<std::size_t>> graph_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
  std::size_t source_ = 0;
  double max_cap_ = 0.0;
  double eps_ = 1e-12;
};

}  // namespace fairres

#pragma once

// Algorithm dispatch and per-trial seeding shared by the CLI commands and
// the verification suites.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fairres/environment.hpp"
#include "fairres/errors.hpp"
#include "fairres/oracle.hpp"
#include "fairres/seeding.hpp"
#include "fairres/stochastic.hpp"

namespace fairres {

enum class AlgorithmId { ExploreExploit, UcbM1, UcbGeneral, Barrier, NaiveSki };

inline std::string to_string(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::ExploreExploit: return "explore_exploit";
    case AlgorithmId::UcbM1: return "ucb_m1";
    case AlgorithmId::UcbGeneral: return "ucb_general";
    case AlgorithmId::Barrier: return "barrier";
    default: return "naive_ski";
  }
}

inline AlgorithmId parse_algorithm(const std::string& name) {
  if (name == "explore_exploit") return AlgorithmId::ExploreExploit;
  if (name == "ucb_m1") return AlgorithmId::UcbM1;
  if (name == "ucb_general") return AlgorithmId::UcbGeneral;
  if (name == "barrier") return AlgorithmId::Barrier;
  if (name == "naive_ski") return AlgorithmId::NaiveSki;
  throw UsageError("unknown algorithm '" + name +
                   "' (expected explore_exploit|ucb_m1|ucb_general|barrier|naive_ski)");
}

inline bool is_adversarial(AlgorithmId id) { return id == AlgorithmId::Barrier || id == AlgorithmId::NaiveSki; }

/// Tunables of the stochastic algorithms. Harness defaults differ from the library defaults.
struct StochasticParams {
  double explore_scale = 1.0;
  double ucb_scale = 1.0;
  double B = 1.0;
  std::optional<double> delta;
  UcbMode ucb_mode = UcbMode::Lazy;
  OracleKind oracle = OracleKind::Auto;
  std::size_t oracle_restarts = 4;
};

inline RunTrace run_stochastic(const Instance& inst, AlgorithmId alg, const RunOptions& options,
                               const StochasticParams& params, std::uint64_t oracle_seed) {
  Simulator sim(inst.graph, inst.model, options);
  OracleOptions oracle{params.oracle, kDefaultEnumerationCap, params.oracle_restarts, oracle_seed};
  switch (alg) {
    case AlgorithmId::ExploreExploit: {
      ExploreExploitParams p;
      p.scale = params.explore_scale;
      p.oracle = oracle;
      p.oracle.restarts = std::max<std::size_t>(params.oracle_restarts, 16);
      return run_explore_exploit(sim, p);
    }
    case AlgorithmId::UcbM1:
    case AlgorithmId::UcbGeneral: {
      UcbParams p;
      p.B = params.B;
      p.delta = params.delta;
      p.scale = params.ucb_scale;
      p.mode = params.ucb_mode;
      p.oracle = oracle;
      return alg == AlgorithmId::UcbM1 ? run_ucb_m1(sim, p) : run_ucb_general(sim, p);
    }
    default: throw UsageError(to_string(alg) + " is not a stochastic algorithm");
  }
}

/// Seeds of trial `index` under a master seed.
struct TrialSeeds {
  std::uint64_t instance;
  std::uint64_t losses;
  std::uint64_t oracle;
  std::uint64_t sequence;
};

inline TrialSeeds trial_seeds(std::uint64_t master, std::uint64_t index) {
  return {child_seed(master, index, streams::instance), child_seed(master, index, streams::losses),
          child_seed(master, index, streams::oracle), child_seed(master, index, streams::sequence)};
}

/// Log-spaced checkpoints (eight per decade) up to and including T.
inline std::vector<std::size_t> checkpoints(std::size_t T) {
  std::vector<std::size_t> out;
  for (int j = 0;; ++j) {
    auto t = static_cast<std::size_t>(std::ceil(std::pow(10.0, j / 8.0) - 1e-9));
    if (t >= T) break;
    if (out.empty() || out.back() != t) out.push_back(t);
  }
  out.push_back(T);
  return out;
}

}  // namespace fairres

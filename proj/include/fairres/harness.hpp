#pragma once

// Command implementations behind the `fairres` CLI.
//
// Config keys (`key = value`, `#` comments; relative input paths resolve
// against the config file's directory, `out` against the working directory):
//   k alpha lambda cost_min cost_max p        instance generation
//   instance graph sequence                   input files
//   algorithm T B delta oracle seed seeds out run settings
//   explore_scale ucb_scale ucb_mode loss     algorithm tunables
//   sweep_param sweep_values algorithms       sweeps
//   threads                                   worker threads (0 = hardware)
//
// Output schemas:
//   trace_<n>.csv   step,state_bits,action,fix_cost,realized_loss,expected_loss,cum_loss,cum_pseudo_regret
//                   (adversarial: step,vertex,loss,state_bits,cum_loss)
//   summary.csv     one row per seed, then `mean` and `stddev` rows
//   ratios.csv      seed,k,T,B,alg_loss,opt_loss,ratio
//   sweep.csv       param_value,algorithm,seed,T_checkpoint,cum_loss,cum_regret
// The `seed` column holds the trial index n; trial n draws its seeds from
// trial_seeds(seed, n).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fairres/adversarial.hpp"
#include "fairres/chart.hpp"
#include "fairres/environment.hpp"
#include "fairres/errors.hpp"
#include "fairres/experiment.hpp"
#include "fairres/io.hpp"
#include "fairres/oracle.hpp"
#include "fairres/stochastic.hpp"
#include "fairres/verify.hpp"

namespace fairres {

namespace fs = std::filesystem;

struct RunSpec {
  ExperimentConfig cfg;
  std::optional<fs::path> instance_file;
  std::optional<fs::path> graph_file;
  std::optional<fs::path> sequence_file;
  AlgorithmId algorithm = AlgorithmId::ExploreExploit;
  std::size_t T = 100000;
  StochasticParams params;  // B, delta, oracle and scales
  std::string loss = "exponential";
  std::uint64_t seed = 1;
  std::size_t seeds = 1;
  fs::path out = "out";
  std::size_t threads = 0;

  LossDistribution distribution() const {
    if (loss == "exponential") return LossDistribution::exponential();
    if (loss == "clipped") return LossDistribution::clipped(params.B);
    if (loss == "constant") return LossDistribution::constant();
    throw ConfigError("unknown loss family '" + loss + "' (expected exponential|clipped|constant)");
  }

  void validate() const {
    if (T < 1) throw ConfigError("T must be >= 1");
    if (seeds < 1) throw ConfigError("seeds must be >= 1");
    if (!(params.B >= 0.0)) throw ConfigError("B must be >= 0");
    if (params.delta && !(*params.delta > 0.0 && *params.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    for (const auto* f : {&instance_file, &graph_file, &sequence_file})
      if (*f && !fs::exists(**f)) throw IoError("file '" + (*f)->string() + "' does not exist");
    if (instance_file && graph_file) throw ConfigError("give either an instance or a graph file, not both");
    if (!is_adversarial(algorithm) && graph_file)
      throw ConfigError("stochastic algorithms need an instance file or generated config, not a bare graph");
    if (is_adversarial(algorithm) && sequence_file == std::nullopt && !(params.B > 0.0))
      throw ConfigError("generated complaint sequences need B > 0");
    distribution();
    if (!instance_file && !graph_file) {
      auto c = cfg;
      c.validate();
    }
  }
};

struct SweepSpec {
  RunSpec base;
  std::string param = "alpha";
  std::vector<double> values;
  std::vector<AlgorithmId> algorithms;

  void validate() const {
    base.validate();
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    if (algorithms.empty()) throw ConfigError("sweep needs at least one algorithm");
    if (param != "alpha" && param != "lambda" && param != "k" && param != "T")
      throw ConfigError("sweep_param must be alpha|lambda|k|T, got '" + param + "'");
    for (auto a : algorithms)
      if (is_adversarial(a)) throw ConfigError("sweeps run stochastic algorithms only");
    if (base.instance_file && param != "T") throw ConfigError("sweeping " + param + " needs generated instances");
    for (double v : values) {
      if ((param == "k" || param == "T") && (v < 1 || v != std::floor(v)))
        throw ConfigError(param + " values must be positive integers");
    }
  }

  RunSpec at(double v) const {
    RunSpec s = base;
    if (param == "alpha") s.cfg.alpha = v;
    if (param == "lambda") s.cfg.lambda = v;
    if (param == "k") s.cfg.k = static_cast<std::size_t>(v);
    if (param == "T") s.T = static_cast<std::size_t>(v);
    return s;
  }
};

// ---------------------------------------------------------------------------
// Config parsing

namespace detail {

inline std::optional<fs::path> config_path(const KeyValueConfig& c, const std::string& key, const fs::path& base) {
  if (!c.has(key)) return std::nullopt;
  fs::path p = c.str(key, "");
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

inline UcbMode parse_ucb_mode(const std::string& s) {
  if (s == "lazy") return UcbMode::Lazy;
  if (s == "eager") return UcbMode::Eager;
  throw ConfigError("ucb_mode must be lazy|eager, got '" + s + "'");
}

}  // namespace detail

inline RunSpec run_spec_from_config(const KeyValueConfig& c, const fs::path& base = {}) {
  static const std::vector<std::string> known{
      "k",      "alpha", "lambda", "cost_min", "cost_max",      "p",         "instance", "graph",
      "sequence", "algorithm", "T", "B",       "delta",         "oracle",    "seeds",    "seed",
      "out",    "explore_scale", "ucb_scale", "ucb_mode", "loss", "sweep_param", "sweep_values", "algorithms",
      "threads"};
  for (const auto& [key, value] : c.values())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");
  RunSpec s;
  s.cfg.k = static_cast<std::size_t>(c.integer("k", s.cfg.k));
  s.cfg.alpha = c.real("alpha", s.cfg.alpha);
  s.cfg.lambda = c.real("lambda", s.cfg.lambda);
  s.cfg.cost_min = c.real("cost_min", s.cfg.cost_min);
  s.cfg.cost_max = c.real("cost_max", s.cfg.cost_max);
  if (c.has("p")) s.cfg.p = c.real("p", 0.0);
  s.instance_file = detail::config_path(c, "instance", base);
  s.graph_file = detail::config_path(c, "graph", base);
  s.sequence_file = detail::config_path(c, "sequence", base);
  if (c.has("algorithm")) s.algorithm = parse_algorithm(c.str("algorithm", ""));
  s.T = static_cast<std::size_t>(c.integer("T", s.T));
  s.params.B = c.real("B", s.params.B);
  if (c.has("delta")) s.params.delta = c.real("delta", 0.0);
  if (c.has("oracle")) s.params.oracle = parse_oracle_kind(c.str("oracle", ""));
  s.params.explore_scale = c.real("explore_scale", s.params.explore_scale);
  s.params.ucb_scale = c.real("ucb_scale", s.params.ucb_scale);
  if (c.has("ucb_mode")) s.params.ucb_mode = detail::parse_ucb_mode(c.str("ucb_mode", ""));
  s.loss = c.str("loss", s.loss);
  s.seed = c.integer("seed", s.seed);
  s.seeds = static_cast<std::size_t>(c.integer("seeds", s.seeds));
  if (c.has("out")) s.out = c.str("out", "");
  s.threads = static_cast<std::size_t>(c.integer("threads", 0));
  s.cfg.seed = s.seed;
  return s;
}

inline SweepSpec sweep_spec_from_config(const KeyValueConfig& c, const fs::path& base = {}) {
  SweepSpec s;
  s.base = run_spec_from_config(c, base);
  s.param = c.str("sweep_param", s.param);
  auto values = c.list("sweep_values");
  for (const auto& v : values) {
    KeyValueConfig one;
    one.set("v", v);
    s.values.push_back(one.real("v", 0.0));
  }
  auto algs = c.list("algorithms");
  if (algs.empty() && c.has("algorithm")) algs.push_back(c.str("algorithm", ""));
  if (algs.empty()) algs = {"explore_exploit", "ucb_general"};
  for (const auto& a : algs) s.algorithms.push_back(parse_algorithm(a));
  return s;
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace detail {

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Sample standard deviation; 0 for fewer than two values.
inline double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Runs job(0..n-1) on up to `threads` workers; results are stored by index.
inline void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline Instance trial_instance(const RunSpec& spec, std::uint64_t instance_seed) {
  if (spec.instance_file) return read_instance_file(*spec.instance_file);
  auto cfg = spec.cfg;
  cfg.seed = instance_seed;
  return generate_instance(cfg);
}

inline std::string opt_field(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace detail

// ---------------------------------------------------------------------------
// gen

inline fs::path cmd_gen(const RunSpec& spec, std::ostream& log) {
  auto cfg = spec.cfg;
  cfg.seed = spec.seed;
  auto inst = generate_instance(cfg);
  fs::path path = spec.out / "instance.txt";
  write_instance_file(path, inst);
  std::size_t pairs = 0;
  for (const auto& c : inst.model.sets()) pairs += c.members.size() == 2;
  log << "k=" << inst.graph.size() << " edges=" << inst.graph.edges().size() << " sets=" << inst.model.set_count()
      << " pair_sets=" << pairs << " m=" << inst.model.max_set_size()
      << " connected=" << (inst.meta.connected ? "yes" : "no") << "\n";
  log << "wrote " << path.string() << "\n";
  return path;
}

// ---------------------------------------------------------------------------
// run

struct StochasticTrialResult {
  RunTrace trace;
  OptimalState best;
  std::size_t k = 0;
};

inline StochasticTrialResult run_stochastic_trial(const RunSpec& spec, std::size_t index) {
  auto seeds = trial_seeds(spec.seed, index);
  auto inst = detail::trial_instance(spec, seeds.instance);
  auto best = optimal_state(inst.graph, inst.model);
  RunOptions ro;
  ro.T = spec.T;
  ro.seed = seeds.losses;
  ro.dist = spec.distribution();
  auto trace = run_stochastic(inst, spec.algorithm, ro, spec.params, seeds.oracle);
  return {std::move(trace), best, inst.graph.size()};
}

inline std::string stochastic_trace_csv(const RunTrace& trace, double g_star) {
  std::ostringstream o;
  o << "step,state_bits,action,fix_cost,realized_loss,expected_loss,cum_loss,cum_pseudo_regret\n";
  auto regret = pseudo_regret_series(trace, g_star);
  double cum = 0.0;
  for (std::size_t t = 0; t < trace.length(); ++t) {
    const auto& s = trace.steps[t];
    cum += s.fix_cost + s.realized_loss;
    o << t + 1 << "," << trace.state(t).to_string() << "," << s.action.to_string() << "," << format_real(s.fix_cost)
      << "," << format_real(s.realized_loss) << "," << format_real(s.expected_loss) << "," << format_real(cum) << ","
      << format_real(regret[t]) << "\n";
  }
  return o.str();
}

struct AdversarialTrialResult {
  AdversarialResult result;
  ComplaintSequence sequence;
  std::size_t k = 0;
  double B = 0.0;
  std::optional<double> opt;
  std::optional<double> first_fix_loss;
};

inline AdversarialTrialResult run_adversarial_trial(const RunSpec& spec, std::size_t index) {
  auto seeds = trial_seeds(spec.seed, index);
  IncompatibilityGraph g = spec.graph_file      ? read_graph_file(*spec.graph_file)
                           : spec.instance_file ? read_instance_file(*spec.instance_file).graph
                                                : detail::trial_instance(spec, seeds.instance).graph;
  AdversarialTrialResult r;
  r.k = g.size();
  if (spec.sequence_file) {
    r.sequence = flatten(read_sequence_file(*spec.sequence_file, g.size()));
    for (const auto& c : r.sequence) r.B = std::max(r.B, c.loss);
  } else {
    std::mt19937_64 rng(seeds.sequence);
    std::uniform_int_distribution<std::size_t> vertex(0, g.size() - 1);
    std::uniform_real_distribution<double> loss(0.0, spec.params.B);
    r.sequence.resize(spec.T);
    for (auto& c : r.sequence) c = {vertex(rng), loss(rng)};
    r.B = spec.params.B;
  }
  r.result = spec.algorithm == AlgorithmId::Barrier ? run_barrier(g, r.sequence, true)
                                                    : run_naive_ski_rental(g, r.sequence, true);
  if (g.size() <= kOfflineOptCap) r.opt = offline_opt(g, r.sequence);
  for (const auto& snap : r.result.trace) {
    if (snap.state.count() > 0) {
      r.first_fix_loss = snap.cumulative_loss;
      break;
    }
  }
  return r;
}

inline std::string adversarial_trace_csv(const AdversarialTrialResult& r) {
  std::ostringstream o;
  o << "step,vertex,loss,state_bits,cum_loss\n";
  for (std::size_t t = 0; t < r.sequence.size(); ++t) {
    const auto& snap = r.result.trace[t];
    o << t + 1 << "," << r.sequence[t].vertex + 1 << "," << format_real(r.sequence[t].loss) << ","
      << snap.state.to_string() << "," << format_real(snap.cumulative_loss) << "\n";
  }
  return o.str();
}

inline std::string ratio_field(double alg, const std::optional<double>& opt) {
  if (!opt) return {};
  auto r = competitive_ratio(alg, *opt);
  return r.infinite ? std::string("inf") : format_real(r.value);
}

struct StochasticTotals {
  std::size_t k = 0;
  double total_loss = 0.0;
  double fixing_cost = 0.0;
  double regret = 0.0;
  double g_star = 0.0;
  bool approximate = false;
  std::size_t oracle_calls = 0;
};

/// Writes traces, summary.csv and (adversarial) ratios.csv under spec.out.
inline void cmd_run(const RunSpec& spec, std::ostream& log) {
  spec.validate();
  const std::string alg = to_string(spec.algorithm);
  const std::size_t n = spec.seeds;
  std::ostringstream summary;
  auto trace_path = [&](std::size_t i) { return spec.out / ("trace_" + std::to_string(i) + ".csv"); };

  if (!is_adversarial(spec.algorithm)) {
    std::vector<StochasticTotals> rows(n);
    detail::parallel_for(n, spec.threads, [&](std::size_t i) {
      auto r = run_stochastic_trial(spec, i);
      detail::write_text(trace_path(i), stochastic_trace_csv(r.trace, r.best.value));
      rows[i] = {r.k,
                 r.trace.total_loss(),
                 r.trace.total_fixing_cost(),
                 pseudo_regret(r.trace, r.best.value),
                 r.best.value,
                 r.best.approximate,
                 r.trace.oracle_calls};
    });
    summary << "seed,algorithm,k,T,total_loss,fixing_cost,final_pseudo_regret,g_star,g_star_approximate,oracle_calls\n";
    std::vector<double> loss, fix, regret, calls;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = rows[i];
      summary << i << "," << alg << "," << r.k << "," << spec.T << "," << format_real(r.total_loss) << ","
              << format_real(r.fixing_cost) << "," << format_real(r.regret) << "," << format_real(r.g_star) << ","
              << (r.approximate ? 1 : 0) << "," << r.oracle_calls << "\n";
      loss.push_back(r.total_loss);
      fix.push_back(r.fixing_cost);
      regret.push_back(r.regret);
      calls.push_back(static_cast<double>(r.oracle_calls));
    }
    for (auto [label, f] : {std::pair<const char*, double (*)(const std::vector<double>&)>{"mean", detail::mean},
                            {"stddev", detail::stddev}}) {
      summary << label << "," << alg << "," << rows[0].k << "," << spec.T << "," << format_real(f(loss)) << ","
              << format_real(f(fix)) << "," << format_real(f(regret)) << ",,," << format_real(f(calls)) << "\n";
    }
    log << alg << ": " << n << " seed(s), T=" << spec.T << ", mean total loss " << format_real(detail::mean(loss))
        << ", mean pseudo-regret " << format_real(detail::mean(regret)) << "\n";
  } else {
    std::vector<AdversarialTrialResult> rows(n);
    detail::parallel_for(n, spec.threads, [&](std::size_t i) {
      auto r = run_adversarial_trial(spec, i);
      detail::write_text(trace_path(i), adversarial_trace_csv(r));
      r.result.trace.clear();
      rows[i] = std::move(r);
    });
    std::ostringstream ratios;
    ratios << "seed,k,T,B,alg_loss,opt_loss,ratio\n";
    summary << "seed,algorithm,k,T,B,alg_loss,opt_loss,ratio,first_fix_loss,fixes\n";
    std::vector<double> loss, opt, fixes;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = rows[i];
      const double a = r.result.total_loss;
      const std::string head = std::to_string(r.k) + "," + std::to_string(r.sequence.size()) + "," + format_real(r.B);
      ratios << i << "," << head << "," << format_real(a) << "," << detail::opt_field(r.opt) << ","
             << ratio_field(a, r.opt) << "\n";
      summary << i << "," << alg << "," << head << "," << format_real(a) << "," << detail::opt_field(r.opt) << ","
              << ratio_field(a, r.opt) << "," << detail::opt_field(r.first_fix_loss) << "," << r.result.fixes << "\n";
      loss.push_back(a);
      if (r.opt) opt.push_back(*r.opt);
      fixes.push_back(static_cast<double>(r.result.fixes));
    }
    for (auto [label, f] : {std::pair<const char*, double (*)(const std::vector<double>&)>{"mean", detail::mean},
                            {"stddev", detail::stddev}}) {
      summary << label << "," << alg << ",,,," << format_real(f(loss)) << ","
              << (opt.empty() ? std::string() : format_real(f(opt))) << ",,," << format_real(f(fixes)) << "\n";
    }
    detail::write_text(spec.out / "ratios.csv", ratios.str());
    log << alg << ": " << n << " sequence(s), mean loss " << format_real(detail::mean(loss));
    if (!opt.empty()) log << ", mean offline optimum " << format_real(detail::mean(opt));
    log << "\n";
  }
  detail::write_text(spec.out / "summary.csv", summary.str());
  log << "wrote " << (spec.out / "summary.csv").string() << "\n";
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
  std::string param_value;
  std::string algorithm;
  std::size_t seed = 0;
  std::size_t checkpoint = 0;
  double cum_loss = 0.0;
  double cum_regret = 0.0;
};

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream o;
  o << "param_value,algorithm,seed,T_checkpoint,cum_loss,cum_regret\n";
  for (const auto& r : rows)
    o << r.param_value << "," << r.algorithm << "," << r.seed << "," << r.checkpoint << "," << format_real(r.cum_loss)
      << "," << format_real(r.cum_regret) << "\n";
  return o.str();
}

inline std::vector<SweepRow> parse_sweep_csv(std::istream& in, const std::string& source = "<sweep>") {
  std::vector<SweepRow> rows;
  std::string line;
  std::size_t n = 0;
  auto fail = [&](const std::string& msg) { throw ParseError(source + ":" + std::to_string(n) + ": " + msg); };
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (n == 1) {
      if (line != "param_value,algorithm,seed,T_checkpoint,cum_loss,cum_regret") fail("unexpected header");
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string item; std::getline(ss, item, ',');) f.push_back(item);
    if (f.size() != 6) fail("expected 6 fields");
    KeyValueConfig c;
    c.set("seed", f[2]);
    c.set("t", f[3]);
    c.set("loss", f[4]);
    c.set("regret", f[5]);
    try {
      rows.push_back({f[0], f[1], static_cast<std::size_t>(c.integer("seed", 0)),
                      static_cast<std::size_t>(c.integer("t", 0)), c.real("loss", 0), c.real("regret", 0)});
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }
  return rows;
}

/// One SVG per parameter value: mean cumulative loss against t, one line per algorithm.
inline std::vector<fs::path> render_sweep_charts(const std::vector<SweepRow>& rows, const std::string& param,
                                                 const fs::path& dir) {
  // value -> algorithm -> checkpoint -> (sum, count), in first-appearance order
  std::vector<std::string> values;
  std::map<std::string, std::vector<std::string>> algs;
  std::map<std::string, std::map<std::string, std::map<std::size_t, std::pair<double, std::size_t>>>> acc;
  for (const auto& r : rows) {
    if (std::find(values.begin(), values.end(), r.param_value) == values.end()) values.push_back(r.param_value);
    auto& a = algs[r.param_value];
    if (std::find(a.begin(), a.end(), r.algorithm) == a.end()) a.push_back(r.algorithm);
    auto& cell = acc[r.param_value][r.algorithm][r.checkpoint];
    cell.first += r.cum_loss;
    ++cell.second;
  }
  std::vector<fs::path> out;
  for (const auto& v : values) {
    std::vector<ChartSeries> series;
    for (const auto& a : algs[v]) {
      ChartSeries s{a, {}};
      for (const auto& [t, cell] : acc[v][a])
        s.points.emplace_back(static_cast<double>(t), cell.first / static_cast<double>(cell.second));
      series.push_back(std::move(s));
    }
    ChartSpec spec;
    spec.title = param + " = " + v;
    fs::path path = dir / ("chart_" + param + "_" + v + ".svg");
    detail::write_text(path, render_line_chart(spec, series));
    out.push_back(path);
  }
  return out;
}

/// Runs every (value, seed) trial, writes sweep.csv, then renders charts from the file.
inline fs::path cmd_sweep(const SweepSpec& sweep, std::ostream& log) {
  sweep.validate();
  const std::size_t n = sweep.base.seeds;
  const std::size_t nv = sweep.values.size(), na = sweep.algorithms.size();
  // slot (value, algorithm, seed) -> checkpoint rows
  std::vector<std::vector<SweepRow>> slots(nv * na * n);
  std::vector<std::string> labels;
  for (double v : sweep.values) labels.push_back(format_real(v));
  detail::parallel_for(nv * n, sweep.base.threads, [&](std::size_t job) {
    const std::size_t vi = job / n, i = job % n;
    const RunSpec spec = sweep.at(sweep.values[vi]);
    auto seeds = trial_seeds(spec.seed, i);
    auto inst = detail::trial_instance(spec, seeds.instance);
    auto best = optimal_state(inst.graph, inst.model);
    auto marks = checkpoints(spec.T);
    for (std::size_t ai = 0; ai < na; ++ai) {
      RunOptions ro;
      ro.T = spec.T;
      ro.seed = seeds.losses;
      ro.dist = spec.distribution();
      auto trace = run_stochastic(inst, sweep.algorithms[ai], ro, spec.params, seeds.oracle);
      auto regret = pseudo_regret_series(trace, best.value);
      auto& slot = slots[(vi * na + ai) * n + i];
      double cum = 0.0;
      std::size_t next = 0;
      for (std::size_t t = 0; t < trace.length() && next < marks.size(); ++t) {
        cum += trace.steps[t].fix_cost + trace.steps[t].realized_loss;
        if (t + 1 == marks[next]) {
          slot.push_back({labels[vi], to_string(sweep.algorithms[ai]), i, marks[next], cum, regret[t]});
          ++next;
        }
      }
    }
  });
  std::vector<SweepRow> rows;
  for (auto& s : slots) rows.insert(rows.end(), s.begin(), s.end());
  const fs::path csv = sweep.base.out / "sweep.csv";
  detail::write_text(csv, sweep_csv(rows));
  log << "wrote " << csv.string() << " (" << rows.size() << " rows)\n";

  auto in = detail::open_in(csv);
  auto charts = render_sweep_charts(parse_sweep_csv(in, csv.string()), sweep.param, sweep.base.out);
  for (const auto& p : charts) log << "wrote " << p.string() << "\n";
  return csv;
}

// ---------------------------------------------------------------------------
// verify

/// Runs `suite`, logs one line per check and writes the JSON report to `report` when given.
inline Json cmd_verify(const std::string& suite, const VerifyOptions& o, const std::optional<fs::path>& report,
                       std::ostream& log) {
  auto reports = run_verify(suite, o);
  auto json = report_json(suite, o, reports);
  for (const auto& r : reports)
    for (const auto& c : r.checks) log << (c.passed ? "PASS " : "FAIL ") << r.suite << "/" << c.name << "\n";
  if (report) {
    detail::write_text(*report, json.dump(2) + "\n");
    log << "wrote " << report->string() << "\n";
  }
  return json;
}

}  // namespace fairres

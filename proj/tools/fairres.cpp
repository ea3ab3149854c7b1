// fairres: instance generation, runs, sweeps and verification suites.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage or invalid input, 3 I/O.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fairres/harness.hpp"

namespace {

namespace fs = std::filesystem;
using namespace fairres;

struct Flags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> seeds;
  std::optional<std::string> T;
  std::optional<double> B;
  std::optional<double> delta;
  std::optional<std::string> alg;
  std::optional<std::string> oracle;
  std::optional<std::string> out;
  std::optional<double> explore_scale;
  std::optional<double> ucb_scale;
  std::optional<std::size_t> threads;
  std::string suite = "all";
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "key = value config file");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--seeds", f.seeds, "number of trials");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
}

void add_algorithm(CLI::App* cmd, Flags& f) {
  cmd->add_option("--T", f.T, "horizon");
  cmd->add_option("--B", f.B, "loss range bound");
  cmd->add_option("--delta", f.delta, "UCB confidence parameter");
  cmd->add_option("--alg", f.alg, "explore_exploit|ucb_m1|ucb_general|barrier|naive_ski");
  cmd->add_option("--oracle", f.oracle, "auto|exact|lp|local");
  cmd->add_option("--explore-scale", f.explore_scale, "explore-exploit length constant");
  cmd->add_option("--ucb-scale", f.ucb_scale, "UCB confidence-width constant");
}

/// Config file first, then command-line overrides.
KeyValueConfig merged_config(const Flags& f, fs::path& base) {
  KeyValueConfig c;
  if (f.config) {
    c = KeyValueConfig::read(*f.config);
    base = fs::path(*f.config).parent_path();
  }
  auto set = [&](const char* key, const auto& v) {
    if (!v) return;
    if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, std::string>)
      c.set(key, *v);
    else if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, double>)
      c.set(key, format_real(*v));
    else
      c.set(key, std::to_string(*v));
  };
  set("seed", f.seed);
  set("seeds", f.seeds);
  set("T", f.T);
  set("B", f.B);
  set("delta", f.delta);
  set("algorithm", f.alg);
  set("oracle", f.oracle);
  set("out", f.out);
  set("explore_scale", f.explore_scale);
  set("ucb_scale", f.ucb_scale);
  set("threads", f.threads);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairres: online fairness-criteria experiments"};
  app.require_subcommand(1);
  Flags f;
  auto* gen = app.add_subcommand("gen", "generate a random instance file");
  add_common(gen, f);
  auto* run = app.add_subcommand("run", "run one algorithm over several seeds");
  add_common(run, f);
  add_algorithm(run, f);
  auto* sweep = app.add_subcommand("sweep", "sweep a parameter and chart cumulative loss");
  add_common(sweep, f);
  add_algorithm(sweep, f);
  auto* verify = app.add_subcommand("verify", "run property suites");
  add_common(verify, f);
  add_algorithm(verify, f);
  verify->add_option("--suite", f.suite, "reconstruction|lp|regret_scaling|adversarial_ratio|all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    fs::path base;
    auto cfg = merged_config(f, base);
    if (gen->parsed()) {
      cmd_gen(run_spec_from_config(cfg, base), std::cout);
    } else if (run->parsed()) {
      cmd_run(run_spec_from_config(cfg, base), std::cout);
    } else if (sweep->parsed()) {
      cmd_sweep(sweep_spec_from_config(cfg, base), std::cout);
    } else {
      auto spec = run_spec_from_config(cfg, base);
      VerifyOptions o;
      if (cfg.has("seed")) o.seed = spec.seed;
      if (cfg.has("seeds")) o.seeds = spec.seeds;
      o.params = spec.params;
      o.progress = [](const std::string& msg) { std::cerr << "... " << msg << "\n"; };
      std::optional<fs::path> report;
      if (cfg.has("out")) report = spec.out / ("verify_" + f.suite + ".json");
      auto json = cmd_verify(f.suite, o, report, std::cerr);
      if (!report) std::cout << json.dump(2) << "\n";
      return json["passed"].get<bool>() ? 0 : 1;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

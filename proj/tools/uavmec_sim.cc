// Command-line driver: runs (strategy x seed [x sweep value]) experiments and
// writes CSV outputs.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#include "uavmec/config.hpp"
#include "uavmec/experiment.hpp"

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : split(spec, ',')) {
    auto dash = part.find('-');
    try {
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(part));
      } else {
        std::uint64_t a = std::stoull(part.substr(0, dash));
        std::uint64_t b = std::stoull(part.substr(dash + 1));
        if (b < a) throw uavmec::ConfigError("descending seed range: " + part);
        for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw uavmec::ConfigError("bad seed list: " + spec);
    }
  }
  if (seeds.empty()) throw uavmec::ConfigError("no seeds given");
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge offloading simulator with ground and UAV-mounted servers"};
  std::string config_path;
  std::string seeds_spec;
  std::string strategies_spec;
  std::string sweep_spec;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  int jobs = 1;
  bool verbose = false;
  bool dump = false;
  bool no_run_files = false;

  app.add_option("-c,--config", config_path,
                 "Config file (key = value); defaults to $UAVMEC_CONFIG when set");
  app.add_option("-s,--seed,--seeds", seeds_spec, "Seed list, e.g. 1 or 1,2,5 or 1-10");
  app.add_option("--strategy,--strategies", strategies_spec,
                 "Comma-separated strategies: TJCCT,LS,ECRAS,PAS,GCOS,STCS or all");
  app.add_option("--sweep", sweep_spec,
                 "axis=start:step:stop with axis in md-count, task-size, server-freq, time");
  app.add_option("-o,--out", out_dir, "Output directory");
  app.add_option("--set", overrides, "Extra key=value config overrides (repeatable)");
  app.add_option("-j,--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", verbose, "Progress on stderr");
  app.add_flag("--dump-config", dump, "Print the effective config and exit");
  app.add_flag("--no-run-files", no_run_files, "Skip per-run metrics/events files");
  CLI11_PARSE(app, argc, argv);

  try {
    if (config_path.empty()) {
      if (const char* env = std::getenv("UAVMEC_CONFIG")) config_path = env;
    }
    uavmec::ScenarioConfig cfg;
    if (!config_path.empty()) cfg = uavmec::load_config(config_path);
    for (const auto& kv : overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw uavmec::ConfigError("--set expects key=value: " + kv);
      uavmec::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    if (dump) {
      std::fputs(uavmec::dump_config(cfg).c_str(), stdout);
      return 0;
    }

    std::vector<uavmec::StrategyKind> strategies;
    if (strategies_spec.empty()) {
      strategies.push_back(cfg.strategy);
    } else if (strategies_spec == "all") {
      strategies = uavmec::all_strategies();
    } else {
      for (const auto& name : split(strategies_spec, ','))
        strategies.push_back(uavmec::parse_strategy(name));
    }
    std::vector<std::uint64_t> seeds =
        seeds_spec.empty() ? std::vector<std::uint64_t>{cfg.seed} : parse_seeds(seeds_spec);
    uavmec::Sweep sweep;
    if (!sweep_spec.empty()) sweep = uavmec::parse_sweep(sweep_spec);

    auto plan = uavmec::make_plan(cfg, strategies, seeds, sweep, out_dir);
    uavmec::RunnerOptions opts;
    opts.jobs = jobs;
    opts.verbose = verbose;
    opts.write_run_files = !no_run_files;
    auto results = uavmec::execute_plan(plan, opts);
    if (verbose) std::fprintf(stderr, "%zu runs written to %s\n", results.size(), out_dir.c_str());
    return 0;
  } catch (const uavmec::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

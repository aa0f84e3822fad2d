#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uavmec/config.hpp"
#include "uavmec/metrics.hpp"
#include "uavmec/simulation.hpp"

namespace uavmec {

enum class SweepAxis { kNone, kMdCount, kTaskSize, kServerFreq, kTime };

const char* to_string(SweepAxis a);

struct Sweep {
  SweepAxis axis = SweepAxis::kNone;
  std::vector<double> values;
};

// "axis=start:step:stop", stop inclusive. Axes: md-count, task-size (mean
// Mbit), server-freq (mean UAV GHz), time (slots). Throws ConfigError.
Sweep parse_sweep(const std::string& spec);

// Copy of base with the sweep value applied. Task size and server frequency
// rescale their ranges so the mean hits the value and the relative spread is
// kept; the MBS range scales with the UAV range.
ScenarioConfig apply_sweep(const ScenarioConfig& base, SweepAxis axis, double value);

struct PlanItem {
  std::string run_id;
  StrategyKind strategy = StrategyKind::kTjcct;
  std::uint64_t seed = 1;
  SweepAxis axis = SweepAxis::kNone;
  double value = 0;
  ScenarioConfig config;
};

struct ExperimentPlan {
  std::vector<PlanItem> items;
  std::string out_dir;
  Sweep sweep;
};

ExperimentPlan make_plan(const ScenarioConfig& base, const std::vector<StrategyKind>& strategies,
                         const std::vector<std::uint64_t>& seeds, const Sweep& sweep,
                         const std::string& out_dir);

struct RunSummary {
  PlanItem item;
  MetricsReport report;
  std::size_t violations = 0;
  std::vector<MetricsReport> per_epoch;      // cumulative metrics at each epoch end
  std::vector<std::vector<Vec2>> uav_track;
};

RunSummary summarize(const PlanItem& item, const RunResult& r);

// CSV text writers; every file starts with its header row.
std::string summary_csv(const std::vector<RunSummary>& runs);
std::string metrics_csv(const RunResult& r);
std::string events_csv(const RunResult& r);
std::string trajectories_csv(const std::vector<RunSummary>& runs);
// Mean, standard deviation and count over seeds per (sweep value, strategy, metric).
std::string sweep_plot_csv(const std::vector<RunSummary>& runs);
// Same over seeds per (epoch, strategy, metric) from the cumulative curves.
std::string time_plot_csv(const std::vector<RunSummary>& runs);

struct RunnerOptions {
  int jobs = 1;
  bool write_run_files = true;
  bool verbose = false;
};

// Runs every plan item on a worker pool and writes summary.csv,
// trajectories.csv, plot files and runs/<run_id>/{metrics,events}.csv.
// Results come back in plan order whatever the scheduling.
std::vector<RunSummary> execute_plan(const ExperimentPlan& plan, const RunnerOptions& opts);

void write_file(const std::string& path, const std::string& text);

std::string format_number(double x);

}  // namespace uavmec

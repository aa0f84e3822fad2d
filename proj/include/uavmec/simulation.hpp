#pragma once

#include <string>
#include <vector>

#include "uavmec/config.hpp"
#include "uavmec/metrics.hpp"
#include "uavmec/scenario.hpp"
#include "uavmec/strategies.hpp"

namespace uavmec {

struct EpochLog {
  int epoch = 0;             // 0-based epoch whose end triggered the update
  int links = 0;
  std::vector<double> sca_objective;
  int sca_iterations = 0;
  bool fallback = false;
  bool hit_cap = false;
};

struct RunResult {
  ScenarioConfig config;
  std::vector<Task> tasks;
  std::vector<double> slot_utility;
  std::vector<std::vector<Vec2>> uav_track;  // UAV -> position per epoch
  std::vector<EpochLog> epochs;
  std::vector<std::string> violations;      // invariant breaches seen during the run
  StrategyState strategy_state;
  MetricsReport report;
};

RunResult run(const ScenarioConfig& cfg);

// Slots a core and its frequency stay committed: ceil(compute delay / delta),
// counted from the decision slot.
int reservation_slots(double exec_s, double slot_s);

}  // namespace uavmec

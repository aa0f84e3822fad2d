#pragma once

#include <string>
#include <vector>

#include "uavmec/config.hpp"
#include "uavmec/types.hpp"

namespace uavmec {

struct World {
  ScenarioConfig config;
  std::vector<MobileDevice> mds;
  std::vector<MecServer> servers;   // MBS first when enabled, then UAVs
  std::vector<int> uav_server;      // UAV index -> server index
  std::vector<std::vector<Vec2>> uav_track;  // UAV index -> position per elapsed epoch

  int uav_count() const { return static_cast<int>(uav_server.size()); }
  const MecServer* mbs() const;
};

// MDs uniform in the area; per-device and per-server parameters drawn
// uniformly from the configured ranges with the scenario stream of the seed.
World build_scenario(const ScenarioConfig& config);

// Energy normalizers in joules.
double md_energy_budget_j(const ScenarioConfig& c, double f_max_hz);
double mbs_energy_budget_j(const ScenarioConfig& c, double f_total_hz);

// Text form of the world used for determinism checks.
std::string serialize(const World& w);

}  // namespace uavmec

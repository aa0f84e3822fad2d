#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavmec/channel.hpp"
#include "uavmec/cost_model.hpp"
#include "uavmec/mobility.hpp"
#include "uavmec/types.hpp"
#include "uavmec/utility.hpp"

namespace uavmec {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Range {
  double lo = 0;
  double hi = 0;
};

enum class StrategyKind { kTjcct, kLs, kEcras, kPas, kGcos, kStcs };

const char* to_string(StrategyKind s);
StrategyKind parse_strategy(const std::string& name);  // throws ConfigError
const std::vector<StrategyKind>& all_strategies();

enum class FlightCharging { kShared, kPerTask };

struct ScenarioConfig {
  TimeGrid grid;
  AreaBounds area;

  int md_count = 30;
  bool mbs_enabled = true;
  Vec2 mbs_position{500, 500};
  double mbs_height = 10;
  std::vector<Vec2> uav_initial{{50, 900}, {900, 900}, {100, 100}, {800, 1000}};
  std::vector<Vec2> uav_final{{500, 0}, {500, 500}, {500, 500}, {500, 500}};

  // Mobile devices.
  Range md_cpu_hz{0.5e9, 1e9};
  Range md_tx_power_dbm{10, 25};
  Range md_weight{0, 1};
  double md_payment_budget = 20;
  double md_energy_wh_per_ghz = 1;  // scaled by the MD's CPU speed in GHz
  double md_capacitance = 1e-27;

  // Tasks.
  Range task_size_bits{1e6, 5e6};
  Range task_intensity{500, 1500};
  Range task_deadline_s{0.1, 5};
  double arrival_probability = 0.3;

  // Servers.
  Range mbs_cpu_hz{20e9, 40e9};
  Range uav_cpu_hz{10e9, 20e9};
  Range server_cores{2, 10};
  Range server_weight{0, 1};
  double server_capacitance = 1e-27;
  double mbs_energy_wh_per_ghz = 1;  // scaled by the MBS CPU speed in GHz
  double uav_energy_j = 360e3;
  // Each core runs at f_total / n_core, so one task gets at most one core's
  // share; false lets a single task take the whole free frequency.
  bool split_core_frequency = true;
  double max_unit_price = 1e-9;      // currency per (cycle/s), i.e. 1 per GHz

  ChannelParams channel;

  // Mobility.
  double gm_alpha = 0.9;
  Range gm_mean_speed{0, 1};
  double gm_sigma = 2;
  UavLimits uav;
  PropulsionParams propulsion;
  // The reachability disk shrinks at this fraction of v_max, which leaves
  // UAVs heading to a shared destination room to keep apart.
  double reach_speed_factor = 0.8;

  // Bargaining, matching, trajectory.
  int bargain_horizon = 10;
  int bargain_max_rounds = 100;
  double bargain_tol = 1e-6;
  double sca_tol = 1e-4;
  int sca_max_iter = 50;
  bool fixed_los_for_trajectory = false;
  double fixed_los_value = 0.5;
  QoeEnergyNormalizer qoe_energy_normalizer = QoeEnergyNormalizer::kServer;
  FlightCharging flight_charging = FlightCharging::kShared;

  // Strategy.
  StrategyKind strategy = StrategyKind::kTjcct;
  double pas_factor = 0.1;
  double pas_threshold = 0.5;
  double pas_initial_price_fraction = 0.5;
  int gcos_max_rounds = 20;

  std::uint64_t seed = 1;

  int uav_count() const { return static_cast<int>(uav_initial.size()); }
  void validate() const;  // throws ConfigError
};

// key = value lines; '#' starts a comment; ranges are "lo:hi"; point lists
// are "x,y; x,y". Unknown keys are errors.
ScenarioConfig parse_config(const std::string& text, ScenarioConfig base = {});
ScenarioConfig load_config(const std::string& path, ScenarioConfig base = {});
void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value);

// The effective configuration, one key per line, in a stable order.
std::string dump_config(const ScenarioConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace uavmec

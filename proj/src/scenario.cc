#include "uavmec/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "uavmec/channel.hpp"
#include "uavmec/rng.hpp"

namespace uavmec {

void TimeGrid::validate() const {
  if (!(slot_duration_s > 0)) throw std::invalid_argument("slot_duration_s must be > 0");
  if (slots_per_epoch < 1) throw std::invalid_argument("slots_per_epoch must be >= 1");
  if (total_slots < 1) throw std::invalid_argument("total_slots must be >= 1");
  if (total_slots % slots_per_epoch != 0)
    throw std::invalid_argument("total_slots must be a multiple of slots_per_epoch");
}

int epoch_of(const TimeGrid& grid, int slot) {
  if (slot < 0 || slot >= grid.total_slots) throw std::out_of_range("slot outside the horizon");
  return slot / grid.slots_per_epoch;
}

double MecServer::committed_f() const {
  double s = 0;
  for (const auto& r : reservations) s += r.f;
  return s;
}

double MecServer::available_f() const {
  double left = f_total_max - committed_f();
  return std::max(0.0, std::min(f_core_max, left));
}

void MecServer::release_until(int slot) {
  std::erase_if(reservations, [slot](const Reservation& r) { return r.release_slot <= slot; });
}

const char* to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::kPending: return "pending";
    case TaskStatus::kLocal: return "local";
    case TaskStatus::kOffloaded: return "offloaded";
    case TaskStatus::kCompleted: return "completed";
    case TaskStatus::kFailed: return "failed";
  }
  return "?";
}

const MecServer* World::mbs() const {
  for (const auto& s : servers)
    if (!s.aerial()) return &s;
  return nullptr;
}

double md_energy_budget_j(const ScenarioConfig& c, double f_max_hz) {
  return c.md_energy_wh_per_ghz * 3600.0 * f_max_hz / 1e9;
}

double mbs_energy_budget_j(const ScenarioConfig& c, double f_total_hz) {
  return c.mbs_energy_wh_per_ghz * 3600.0 * f_total_hz / 1e9;
}

World build_scenario(const ScenarioConfig& config) {
  config.validate();
  World w;
  w.config = config;
  Rng rng = make_rng(config.seed, Stream::kScenario);
  const double two_pi = 2.0 * std::acos(-1.0);

  for (int i = 0; i < config.md_count; ++i) {
    MobileDevice md;
    md.id = i;
    md.position = {uniform(rng, 0, config.area.x_max), uniform(rng, 0, config.area.y_max)};
    double speed = uniform(rng, config.gm_mean_speed.lo, config.gm_mean_speed.hi);
    double heading = uniform(rng, 0, two_pi);
    md.mean_velocity = {speed * std::cos(heading), speed * std::sin(heading)};
    md.velocity = md.mean_velocity;
    md.f_max = uniform(rng, config.md_cpu_hz.lo, config.md_cpu_hz.hi);
    md.tx_power_w = dbm_to_w(uniform(rng, config.md_tx_power_dbm.lo, config.md_tx_power_dbm.hi));
    md.weight = uniform(rng, config.md_weight.lo, config.md_weight.hi);
    md.payment_budget = config.md_payment_budget;
    md.energy_budget_j = md_energy_budget_j(config, md.f_max);
    md.capacitance = config.md_capacitance;
    w.mds.push_back(md);
  }

  auto draw_cores = [&]() {
    int lo = static_cast<int>(std::ceil(config.server_cores.lo));
    int hi = static_cast<int>(std::floor(config.server_cores.hi));
    if (hi < lo) hi = lo;
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  if (config.mbs_enabled) {
    MecServer s;
    s.id = 0;
    s.kind = ServerKind::kTerrestrial;
    s.position = config.mbs_position;
    s.height = config.mbs_height;
    s.n_core = draw_cores();
    s.f_total_max = uniform(rng, config.mbs_cpu_hz.lo, config.mbs_cpu_hz.hi);
    s.f_core_max = config.split_core_frequency ? s.f_total_max / s.n_core : s.f_total_max;
    s.energy_budget_j = mbs_energy_budget_j(config, s.f_total_max);
    s.max_unit_price = config.max_unit_price;
    s.weight = uniform(rng, config.server_weight.lo, config.server_weight.hi);
    s.capacitance = config.server_capacitance;
    w.servers.push_back(s);
  }
  for (int u = 0; u < config.uav_count(); ++u) {
    MecServer s;
    s.id = static_cast<int>(w.servers.size());
    s.kind = ServerKind::kAerial;
    s.position = config.uav_initial[u];
    s.height = config.uav.altitude;
    s.n_core = draw_cores();
    s.f_total_max = uniform(rng, config.uav_cpu_hz.lo, config.uav_cpu_hz.hi);
    s.f_core_max = config.split_core_frequency ? s.f_total_max / s.n_core : s.f_total_max;
    s.energy_budget_j = config.uav_energy_j;
    s.max_unit_price = config.max_unit_price;
    s.weight = uniform(rng, config.server_weight.lo, config.server_weight.hi);
    s.capacitance = config.server_capacitance;
    w.uav_server.push_back(s.id);
    w.uav_track.push_back({s.position});
    w.servers.push_back(s);
  }
  return w;
}

std::string serialize(const World& w) {
  std::string out;
  char buf[512];
  for (const auto& m : w.mds) {
    std::snprintf(buf, sizeof buf, "md %d %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", m.id,
                  m.position.x(), m.position.y(), m.velocity.x(), m.velocity.y(), m.f_max,
                  m.tx_power_w, m.weight, m.energy_budget_j);
    out += buf;
  }
  for (const auto& s : w.servers) {
    std::snprintf(buf, sizeof buf, "server %d %d %.17g %.17g %.17g %d %.17g %.17g %.17g\n", s.id,
                  s.aerial() ? 1 : 0, s.position.x(), s.position.y(), s.height, s.n_core,
                  s.f_total_max, s.weight, s.energy_budget_j);
    out += buf;
  }
  return out;
}

}  // namespace uavmec

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace uavmec {

using Vec2 = Eigen::Vector2d;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Slots are the fine timescale (channel, tasks, matching); epochs group
// slots_per_epoch slots and carry mobility and trajectory decisions.
struct TimeGrid {
  double slot_duration_s = 0.1;
  int slots_per_epoch = 10;
  int total_slots = 600;

  int epochs() const { return total_slots / slots_per_epoch; }
  double epoch_duration_s() const { return slot_duration_s * slots_per_epoch; }
  double horizon_s() const { return slot_duration_s * total_slots; }
  void validate() const;
};

// 0-based slot to 0-based epoch. The 1-based numbering used in output files is
// epoch_of(slot) + 1, which equals ceil((slot + 1) / slots_per_epoch).
int epoch_of(const TimeGrid& grid, int slot);

struct MobileDevice {
  int id = 0;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  Vec2 mean_velocity = Vec2::Zero();
  double f_max = 1e9;           // cycles/s, single core
  double tx_power_w = 0.1;
  double energy_budget_j = 3600;
  double payment_budget = 20;
  double weight = 0.5;
  double capacitance = 1e-27;
};

enum class ServerKind { kTerrestrial, kAerial };

struct Reservation {
  int release_slot = 0;  // first slot in which the core is free again
  double f = 0;
};

struct MecServer {
  int id = 0;
  ServerKind kind = ServerKind::kTerrestrial;
  Vec2 position = Vec2::Zero();
  double height = 10;
  int n_core = 4;
  double f_core_max = 20e9;
  double f_total_max = 20e9;
  double energy_budget_j = 3600;
  double max_unit_price = 1e-9;
  double weight = 0.5;
  double capacitance = 1e-27;
  std::vector<Reservation> reservations;

  bool aerial() const { return kind == ServerKind::kAerial; }
  int busy_cores() const { return static_cast<int>(reservations.size()); }
  int idle_cores() const { return n_core - busy_cores(); }
  double committed_f() const;
  double available_f() const;
  void release_until(int slot);
};

enum class TaskStatus { kPending, kLocal, kOffloaded, kCompleted, kFailed };

const char* to_string(TaskStatus s);

struct Task {
  int id = 0;
  int md = 0;
  int gen_slot = 0;
  double size_bits = 0;
  double intensity = 0;  // cycles per bit
  double deadline_s = 0;
  TaskStatus status = TaskStatus::kPending;

  int server = -1;  // -1 while pending or when computed locally
  int start_slot = -1;
  double exec_delay_s = 0;       // from the decision instant to completion
  double completion_time_s = kNaN;
  double f_alloc = 0;
  double price = 0;
  double payment = 0;
  double u_md = 0;
  double u_server = 0;

  double total_cycles() const { return size_bits * intensity; }
  double total_delay_s(double slot_s) const {
    return (start_slot - gen_slot) * slot_s + exec_delay_s;
  }
};

enum class Proposer { kMd, kServer };

struct TradeOutcome {
  double f_alloc = 0;
  double p_unit = 0;
  double u_md = 0;
  double u_server = 0;
  int rounds = 0;
  Proposer proposer = Proposer::kMd;
  bool converged = false;
};

struct Rejection {
  int task = 0;
  int server = 0;
  std::string reason;
};

struct MatchingResult {
  std::vector<int> assignment;               // task index -> server index, -1 if none
  std::vector<std::vector<int>> matched;     // server index -> task indices
  std::vector<Rejection> rejections;
  int proposals = 0;
};

}  // namespace uavmec

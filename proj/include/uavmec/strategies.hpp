#pragma once

#include <vector>

#include "uavmec/bargaining.hpp"
#include "uavmec/matching.hpp"
#include "uavmec/scenario.hpp"
#include "uavmec/trajectory.hpp"

namespace uavmec {

// What a strategy sees in one slot. Row r of `rate` belongs to pending[r].
struct SlotView {
  const ScenarioConfig* cfg = nullptr;
  const World* world = nullptr;
  const std::vector<Task>* tasks = nullptr;
  std::vector<int> pending;               // task indices still waiting for a decision
  std::vector<std::vector<double>> rate;  // [pending row][server] uplink rate, bit/s
  std::vector<double> flight_power_w;     // per server, 0 for the MBS
  int slot = 0;
};

struct Offload {
  int task = 0;  // global task index
  int server = 0;
  TradeOutcome trade;
};

struct StrategyState {
  std::vector<double> pas_price;  // per server
  long matchings = 0;
  long blocking_pairs = 0;
  long quota_breaches = 0;
  long gcos_rounds = 0;
};

StrategyState initial_state(const World& w);

TradeContext trade_context(const SlotView& v, int row, int server);

// Quotas from the servers' idle cores and total uncommitted frequency.
std::vector<ServerQuota> current_quotas(const World& w);

// Negotiates every (pending task, server) pair with spare capacity and keeps
// the ones where both sides gain. Rows follow v.pending.
PreferenceTable negotiated_preferences(const SlotView& v);

// Each task in turn moves to the server that maximizes its own utility given
// everyone else's tentative choice and the quotas; repeated until nobody
// moves or max_rounds is reached. Returns task -> server or -1.
std::vector<int> best_response_assignment(const PreferenceTable& prefs,
                                          const std::vector<ServerQuota>& quotas, int max_rounds,
                                          int* rounds_used = nullptr);

std::vector<Offload> decide_offloading(const SlotView& v, StrategyState& st);

// Multiplies each server's posted price by (1 + factor) when its committed
// frequency share is above the threshold and by (1 - factor) otherwise.
void update_pas_prices(const World& w, const ScenarioConfig& cfg, StrategyState& st);

// A task served by a UAV during the epoch, as the trajectory planner sees it.
struct ServedLink {
  int uav = 0;
  int md = 0;
  int task = 0;
};

// Epoch problem for moving every UAV from positions[e] to positions[e + 1].
EpochProblem build_epoch_problem(const World& w, int epoch, const std::vector<ServedLink>& links,
                                 const std::vector<Task>& tasks);

// Next UAV positions: SCA for every strategy except STCS, which flies straight.
std::vector<Vec2> plan_uav_positions(const World& w, int epoch,
                                     const std::vector<ServedLink>& links,
                                     const std::vector<Task>& tasks, ScaResult* log = nullptr);

// Straight segment toward the destination at the cheapest propulsion speed,
// sped up when the remaining distance requires it, shortened to keep d_safe.
std::vector<Vec2> straight_line_positions(const World& w, int epoch);

double reach_radius(const ScenarioConfig& cfg, int next_epoch);

}  // namespace uavmec

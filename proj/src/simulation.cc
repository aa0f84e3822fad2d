#include "uavmec/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "uavmec/channel.hpp"
#include "uavmec/cost_model.hpp"
#include "uavmec/mobility.hpp"
#include "uavmec/rng.hpp"
#include "uavmec/utility.hpp"

namespace uavmec {

int reservation_slots(double exec_s, double slot_s) {
  return std::max(1, static_cast<int>(std::ceil(exec_s / slot_s - 1e-9)));
}

namespace {

constexpr double kCapTol = 1e-9;

std::string describe(const char* what, int slot, int id, double amount) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s slot=%d id=%d amount=%.17g", what, slot + 1, id, amount);
  return buf;
}

class Simulator {
 public:
  explicit Simulator(const ScenarioConfig& cfg)
      : cfg_(cfg), world_(build_scenario(cfg)), fading_(cfg.seed, cfg.channel),
        md_busy_until_(world_.mds.size(), 0) {
    result_.config = cfg;
    result_.strategy_state = initial_state(world_);
  }

  RunResult run() {
    const TimeGrid& g = cfg_.grid;
    for (int slot = 0; slot < g.total_slots; ++slot) {
      step(slot);
      if ((slot + 1) % g.slots_per_epoch == 0) end_epoch(slot / g.slots_per_epoch);
      fading_.drop_before(slot + 1);
    }
    finalize();
    result_.uav_track = world_.uav_track;
    result_.report = compute_metrics(result_.tasks, result_.slot_utility, g);
    return std::move(result_);
  }

 private:
  double slot_s() const { return cfg_.grid.slot_duration_s; }

  void step(int slot) {
    for (auto& s : world_.servers) s.release_until(slot);
    generate(slot);
    expire(slot);
    double utility = local_decisions(slot);
    utility += offload_decisions(slot);
    result_.slot_utility.push_back(utility);
  }

  void generate(int slot) {
    for (const auto& md : world_.mds) {
      Rng rng = make_rng(cfg_.seed, Stream::kArrival,
                         {static_cast<std::uint64_t>(md.id), static_cast<std::uint64_t>(slot)});
      if (!(uniform(rng, 0, 1) < cfg_.arrival_probability)) continue;
      Task t;
      t.id = static_cast<int>(result_.tasks.size());
      t.md = md.id;
      t.gen_slot = slot;
      t.size_bits = uniform(rng, cfg_.task_size_bits.lo, cfg_.task_size_bits.hi);
      t.intensity = uniform(rng, cfg_.task_intensity.lo, cfg_.task_intensity.hi);
      t.deadline_s = uniform(rng, cfg_.task_deadline_s.lo, cfg_.task_deadline_s.hi);
      result_.tasks.push_back(t);
      pending_.push_back(t.id);
    }
  }

  double elapsed(const Task& t, int slot) const { return (slot - t.gen_slot) * slot_s(); }

  void expire(int slot) {
    std::erase_if(pending_, [&](int k) {
      Task& t = result_.tasks[k];
      if (elapsed(t, slot) < t.deadline_s) return false;
      t.status = TaskStatus::kFailed;
      return true;
    });
  }

  // Tasks whose local QoE is positive run on the MD's own core.
  double local_decisions(int slot) {
    double utility = 0;
    std::erase_if(pending_, [&](int k) {
      Task& t = result_.tasks[k];
      const MobileDevice& md = world_.mds[t.md];
      if (md_busy_until_[t.md] > slot) return false;
      const double exec = local_delay(t.total_cycles(), md.f_max);
      const double d = elapsed(t, slot) + exec;
      const double e = local_energy(t.total_cycles(), md.f_max, md.capacitance);
      const double u = md_qoe_local(md.weight, t.deadline_s, d, e, md.energy_budget_j);
      if (!(u > 0)) return false;
      t.status = TaskStatus::kLocal;
      t.start_slot = slot;
      t.exec_delay_s = exec;
      t.completion_time_s = slot * slot_s() + exec;
      t.f_alloc = md.f_max;
      t.u_md = u;
      md_busy_until_[t.md] = slot + reservation_slots(exec, slot_s());
      utility += u;
      return true;
    });
    return utility;
  }

  double flight_power(int uav) const {
    const auto& track = world_.uav_track[uav];
    if (track.size() < 2) return hover_power(cfg_.propulsion);
    double v = (track.back() - track[track.size() - 2]).norm() / cfg_.grid.epoch_duration_s();
    return propulsion_power(v, cfg_.propulsion);
  }

  SlotView view(int slot) {
    SlotView v;
    v.cfg = &cfg_;
    v.world = &world_;
    v.tasks = &result_.tasks;
    v.pending = pending_;
    v.slot = slot;
    v.flight_power_w.assign(world_.servers.size(), 0.0);
    for (int u = 0; u < world_.uav_count(); ++u)
      v.flight_power_w[world_.uav_server[u]] = flight_power(u);
    for (int k : pending_) {
      const MobileDevice& md = world_.mds[result_.tasks[k].md];
      std::vector<double> row;
      for (size_t j = 0; j < world_.servers.size(); ++j) {
        const MecServer& s = world_.servers[j];
        LinkKind kind = s.aerial() ? LinkKind::kAerial : LinkKind::kTerrestrial;
        const FadingDraw& f = fading_.get(md.id, static_cast<int>(j), slot, kind);
        double gain = channel_gain(kind, (md.position - s.position).norm(), s.height, f,
                                   cfg_.channel);
        row.push_back(uplink_rate(cfg_.channel.bandwidth(kind), md.tx_power_w, gain,
                                  cfg_.channel.noise_w));
      }
      v.rate.push_back(std::move(row));
    }
    return v;
  }

  double offload_decisions(int slot) {
    if (pending_.empty() || world_.servers.empty()) {
      if (cfg_.strategy == StrategyKind::kPas)
        update_pas_prices(world_, cfg_, result_.strategy_state);
      return 0.0;
    }
    SlotView v = view(slot);
    std::vector<Offload> offloads = decide_offloading(v, result_.strategy_state);
    double utility = 0;
    std::vector<int> taken;
    for (const Offload& o : offloads) {
      const int row = static_cast<int>(std::find(v.pending.begin(), v.pending.end(), o.task) -
                                       v.pending.begin());
      utility += commit(slot, v, row, o);
      taken.push_back(o.task);
    }
    std::erase_if(pending_, [&](int k) {
      return std::find(taken.begin(), taken.end(), k) != taken.end() &&
             result_.tasks[k].status == TaskStatus::kOffloaded;
    });
    if (cfg_.strategy == StrategyKind::kPas) update_pas_prices(world_, cfg_, result_.strategy_state);
    check_occupancy(slot);
    return utility;
  }

  double commit(int slot, const SlotView& v, int row, const Offload& o) {
    Task& t = result_.tasks[o.task];
    MecServer& s = world_.servers[o.server];
    const MobileDevice& md = world_.mds[t.md];
    const double f = o.trade.f_alloc;
    const double rate = v.rate[row][o.server];
    const double exec = edge_delay(t.size_bits, t.total_cycles(), rate, f);
    const double total = elapsed(t, slot) + exec;
    if (!(total < t.deadline_s)) return 0.0;
    if (s.idle_cores() < 1 || s.committed_f() + f > s.f_total_max * (1 + kCapTol)) {
      result_.violations.push_back(describe("capacity", slot, s.id, f));
      return 0.0;
    }
    const double payment = o.trade.p_unit * f;
    if (payment > md.payment_budget * (1 + kCapTol))
      result_.violations.push_back(describe("payment", slot, t.id, payment));
    s.reservations.push_back({slot + reservation_slots(t.total_cycles() / f, slot_s()), f});
    t.status = TaskStatus::kOffloaded;
    t.server = o.server;
    t.start_slot = slot;
    t.exec_delay_s = exec;
    t.completion_time_s = slot * slot_s() + exec;
    t.f_alloc = f;
    t.price = o.trade.p_unit;
    t.payment = payment;
    t.u_md = o.trade.u_md;
    t.u_server = o.trade.u_server;
    if (s.aerial()) {
      int uav = static_cast<int>(std::find(world_.uav_server.begin(), world_.uav_server.end(),
                                           o.server) -
                                 world_.uav_server.begin());
      served_.push_back({uav, t.md, t.id});
    }
    return t.u_md + t.u_server;
  }

  void check_occupancy(int slot) {
    for (const auto& s : world_.servers) {
      if (s.busy_cores() > s.n_core)
        result_.violations.push_back(describe("cores", slot, s.id, s.busy_cores()));
      if (s.committed_f() > s.f_total_max * (1 + kCapTol))
        result_.violations.push_back(describe("frequency", slot, s.id, s.committed_f()));
    }
  }

  void end_epoch(int epoch) {
    const int epochs = cfg_.grid.epochs();
    if (epoch + 1 < epochs && world_.uav_count() > 0) {
      ScaResult sca;
      std::vector<Vec2> next = plan_uav_positions(world_, epoch, served_, result_.tasks, &sca);
      EpochLog log;
      log.epoch = epoch;
      log.links = static_cast<int>(served_.size());
      log.sca_objective = sca.objective;
      log.sca_iterations = sca.iterations;
      log.fallback = sca.fallback;
      log.hit_cap = sca.hit_cap;
      result_.epochs.push_back(std::move(log));
      for (int u = 0; u < world_.uav_count(); ++u) {
        world_.uav_track[u].push_back(next[u]);
        world_.servers[world_.uav_server[u]].position = next[u];
      }
    }
    served_.clear();

    for (auto& md : world_.mds) {
      Rng rng = make_rng(cfg_.seed, Stream::kMobility,
                         {static_cast<std::uint64_t>(md.id), static_cast<std::uint64_t>(epoch)});
      GaussMarkovParams gm{cfg_.gm_alpha, md.mean_velocity, cfg_.gm_sigma};
      md.velocity = md_velocity_step(md.velocity, gm, rng);
      md.position = md_position_step(md.position, md.velocity, cfg_.grid, cfg_.area);
    }
  }

  void finalize() {
    const double horizon = cfg_.grid.horizon_s();
    for (auto& t : result_.tasks) {
      if (t.status == TaskStatus::kPending) {
        t.status = TaskStatus::kFailed;
      } else if (t.status == TaskStatus::kLocal || t.status == TaskStatus::kOffloaded) {
        bool in_time = t.total_delay_s(slot_s()) <= t.deadline_s;
        t.status = in_time && t.completion_time_s <= horizon + 1e-9 ? TaskStatus::kCompleted
                                                                     : TaskStatus::kFailed;
      }
    }
  }

  ScenarioConfig cfg_;
  World world_;
  FadingCache fading_;
  std::vector<int> md_busy_until_;
  std::vector<int> pending_;
  std::vector<ServedLink> served_;
  RunResult result_;
};

}  // namespace

RunResult run(const ScenarioConfig& cfg) { return Simulator(cfg).run(); }

}  // namespace uavmec

#include "uavmec/strategies.hpp"

#include <algorithm>
#include <cmath>

#include "uavmec/channel.hpp"
#include "uavmec/cost_model.hpp"

namespace uavmec {

StrategyState initial_state(const World& w) {
  StrategyState st;
  for (const auto& s : w.servers)
    st.pas_price.push_back(w.config.pas_initial_price_fraction * s.max_unit_price);
  return st;
}

TradeContext trade_context(const SlotView& v, int row, int server) {
  const ScenarioConfig& cfg = *v.cfg;
  const Task& t = (*v.tasks)[v.pending[row]];
  const MobileDevice& md = v.world->mds[t.md];
  const MecServer& s = v.world->servers[server];
  TradeContext c;
  c.size_bits = t.size_bits;
  c.cycles = t.total_cycles();
  c.deadline_s = t.deadline_s;
  c.elapsed_s = (v.slot - t.gen_slot) * cfg.grid.slot_duration_s;
  c.rate = v.rate[row][server];
  c.md_weight = md.weight;
  c.tx_power_w = md.tx_power_w;
  c.payment_budget = md.payment_budget;
  c.upload_energy_norm_j = cfg.qoe_energy_normalizer == QoeEnergyNormalizer::kServer
                               ? s.energy_budget_j
                               : md.energy_budget_j;
  c.server_weight = s.weight;
  c.server_f_max = s.f_total_max;
  c.server_price_max = s.max_unit_price;
  c.server_energy_norm_j = s.energy_budget_j;
  c.server_capacitance = s.capacitance;
  if (s.aerial()) {
    double share = cfg.flight_charging == FlightCharging::kShared ? s.busy_cores() + 1 : 1;
    c.flight_energy_j = v.flight_power_w[server] * cfg.grid.slot_duration_s / share;
  }
  c.horizon = cfg.bargain_horizon;
  return c;
}

std::vector<ServerQuota> current_quotas(const World& w) {
  std::vector<ServerQuota> q;
  for (const auto& s : w.servers)
    q.push_back({s.idle_cores(), std::max(0.0, s.f_total_max - s.committed_f())});
  return q;
}

PreferenceTable negotiated_preferences(const SlotView& v) {
  const auto& servers = v.world->servers;
  PreferenceTable prefs;
  prefs.n_servers = static_cast<int>(servers.size());
  prefs.candidates.resize(v.pending.size());
  NegotiationOptions opts;
  opts.max_rounds = v.cfg->bargain_max_rounds;
  opts.tol = v.cfg->bargain_tol;
  for (size_t r = 0; r < v.pending.size(); ++r) {
    for (size_t j = 0; j < servers.size(); ++j) {
      const MecServer& s = servers[j];
      if (s.idle_cores() < 1 || !(s.available_f() > 0) || !(v.rate[r][j] > 0)) continue;
      Negotiation n = negotiate(trade_context(v, static_cast<int>(r), static_cast<int>(j)),
                                s.available_f(), opts);
      if (!n.ok()) continue;
      prefs.candidates[r].push_back({static_cast<int>(j), *n.trade, n.trade->u_md,
                                     n.trade->u_server});
    }
  }
  sort_preferences(prefs);
  return prefs;
}

std::vector<int> best_response_assignment(const PreferenceTable& prefs,
                                          const std::vector<ServerQuota>& quotas, int max_rounds,
                                          int* rounds_used) {
  const int n = static_cast<int>(prefs.candidates.size());
  std::vector<int> choice(n, -1);
  std::vector<int> cores(prefs.n_servers, 0);
  std::vector<double> load(prefs.n_servers, 0.0);
  int rounds = 0;
  while (rounds < max_rounds) {
    ++rounds;
    bool changed = false;
    for (int k = 0; k < n; ++k) {
      int old = choice[k];
      if (old >= 0) {
        --cores[old];
        load[old] -= prefs.find(k, old)->trade.f_alloc;
      }
      int best = -1;
      for (const Candidate& c : prefs.candidates[k]) {
        const ServerQuota& q = quotas[c.server];
        if (cores[c.server] + 1 <= q.idle_cores &&
            load[c.server] + c.trade.f_alloc <= q.available_f * (1 + 1e-9)) {
          best = c.server;
          break;
        }
      }
      if (best >= 0) {
        ++cores[best];
        load[best] += prefs.find(k, best)->trade.f_alloc;
      }
      changed |= best != old;
      choice[k] = best;
    }
    if (!changed) break;
  }
  if (rounds_used) *rounds_used = rounds;
  return choice;
}

namespace {

std::vector<Offload> from_assignment(const SlotView& v, const PreferenceTable& prefs,
                                     const std::vector<int>& assignment) {
  std::vector<Offload> out;
  for (size_t r = 0; r < assignment.size(); ++r) {
    int j = assignment[r];
    if (j < 0) continue;
    out.push_back({v.pending[r], j, prefs.find(static_cast<int>(r), j)->trade});
  }
  return out;
}

MatchingResult match(const PreferenceTable& prefs, const std::vector<ServerQuota>& quotas,
                     StrategyState& st) {
  MatchingResult m = run_matching(prefs, quotas);
  ++st.matchings;
  st.blocking_pairs += static_cast<long>(blocking_pairs(prefs, m, quotas).size());
  if (!respects_quotas(prefs, m, quotas)) ++st.quota_breaches;
  return m;
}

std::vector<Offload> decide_ecras(const SlotView& v, StrategyState& st) {
  PreferenceTable prefs = negotiated_preferences(v);
  auto quotas = current_quotas(*v.world);
  MatchingResult m = match(prefs, quotas, st);
  std::vector<Offload> out;
  for (int j = 0; j < prefs.n_servers; ++j) {
    const auto& held = m.matched[j];
    if (held.empty()) continue;
    const double f = std::min(v.world->servers[j].f_core_max,
                              quotas[j].available_f / static_cast<double>(held.size()));
    for (int r : held) {
      TradeContext ctx = trade_context(v, r, j);
      if (!(ctx.delay(f) < ctx.deadline_s)) continue;
      double p;
      if (auto c = price_at(ctx, f, Proposer::kMd)) {
        p = *c;
      } else {
        p = std::min(negotiation_bounds(ctx, f).lower, ctx.payment_budget / f);
      }
      TradeOutcome t;
      t.f_alloc = f;
      t.p_unit = p;
      t.u_md = ctx.md_utility(f, p);
      t.u_server = ctx.server_utility(f, p);
      t.rounds = 1;
      t.converged = true;
      out.push_back({v.pending[r], j, t});
    }
  }
  return out;
}

std::vector<Offload> decide_pas(const SlotView& v, StrategyState& st) {
  const auto& servers = v.world->servers;
  PreferenceTable prefs;
  prefs.n_servers = static_cast<int>(servers.size());
  prefs.candidates.resize(v.pending.size());
  for (size_t r = 0; r < v.pending.size(); ++r) {
    for (size_t j = 0; j < servers.size(); ++j) {
      const MecServer& s = servers[j];
      const double avail = s.available_f();
      if (s.idle_cores() < 1 || !(avail > 0) || !(v.rate[r][j] > 0)) continue;
      TradeContext ctx = trade_context(v, static_cast<int>(r), static_cast<int>(j));
      const double p = st.pas_price[j];
      auto f_opt = optimal_allocation(ctx, p);
      if (!f_opt) continue;
      double f = std::min(*f_opt, avail);
      if (p > 0) f = std::min(f, ctx.payment_budget / p);
      if (!(ctx.delay(f) < ctx.deadline_s)) continue;
      TradeOutcome t;
      t.f_alloc = f;
      t.p_unit = p;
      t.u_md = ctx.md_utility(f, p);
      t.u_server = ctx.server_utility(f, p);
      t.rounds = 1;
      t.converged = true;
      if (t.u_md > 0 && t.u_server > 0)
        prefs.candidates[r].push_back({static_cast<int>(j), t, t.u_md, t.u_server});
    }
  }
  sort_preferences(prefs);
  MatchingResult m = match(prefs, current_quotas(*v.world), st);
  return from_assignment(v, prefs, m.assignment);
}

}  // namespace

std::vector<Offload> decide_offloading(const SlotView& v, StrategyState& st) {
  switch (v.cfg->strategy) {
    case StrategyKind::kLs:
      return {};
    case StrategyKind::kEcras:
      return decide_ecras(v, st);
    case StrategyKind::kPas:
      return decide_pas(v, st);
    case StrategyKind::kGcos: {
      PreferenceTable prefs = negotiated_preferences(v);
      int rounds = 0;
      auto choice = best_response_assignment(prefs, current_quotas(*v.world),
                                             v.cfg->gcos_max_rounds, &rounds);
      st.gcos_rounds += rounds;
      return from_assignment(v, prefs, choice);
    }
    case StrategyKind::kTjcct:
    case StrategyKind::kStcs:
      break;
  }
  PreferenceTable prefs = negotiated_preferences(v);
  MatchingResult m = match(prefs, current_quotas(*v.world), st);
  return from_assignment(v, prefs, m.assignment);
}

void update_pas_prices(const World& w, const ScenarioConfig& cfg, StrategyState& st) {
  for (size_t j = 0; j < w.servers.size(); ++j) {
    const MecServer& s = w.servers[j];
    double util = s.committed_f() / s.f_total_max;
    double& p = st.pas_price[j];
    p *= util > cfg.pas_threshold ? 1 + cfg.pas_factor : 1 - cfg.pas_factor;
    p = std::min(p, s.max_unit_price);
  }
}

double reach_radius(const ScenarioConfig& cfg, int next_epoch) {
  const double step = cfg.uav.v_max * cfg.grid.epoch_duration_s();
  const int left = std::max(0, cfg.grid.epochs() - 1 - next_epoch);
  return cfg.reach_speed_factor * step * left + step;
}

EpochProblem build_epoch_problem(const World& w, int epoch, const std::vector<ServedLink>& links,
                                 const std::vector<Task>& tasks) {
  const ScenarioConfig& cfg = w.config;
  const double epoch_s = cfg.grid.epoch_duration_s();
  const double slot_s = cfg.grid.slot_duration_s;
  EpochProblem prob;
  prob.altitude = cfg.uav.altitude;
  prob.path_loss_exp = cfg.channel.ple_aerial;
  prob.epoch_s = epoch_s;
  prob.v_max = cfg.uav.v_max;
  prob.d_safe = cfg.uav.d_safe;
  prob.area = cfg.area;
  prob.prop = cfg.propulsion;

  std::vector<int> n_links(w.uav_count(), 0);
  for (const auto& l : links) ++n_links[l.uav];
  for (int u = 0; u < w.uav_count(); ++u) {
    const MecServer& s = w.servers[w.uav_server[u]];
    UavTerm t;
    t.current = w.uav_track[u][epoch];
    t.target = cfg.uav_final[u];
    t.reach_radius = reach_radius(cfg, epoch + 1);
    t.flight_weight = (1 - s.weight) / s.energy_budget_j * slot_s * std::max(1, n_links[u]);
    prob.uavs.push_back(t);
  }

  for (const auto& l : links) {
    const Task& task = tasks[l.task];
    const MobileDevice& md = w.mds[l.md];
    const MecServer& s = w.servers[w.uav_server[l.uav]];
    // One mean Gauss-Markov step as the MD position forecast.
    const Vec2 v_mean = cfg.gm_alpha * md.velocity + (1 - cfg.gm_alpha) * md.mean_velocity;
    Vec2 predicted = md.position + v_mean * epoch_s;
    predicted.x() = std::clamp(predicted.x(), 0.0, cfg.area.x_max);
    predicted.y() = std::clamp(predicted.y(), 0.0, cfg.area.y_max);
    double p_los = cfg.fixed_los_for_trajectory
                       ? cfg.fixed_los_value
                       : los_probability_aerial((w.uav_track[l.uav][epoch] - predicted).norm(),
                                                cfg.uav.altitude, cfg.channel);
    double e_norm = cfg.qoe_energy_normalizer == QoeEnergyNormalizer::kServer
                        ? s.energy_budget_j
                        : md.energy_budget_j;
    LinkTerm lt;
    lt.uav = l.uav;
    lt.md_pos = predicted;
    lt.snr0 = md.tx_power_w * mean_aerial_gain_coefficient(p_los, cfg.channel) / cfg.channel.noise_w;
    lt.bandwidth = cfg.channel.bandwidth_aerial_hz;
    lt.size_bits = task.size_bits;
    lt.deadline_s = task.deadline_s;
    lt.theta0 = md.weight / std::log1p(task.deadline_s);
    lt.theta1 = (task.start_slot - task.gen_slot) * slot_s + task.total_cycles() / task.f_alloc;
    lt.theta2 = (1 - md.weight) * md.tx_power_w / e_norm;
    prob.links.push_back(lt);
  }
  return prob;
}

std::vector<Vec2> straight_line_positions(const World& w, int epoch) {
  const ScenarioConfig& cfg = w.config;
  const double epoch_s = cfg.grid.epoch_duration_s();
  const double step_max = cfg.uav.v_max * epoch_s;
  const double cruise = min_power_speed(cfg.uav.v_max, cfg.propulsion) * epoch_s;
  const int n = w.uav_count();
  std::vector<Vec2> next;
  for (int u = 0; u < n; ++u) next.push_back(w.uav_track[u][epoch]);

  for (int u = 0; u < n; ++u) {
    const Vec2 cur = w.uav_track[u][epoch];
    const Vec2 d = cfg.uav_final[u] - cur;
    const double dist = d.norm();
    if (dist <= 0) continue;
    const double need = std::max(0.0, dist - reach_radius(cfg, epoch + 1));
    double s = std::min({dist, std::max(cruise, need), step_max});
    auto clear = [&](const Vec2& q) {
      for (int o = 0; o < n; ++o)
        if (o != u && (next[o] - q).norm() < cfg.uav.d_safe) return false;
      return true;
    };
    Vec2 q = cur + d * (s / dist);
    for (int k = 0; k < 40 && !clear(q); ++k) {
      s *= 0.5;
      q = cur + d * (s / dist);
    }
    q.x() = std::clamp(q.x(), 0.0, cfg.area.x_max);
    q.y() = std::clamp(q.y(), 0.0, cfg.area.y_max);
    next[u] = q;
  }
  return next;
}

std::vector<Vec2> plan_uav_positions(const World& w, int epoch,
                                     const std::vector<ServedLink>& links,
                                     const std::vector<Task>& tasks, ScaResult* log) {
  if (w.config.strategy == StrategyKind::kStcs) return straight_line_positions(w, epoch);
  EpochProblem prob = build_epoch_problem(w, epoch, links, tasks);
  ScaOptions opts;
  opts.tol = w.config.sca_tol;
  opts.max_iter = w.config.sca_max_iter;
  ScaResult r = sca_loop(prob, opts);
  std::vector<Vec2> q = r.q;
  if (log) *log = std::move(r);
  return q;
}

}  // namespace uavmec

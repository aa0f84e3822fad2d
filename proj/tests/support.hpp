#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "uavmec/bargaining.hpp"
#include "uavmec/matching.hpp"
#include "uavmec/rng.hpp"
#include "uavmec/types.hpp"

namespace uavmec::testing {

// A negotiation context with default-scenario magnitudes.
inline TradeContext random_trade_context(Rng& rng) {
  TradeContext c;
  c.size_bits = uniform(rng, 1e6, 5e6);
  c.cycles = c.size_bits * uniform(rng, 500, 1500);
  c.deadline_s = uniform(rng, 0.5, 5);
  c.elapsed_s = uniform(rng, 0, 0.2) * c.deadline_s;
  c.rate = uniform(rng, 2e7, 2e8);
  c.md_weight = uniform(rng, 0.05, 0.95);
  c.tx_power_w = uniform(rng, 0.01, 0.3);
  c.payment_budget = 20;
  c.upload_energy_norm_j = uniform(rng, 3.6e4, 3.6e5);
  c.server_weight = uniform(rng, 0.05, 0.95);
  c.server_f_max = uniform(rng, 10e9, 40e9);
  c.server_price_max = 1e-9;
  c.server_energy_norm_j = uniform(rng, 3.6e4, 3.6e5);
  c.server_capacitance = 1e-27;
  c.flight_energy_j = uniform(rng, 0, 20);
  c.horizon = 10;
  return c;
}

// Maximizer of g over f_k = hi * k / n, k = 1..n.
template <class F>
double grid_argmax(F g, double hi, int n) {
  double best = -kInf, arg = 0;
  for (int k = 1; k <= n; ++k) {
    double f = hi * k / n;
    double v = g(f);
    if (v > best) {
      best = v;
      arg = f;
    }
  }
  return arg;
}

// Subgame-perfect first-period shares by explicit rollback: the final
// proposer takes everything; earlier, the proposer offers the responder its
// discounted continuation share.
inline Partition rollback_partition(double l_md, double l_server, int horizon, Proposer last) {
  double md = last == Proposer::kMd ? 1.0 : 0.0;
  double server = 1.0 - md;
  Proposer proposer = last;
  for (int t = horizon - 1; t >= 1; --t) {
    proposer = proposer == Proposer::kMd ? Proposer::kServer : Proposer::kMd;
    if (proposer == Proposer::kMd) {
      server = l_server * server;
      md = 1.0 - server;
    } else {
      md = l_md * md;
      server = 1.0 - md;
    }
  }
  return {md, server};
}

struct MatchingInstance {
  PreferenceTable prefs;
  std::vector<ServerQuota> quotas;
};

// Random instance shaped like a simulator slot: every allocation fits in one
// core's frequency and the frequency quota covers all idle cores. With
// `tight_frequency` the quota is drawn below that, so frequency can bind.
inline MatchingInstance random_matching_instance(Rng& rng, int n_tasks, int n_servers,
                                                 bool tight_frequency = false) {
  MatchingInstance in;
  in.prefs.n_servers = n_servers;
  in.prefs.candidates.resize(n_tasks);
  std::vector<double> f_core;
  for (int j = 0; j < n_servers; ++j) {
    f_core.push_back(uniform(rng, 2e9, 6e9));
    const int idle = static_cast<int>(uniform(rng, 0, 3.999));
    const double room = tight_frequency ? uniform(rng, 0.3, 1.0) * idle * f_core[j]
                                        : idle * f_core[j] + uniform(rng, 0, 5e9);
    in.quotas.push_back({idle, room});
  }
  for (int k = 0; k < n_tasks; ++k) {
    for (int j = 0; j < n_servers; ++j) {
      if (uniform(rng, 0, 1) < 0.2) continue;
      Candidate c;
      c.server = j;
      c.trade.f_alloc = uniform(rng, 0.2, 1.0) * f_core[j];
      c.v_task = uniform(rng, 0.01, 1);
      c.v_server = uniform(rng, 0.001, 0.1);
      c.trade.u_md = c.v_task;
      c.trade.u_server = c.v_server;
      in.prefs.candidates[k].push_back(c);
    }
  }
  sort_preferences(in.prefs);
  return in;
}

// Blocking-pair scan written independently of the library: k and j block when
// k prefers j to its match and j either holds a task it ranks below k or has
// an idle core and frequency room for k.
inline int count_blocking_pairs(const PreferenceTable& prefs, const std::vector<int>& assign,
                                const std::vector<ServerQuota>& quotas) {
  const int n = static_cast<int>(prefs.candidates.size());
  auto value = [&](int k, int j, bool server_side) {
    for (const auto& c : prefs.candidates[k])
      if (c.server == j) return server_side ? c.v_server : c.v_task;
    return -kInf;
  };
  auto f_of = [&](int k, int j) {
    for (const auto& c : prefs.candidates[k])
      if (c.server == j) return c.trade.f_alloc;
    return kInf;
  };
  int count = 0;
  for (int k = 0; k < n; ++k) {
    for (const auto& c : prefs.candidates[k]) {
      const int j = c.server;
      if (assign[k] == j) continue;
      if (assign[k] >= 0) {
        double cur = value(k, assign[k], false);
        if (!(c.v_task > cur || (c.v_task == cur && j < assign[k]))) continue;
      }
      std::vector<int> held;
      double load = 0;
      for (int m = 0; m < n; ++m)
        if (assign[m] == j) {
          held.push_back(m);
          load += f_of(m, j);
        }
      bool blocks = false;
      for (int m : held) {
        double vm = value(m, j, true);
        if (c.v_server > vm || (c.v_server == vm && k < m)) blocks = true;
      }
      if (static_cast<int>(held.size()) + 1 <= quotas[j].idle_cores &&
          load + c.trade.f_alloc <= quotas[j].available_f)
        blocks = true;
      if (blocks) ++count;
    }
  }
  return count;
}

}  // namespace uavmec::testing

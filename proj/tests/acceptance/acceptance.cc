// Acceptance checks: one PASS/FAIL line per criterion, details indented below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "../support.hpp"
#include "uavmec/bargaining.hpp"
#include "uavmec/channel.hpp"
#include "uavmec/config.hpp"
#include "uavmec/experiment.hpp"
#include "uavmec/matching.hpp"
#include "uavmec/mobility.hpp"
#include "uavmec/simulation.hpp"
#include "uavmec/trajectory.hpp"

using namespace uavmec;
using namespace uavmec::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  void fail(const std::string& why) {
    pass = false;
    notes.push_back("FAIL: " + why);
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Outcome&)>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  body(o);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s %2d %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, secs);
  for (const auto& n : o.notes) std::printf("     %s\n", n.c_str());
  std::fflush(stdout);
  failures += !o.pass;
}

// ---------------------------------------------------------------- trajectory helpers

LinkTerm random_link(Rng& rng, int uav, const Vec2& md) {
  ChannelParams cp;
  LinkTerm l;
  l.uav = uav;
  l.md_pos = md;
  l.snr0 = uniform(rng, 0.01, 0.3) * mean_aerial_gain_coefficient(uniform(rng, 0.1, 0.9), cp) /
           cp.noise_w;
  l.bandwidth = cp.bandwidth_aerial_hz;
  l.size_bits = uniform(rng, 1e6, 5e6);
  l.deadline_s = uniform(rng, 2, 5);
  const double w = uniform(rng, 0.1, 0.9);
  l.theta0 = w / std::log1p(l.deadline_s);
  l.theta1 = uniform(rng, 0.1, 0.8);
  l.theta2 = (1 - w) * 0.1 / 3.6e5;
  return l;
}

UavTerm uav_at(const Vec2& q, const Vec2& target, double weight) {
  UavTerm t;
  t.current = q;
  t.target = target;
  t.flight_weight = weight;
  return t;
}

Expansion expansion_at(const EpochProblem& p, const std::vector<Vec2>& q) {
  Expansion e;
  e.q = q;
  for (size_t u = 0; u < q.size(); ++u)
    e.phi.push_back(phi_exact((q[u] - p.uavs[u].current).norm() / p.epoch_s, p.prop));
  return e;
}

// ---------------------------------------------------------------- shared runs

struct Means {
  double utility = 0, rate = 0, delay = 0, ratio = 0;
  int n = 0;
};

std::vector<RunResult> g_default_runs;  // 10 seeds x all strategies, kept for criteria 4 and 7

}  // namespace

int main() {
  std::printf("Acceptance run\n");

  criterion(1, "closed-form allocation matches a 1e5-point grid (100 instances, 0.1%)",
            [](Outcome& o) {
              auto t0 = std::chrono::steady_clock::now();
              Rng rng = make_rng(101, Stream::kTest);
              int checked = 0;
              double worst = 0;
              while (checked < 100) {
                TradeContext c = random_trade_context(rng);
                const double p = uniform(rng, 0.05e-9, 1e-9);
                const double f_avl = uniform(rng, 5e9, 40e9);
                auto f = optimal_allocation(c, p);
                if (!f || !std::isfinite(*f) || *f >= f_avl || !(c.delay(*f) < c.deadline_s))
                  continue;
                const double fg =
                    grid_argmax([&](double x) { return c.md_utility(x, p); }, f_avl, 100000);
                worst = std::max(worst, std::abs(fg - *f) / *f);
                ++checked;
              }
              double secs =
                  std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
              o.note(fmt("worst relative gap %.3g, %.2f s", worst, secs));
              if (worst > 1e-3) o.fail("gap above 0.1%");
              if (secs >= 10) o.fail("runtime not under 10 s");
            });

  criterion(2, "price bounds are break-even points (100 instances, 1e-9)", [](Outcome& o) {
    Rng rng = make_rng(102, Stream::kTest);
    int checked = 0;
    double worst = 0;
    while (checked < 100) {
      TradeContext c = random_trade_context(rng);
      const double f = uniform(rng, 1e9, 10e9);
      if (!(c.delay(f) < c.deadline_s)) continue;
      PriceBounds b = price_bounds(c, f);
      worst = std::max({worst, std::abs(c.server_utility(f, b.lower)),
                        std::abs(c.md_utility(f, b.upper))});
      ++checked;
    }
    o.note(fmt("worst |utility| at a bound %.3g", worst));
    if (worst > 1e-9) o.fail("bound residual above 1e-9");
  });

  criterion(3, "SPE partition equals backward induction; bid equals ask", [](Outcome& o) {
    double worst = 0;
    for (int h = 2; h <= 8; h += 2)
      for (int a = 0; a <= 20; ++a)
        for (int b = 0; b <= 20; ++b)
          for (Proposer last : {Proposer::kMd, Proposer::kServer}) {
            Partition p = spe_partition(a / 20.0, b / 20.0, h, last);
            Partition r = rollback_partition(a / 20.0, b / 20.0, h, last);
            worst = std::max({worst, std::abs(p.md - r.md), std::abs(p.server - r.server)});
          }
    o.note(fmt("worst partition gap %.3g", worst));
    if (worst > 1e-9) o.fail("partition gap above 1e-9");

    Rng rng = make_rng(103, Stream::kTest);
    double worst_price = 0;
    for (int i = 0; i < 1000; ++i) {
      PriceBounds pb{uniform(rng, 0, 0.5e-9), 0};
      pb.upper = pb.lower + uniform(rng, 0, 0.5e-9);
      Partition x = spe_partition(uniform(rng, 0, 1), uniform(rng, 0, 1),
                                  1 + static_cast<int>(uniform(rng, 0, 9.999)),
                                  uniform(rng, 0, 1) < 0.5 ? Proposer::kMd : Proposer::kServer);
      // The MD bids the upper bound less its share; the server asks the lower
      // bound plus its share.
      const double bid = pb.upper - x.md * pb.surplus();
      const double ask = pb.lower + x.server * pb.surplus();
      const double settled = *consensus_price(pb, x);
      worst_price = std::max({worst_price, std::abs(bid - ask) / pb.upper,
                              std::abs(settled - ask) / pb.upper});
    }
    o.note(fmt("worst relative bid/ask gap %.3g", worst_price));
    if (worst_price > 1e-12) o.fail("bid/ask gap above 1e-12");
  });

  // Criteria 4, 7 and 8 share the default-scenario runs.
  {
    std::printf("     running the default scenario: 10 seeds x 6 strategies ...\n");
    std::fflush(stdout);
  }
  auto t_runs = std::chrono::steady_clock::now();
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    for (StrategyKind s : all_strategies()) {
      ScenarioConfig c;
      c.seed = seed;
      c.strategy = s;
      g_default_runs.push_back(run(c));
    }
  const double runs_secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_runs).count();

  criterion(4, "matching is stable; quotas hold over full default runs", [](Outcome& o) {
    Rng rng = make_rng(104, Stream::kTest);
    long blocking = 0;
    for (int i = 0; i < 200; ++i) {
      const int n_tasks = 1 + static_cast<int>(uniform(rng, 0, 5.999));
      const int n_servers = 1 + static_cast<int>(uniform(rng, 0, 2.999));
      auto in = random_matching_instance(rng, n_tasks, n_servers);
      MatchingResult m = run_matching(in.prefs, in.quotas);
      blocking += count_blocking_pairs(in.prefs, m.assignment, in.quotas);
      if (!respects_quotas(in.prefs, m, in.quotas)) o.fail("quota breach on a random instance");
    }
    o.note(fmt("blocking pairs over 200 instances: %.0f", static_cast<double>(blocking)));
    if (blocking) o.fail("blocking pairs found");

    long breaches = 0, run_blocking = 0, matchings = 0, violations = 0;
    for (const auto& r : g_default_runs) {
      breaches += r.strategy_state.quota_breaches;
      violations += static_cast<long>(r.violations.size());
      if (r.config.strategy == StrategyKind::kTjcct) {
        run_blocking += r.strategy_state.blocking_pairs;
        matchings += r.strategy_state.matchings;
      }
    }
    o.note(fmt("full runs: %.0f quota breaches, %.0f capacity/payment violations; TJCCT: %.0f "
               "matchings, %.0f blocking pairs",
               static_cast<double>(breaches), static_cast<double>(violations),
               static_cast<double>(matchings), static_cast<double>(run_blocking)));
    if (breaches || violations) o.fail("quota or occupancy violated during a run");
    if (run_blocking) o.fail("blocking pairs in simulator matchings");
  });

  criterion(5, "SCA surrogate tightness, lower bounds, monotone epochs, active constraints",
            [](Outcome& o) {
              Rng rng = make_rng(105, Stream::kTest);
              double tight = 0, rate_excess = 0, phi_excess = 0, safe_excess = 0;
              for (int i = 0; i < 10; ++i) {
                EpochProblem p;
                std::vector<Vec2> cur;
                for (int u = 0; u < 3; ++u) {
                  Vec2 q(uniform(rng, 100, 900), uniform(rng, 100, 900));
                  p.uavs.push_back(uav_at(q, {500, 500}, uniform(rng, 1e-7, 1e-4)));
                  cur.push_back(q);
                }
                for (int k = 0; k < 5; ++k) {
                  int u = static_cast<int>(uniform(rng, 0, 2.999));
                  p.links.push_back(random_link(
                      rng, u, cur[u] + Vec2(uniform(rng, -200, 200), uniform(rng, -200, 200))));
                }
                std::vector<Vec2> qh;
                for (int u = 0; u < 3; ++u)
                  qh.push_back(cur[u] + Vec2(uniform(rng, -20, 20), uniform(rng, -20, 20)));
                Expansion e = expansion_at(p, qh);
                const double exact = epoch_objective(p, qh);
                tight = std::max(tight, std::abs(surrogate_objective(p, e, qh) - exact) /
                                            std::max(1e-300, std::abs(exact)));

                // Rate bound, propulsion epigraph and safe distance on 1e4 samples each.
                const LinkTerm& l = p.links[0];
                const Vec2 qe = qh[l.uav];
                RateBound rb = taylor_rate_bound(l, qe, p.altitude, p.path_loss_exp);
                const Vec2 q0 = cur[0], qh0 = qh[0];
                const double phs = e.phi[0];
                for (int k = 0; k < 10000; ++k) {
                  Vec2 q(uniform(rng, -200, 1200), uniform(rng, -200, 1200));
                  const double x = (q - l.md_pos).squaredNorm();
                  const double r = mean_rate(l, x, p.altitude, p.path_loss_exp);
                  rate_excess = std::max(rate_excess, (rb(x) - r) / r);

                  Vec2 qp = q0 + Vec2(uniform(rng, -40, 40), uniform(rng, -40, 40));
                  const double phi = uniform(rng, 0.1, 10);
                  const double v = (qp - q0).norm() / p.epoch_s;
                  const double lhs = phi * phi + v * v;
                  phi_excess = std::max(
                      phi_excess, (phi_rhs(phi, qp, phs, qh0, q0, p.epoch_s) - lhs) / lhs);

                  Vec2 a = qh[0] + Vec2(uniform(rng, -30, 30), uniform(rng, -30, 30));
                  Vec2 b = qh[1] + Vec2(uniform(rng, -30, 30), uniform(rng, -30, 30));
                  const double d2 = (a - b).squaredNorm();
                  safe_excess = std::max(
                      safe_excess, (linearized_safe_distance(a, b, qh[0], qh[1]) - d2) /
                                       std::max(1.0, d2));
                }
              }
              o.note(fmt("tightness %.3g; bound excess rate %.3g, propulsion %.3g, safe %.3g",
                         tight, rate_excess, phi_excess, safe_excess));
              if (tight > 1e-12) o.fail("surrogate not tight at the expansion point");
              if (rate_excess > 1e-12 || phi_excess > 1e-12 || safe_excess > 1e-12)
                o.fail("a surrogate bound exceeds its exact counterpart");

              // Monotone SCA iterates in every epoch of the default runs.
              long epochs = 0, drops = 0, first_step_drops = 0, fallbacks = 0, caps = 0;
              for (const auto& r : g_default_runs) {
                if (r.config.strategy != StrategyKind::kTjcct) continue;
                for (const auto& ep : r.epochs) {
                  ++epochs;
                  fallbacks += ep.fallback;
                  caps += ep.hit_cap;
                  const auto& obj = ep.sca_objective;
                  for (size_t k = 2; k < obj.size(); ++k)
                    if (obj[k] < obj[k - 1] - 1e-9) ++drops;
                  if (obj.size() > 1 && obj[1] < obj[0] - 1e-9) ++first_step_drops;
                }
              }
              o.note(fmt("TJCCT epochs %.0f: iterate drops %.0f, fallbacks %.0f, iteration caps "
                         "%.0f",
                         static_cast<double>(epochs), static_cast<double>(drops),
                         static_cast<double>(fallbacks), static_cast<double>(caps)));
              o.note(fmt("first solves that lowered the start value to restore reachability: %.0f",
                         static_cast<double>(first_step_drops)));
              if (drops) o.fail("SCA objective decreased between iterates");

              // At a subproblem optimum the rate auxiliaries equal their bounds and the
              // propulsion epigraph is active.
              double rate_gap = 0, epi_gap = 0;
              for (int i = 0; i < 20; ++i) {
                EpochProblem p;
                Vec2 q0(uniform(rng, 200, 800), uniform(rng, 200, 800));
                p.uavs.push_back(uav_at(q0, {500, 500}, uniform(rng, 1e-7, 1e-4)));
                for (int k = 0; k < 3; ++k)
                  p.links.push_back(random_link(
                      rng, 0, q0 + Vec2(uniform(rng, -150, 150), uniform(rng, -150, 150))));
                Expansion e = expansion_at(p, {q0 + Vec2(uniform(rng, -10, 10), 0)});
                ScaIterate it = solve_convex_subproblem(p, e);
                if (!it.feasible) {
                  o.fail("subproblem infeasible");
                  continue;
                }
                for (size_t k = 0; k < p.links.size(); ++k) {
                  const double b = taylor_rate_bound(it.q[0], e.q[0], p.links[k], p.altitude,
                                                     p.path_loss_exp);
                  rate_gap = std::max(rate_gap, std::abs(it.rate_aux[k] - b) / b);
                }
                const double eta = p.prop.eta3 / (it.phi[0] * it.phi[0]);
                epi_gap = std::max(
                    epi_gap, std::abs(phi_epigraph(it.phi[0], it.q[0], e.phi[0], e.q[0],
                                                   p.uavs[0].current, p.epoch_s, p.prop)) /
                                 eta);
              }
              o.note(fmt("active-constraint gaps: rate %.3g, propulsion %.3g", rate_gap, epi_gap));
              if (rate_gap > 1e-6 || epi_gap > 1e-6) o.fail("constraint not active at optimum");
            });

  criterion(6, "single-UAV subproblem matches a 200x200 grid within one cell (20 instances)",
            [](Outcome& o) {
              Rng rng = make_rng(106, Stream::kTest);
              double worst_cells = 0;
              for (int i = 0; i < 20; ++i) {
                EpochProblem p;
                Vec2 q0(uniform(rng, 200, 800), uniform(rng, 200, 800));
                p.uavs.push_back(uav_at(q0, {500, 500}, uniform(rng, 1e-7, 1e-5)));
                p.links.push_back(random_link(
                    rng, 0, q0 + Vec2(uniform(rng, -150, 150), uniform(rng, -150, 150))));
                Expansion e = expansion_at(p, {q0});
                ScaIterate it = solve_convex_subproblem(p, e);
                if (!it.feasible) {
                  o.fail("subproblem infeasible");
                  continue;
                }
                const double step = p.v_max * p.epoch_s;
                const int n = 200;
                const double cell = 2 * step / n;
                RateBound rb = taylor_rate_bound(p.links[0], q0, p.altitude, p.path_loss_exp);
                double best = -kInf;
                Vec2 arg = q0;
                for (int a = 0; a <= n; ++a)
                  for (int b = 0; b <= n; ++b) {
                    Vec2 q = q0 + Vec2(-step + a * cell, -step + b * cell);
                    if ((q - q0).norm() > step) continue;
                    if (rb((q - p.links[0].md_pos).squaredNorm()) < 1e-3 * rb.value_at_expansion)
                      continue;
                    double v = surrogate_objective(p, e, {q});
                    if (v > best) {
                      best = v;
                      arg = q;
                    }
                  }
                const Vec2 d = (it.q[0] - arg).cwiseAbs();
                worst_cells = std::max(worst_cells, d.maxCoeff() / cell);
                if (it.surrogate < best - 1e-9 * std::abs(best))
                  o.fail("grid point beats the solver");
              }
              o.note(fmt("worst offset %.3g cells", worst_cells));
              if (worst_cells > 1) o.fail("optimum more than one cell from the grid argmax");
            });

  criterion(7, "trajectories, deadlines and payments comply over full runs", [](Outcome& o) {
    long track_viol = 0, late = 0, over_budget = 0, completed = 0, paid = 0;
    for (const auto& r : g_default_runs) {
      const ScenarioConfig& c = r.config;
      std::vector<UavTrack> tracks;
      for (int u = 0; u < c.uav_count(); ++u)
        tracks.push_back({c.uav_initial[u], c.uav_final[u], r.uav_track[u]});
      UavLimits lim = c.uav;
      lim.area = c.area;
      auto v = check_uav_constraints(tracks, lim, c.grid);
      track_viol += static_cast<long>(v.size());
      if (!v.empty() && track_viol == static_cast<long>(v.size()))
        o.note("first violation: " + v[0].kind + fmt(" uav %.0f epoch %.0f amount %.3g",
                                                      v[0].uav, v[0].epoch, v[0].amount));
      for (const auto& t : r.tasks) {
        if (t.status == TaskStatus::kCompleted) {
          ++completed;
          late += !(t.total_delay_s(c.grid.slot_duration_s) <= t.deadline_s);
        }
        if (t.server >= 0) {
          ++paid;
          over_budget += t.payment > c.md_payment_budget;
        }
      }
    }
    o.note(fmt("%.0f runs: %.0f track violations; %.0f completed tasks, %.0f late",
               static_cast<double>(g_default_runs.size()), static_cast<double>(track_viol),
               static_cast<double>(completed), static_cast<double>(late)));
    o.note(fmt("%.0f offloads, %.0f above the payment budget", static_cast<double>(paid),
               static_cast<double>(over_budget)));
    if (track_viol) o.fail("UAV constraint violated");
    if (late) o.fail("completed task beyond its deadline");
    if (over_budget) o.fail("payment above budget");
  });

  criterion(8, "TJCCT dominates every baseline on the default scenario (10 seeds)",
            [&](Outcome& o) {
              std::map<StrategyKind, Means> m;
              for (const auto& r : g_default_runs) {
                Means& x = m[r.config.strategy];
                x.utility += r.report.system_utility;
                x.rate += r.report.processing_rate;
                x.delay += r.report.completion_delay;
                x.ratio += r.report.completion_ratio;
                ++x.n;
              }
              for (auto& [s, x] : m) {
                x.utility /= x.n;
                x.rate /= x.n;
                x.delay /= x.n;
                x.ratio /= x.n;
                o.note(std::string(to_string(s)) +
                       fmt(": utility %.2f, rate %.4g cycles/s, delay %.4f s, ratio %.4f",
                           x.utility, x.rate, x.delay, x.ratio));
              }
              o.note(fmt("60 runs took %.0f s", runs_secs));
              const Means& t = m[StrategyKind::kTjcct];
              int small = 0, large = 0;
              auto compare = [&](const char* name, StrategyKind s, double mine, double theirs,
                                 bool higher_better) {
                const bool ok = higher_better ? mine >= theirs : mine <= theirs;
                if (ok) return;
                const double rel = std::abs(mine - theirs) / std::max(1e-300, std::abs(theirs));
                (rel <= 0.02 ? small : large)++;
                o.note(std::string("inversion: ") + name + " vs " + to_string(s) +
                       fmt(" (%.2f%%)", 100 * rel));
              };
              for (StrategyKind s : all_strategies()) {
                if (s == StrategyKind::kTjcct) continue;
                const Means& b = m[s];
                compare("utility", s, t.utility, b.utility, true);
                compare("processing rate", s, t.rate, b.rate, true);
                compare("completion ratio", s, t.ratio, b.ratio, true);
                compare("completion delay", s, t.delay, b.delay, false);
              }
              if (large > 0 || small > 1)
                o.fail(fmt("%.0f inversions beyond 2%%, %.0f within", large, small));
              const double ls = m[StrategyKind::kLs].ratio;
              for (StrategyKind s : all_strategies())
                if (s != StrategyKind::kLs && !(m[s].ratio > ls))
                  o.fail(std::string("LS not strictly worst on completion ratio vs ") +
                         to_string(s));
              if (runs_secs > 600) o.fail("default runs took longer than 10 min");
            });

  criterion(9, "TJCCT utility rises with the MD count (10..90, 3 seeds)", [](Outcome& o) {
    std::vector<double> means;
    for (int n : {10, 30, 50, 70, 90}) {
      double sum = 0;
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        ScenarioConfig c;
        c.seed = seed;
        c.md_count = n;
        sum += run(c).report.system_utility;
      }
      means.push_back(sum / 3);
      o.note(fmt("%.0f MDs: mean utility %.2f", n, means.back()));
    }
    int small = 0, large = 0;
    for (size_t k = 1; k < means.size(); ++k)
      if (means[k] < means[k - 1])
        ((means[k - 1] - means[k]) / std::abs(means[k - 1]) <= 0.02 ? small : large)++;
    if (large > 0 || small > 1) o.fail("utility not nondecreasing in the MD count");
  });

  criterion(10, "identical config and seed give byte-identical summaries", [](Outcome& o) {
    ScenarioConfig c;
    c.grid.total_slots = 200;
    auto plan = make_plan(c, all_strategies(), {7}, {}, "");
    std::vector<RunSummary> a, b;
    for (const auto& item : plan.items) {
      a.push_back(summarize(item, run(item.config)));
      b.push_back(summarize(item, run(item.config)));
    }
    const std::string sa = summary_csv(a), sb = summary_csv(b);
    o.note(fmt("%.0f bytes per summary", static_cast<double>(sa.size())));
    if (sa != sb) o.fail("summaries differ");
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}

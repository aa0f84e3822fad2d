#include <doctest.h>

#include <functional>

#include "support.hpp"
#include "uavmec/matching.hpp"
#include "uavmec/strategies.hpp"

using namespace uavmec;
using uavmec::testing::count_blocking_pairs;
using uavmec::testing::random_matching_instance;

namespace {

Candidate cand(int server, double v_task, double v_server, double f) {
  Candidate c;
  c.server = server;
  c.v_task = v_task;
  c.v_server = v_server;
  c.trade.f_alloc = f;
  c.trade.u_md = v_task;
  c.trade.u_server = v_server;
  return c;
}

bool quota_ok(const PreferenceTable& p, const std::vector<int>& assign,
              const std::vector<ServerQuota>& q) {
  std::vector<int> cores(p.n_servers, 0);
  std::vector<double> load(p.n_servers, 0);
  for (size_t k = 0; k < assign.size(); ++k) {
    if (assign[k] < 0) continue;
    const Candidate* c = p.find(static_cast<int>(k), assign[k]);
    if (!c) return false;
    ++cores[assign[k]];
    load[assign[k]] += c->trade.f_alloc;
  }
  for (int j = 0; j < p.n_servers; ++j)
    if (cores[j] > q[j].idle_cores || load[j] > q[j].available_f) return false;
  return true;
}

}  // namespace

TEST_CASE("single pair is matched") {
  PreferenceTable p;
  p.n_servers = 1;
  p.candidates = {{cand(0, 0.3, 0.01, 1e9)}};
  MatchingResult m = run_matching(p, {{1, 5e9}});
  CHECK(m.assignment[0] == 0);
  CHECK(m.matched[0] == std::vector<int>{0});
}

TEST_CASE("core quota keeps the two tasks the server ranks highest") {
  PreferenceTable p;
  p.n_servers = 1;
  p.candidates = {{cand(0, 0.5, 0.02, 1e9)}, {cand(0, 0.5, 0.05, 1e9)}, {cand(0, 0.5, 0.03, 1e9)}};
  std::vector<ServerQuota> q = {{2, 10e9}};
  MatchingResult m = run_matching(p, q);
  CHECK(m.assignment == std::vector<int>{-1, 0, 0});
  CHECK(m.rejections.size() == 1);
  CHECK(m.rejections[0].task == 0);
  CHECK(m.rejections[0].reason == "cores");
  CHECK(blocking_pairs(p, m, q).empty());

  // Enumerate every quota-feasible assignment: the matching is the only one
  // without a blocking pair.
  int stable = 0;
  for (int a = -1; a <= 0; ++a)
    for (int b = -1; b <= 0; ++b)
      for (int c = -1; c <= 0; ++c) {
        std::vector<int> as = {a, b, c};
        if (!quota_ok(p, as, q)) continue;
        if (count_blocking_pairs(p, as, q) == 0) {
          ++stable;
          CHECK(as == m.assignment);
        }
      }
  CHECK(stable == 1);
}

TEST_CASE("ties break by server id for tasks and by task id for servers") {
  PreferenceTable p;
  p.n_servers = 2;
  p.candidates = {{cand(1, 0.4, 0.01, 1e9), cand(0, 0.4, 0.01, 1e9)},
                  {cand(0, 0.4, 0.01, 1e9)}};
  sort_preferences(p);
  CHECK(p.candidates[0][0].server == 0);
  MatchingResult m = run_matching(p, {{1, 5e9}, {1, 5e9}});
  CHECK(m.assignment[0] == 0);  // task 0 wins server 0 on the id tie-break
  CHECK(m.assignment[1] == -1);
}

TEST_CASE("preference lists follow independently re-sorted utilities") {
  Rng rng = make_rng(1, Stream::kTest);
  auto in = random_matching_instance(rng, 6, 3);
  for (const auto& list : in.prefs.candidates)
    for (size_t i = 1; i < list.size(); ++i) {
      bool ordered = list[i - 1].v_task > list[i].v_task ||
                     (list[i - 1].v_task == list[i].v_task && list[i - 1].server < list[i].server);
      CHECK(ordered);
    }
}

TEST_CASE("deferred acceptance is stable on random per-core instances") {
  Rng rng = make_rng(2, Stream::kTest);
  for (int i = 0; i < 200; ++i) {
    const int n_tasks = 1 + static_cast<int>(uniform(rng, 0, 5.999));
    const int n_servers = 1 + static_cast<int>(uniform(rng, 0, 2.999));
    auto in = random_matching_instance(rng, n_tasks, n_servers);
    MatchingResult m = run_matching(in.prefs, in.quotas);
    CHECK(count_blocking_pairs(in.prefs, m.assignment, in.quotas) == 0);
    CHECK(blocking_pairs(in.prefs, m, in.quotas).empty());
    CHECK(respects_quotas(in.prefs, m, in.quotas));
    CHECK(quota_ok(in.prefs, m.assignment, in.quotas));
    CHECK(m.proposals <= n_tasks * n_servers);
    for (int k = 0; k < n_tasks; ++k) {
      int held_by = 0;
      for (const auto& h : m.matched)
        for (int t : h) held_by += t == k;
      CHECK(held_by == (m.assignment[k] >= 0 ? 1 : 0));
    }
  }
}

TEST_CASE("quotas hold even when frequency binds") {
  Rng rng = make_rng(3, Stream::kTest);
  for (int i = 0; i < 200; ++i) {
    auto in = random_matching_instance(rng, 6, 3, true);
    MatchingResult m = run_matching(in.prefs, in.quotas);
    CHECK(respects_quotas(in.prefs, m, in.quotas));
  }
}

TEST_CASE("a binding frequency quota can rule out every stable assignment") {
  // Capacity 10 with two cores; the server ranks a (8) > b (5) > c (2).
  PreferenceTable p;
  p.n_servers = 1;
  p.candidates = {{cand(0, 1, 0.3, 8)}, {cand(0, 1, 0.2, 5)}, {cand(0, 1, 0.1, 2)}};
  std::vector<ServerQuota> q = {{2, 10}};
  int feasible = 0, stable = 0;
  for (int a = -1; a <= 0; ++a)
    for (int b = -1; b <= 0; ++b)
      for (int c = -1; c <= 0; ++c) {
        std::vector<int> as = {a, b, c};
        if (!quota_ok(p, as, q)) continue;
        ++feasible;
        stable += count_blocking_pairs(p, as, q) == 0;
      }
  CHECK(feasible > 0);
  CHECK(stable == 0);
  CHECK(respects_quotas(p, run_matching(p, q), q));
}

TEST_CASE("best-response assignment reaches the pure equilibrium") {
  // Each task strictly prefers a distinct server and every server has room
  // for both, so the equilibrium is unique.
  PreferenceTable p;
  p.n_servers = 2;
  p.candidates = {{cand(0, 0.9, 0.01, 1e9), cand(1, 0.2, 0.01, 1e9)},
                  {cand(1, 0.8, 0.01, 1e9), cand(0, 0.1, 0.01, 1e9)}};
  std::vector<ServerQuota> q = {{2, 5e9}, {2, 5e9}};
  int rounds = 0;
  auto choice = best_response_assignment(p, q, 20, &rounds);
  CHECK(choice == std::vector<int>{0, 1});
  CHECK(rounds <= 2);

  // Exhaustive check that this is the only assignment where nobody gains by moving.
  int equilibria = 0;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) {
      std::vector<int> as = {a, b};
      if (!quota_ok(p, as, q)) continue;
      bool stable = true;
      for (int k = 0; k < 2 && stable; ++k) {
        double cur = as[k] >= 0 ? p.find(k, as[k])->v_task : 0;
        for (const auto& c : p.candidates[k]) {
          std::vector<int> alt = as;
          alt[k] = c.server;
          if (c.v_task > cur && quota_ok(p, alt, q)) stable = false;
        }
      }
      if (stable) {
        ++equilibria;
        CHECK(as == choice);
      }
    }
  CHECK(equilibria == 1);
}

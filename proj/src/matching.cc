#include "uavmec/matching.hpp"

#include <algorithm>
#include <deque>

namespace uavmec {

namespace {

constexpr double kFitTol = 1e-9;

// True when server j ranks task a ahead of task b.
bool server_prefers(const PreferenceTable& prefs, int j, int a, int b) {
  const Candidate* ca = prefs.find(a, j);
  const Candidate* cb = prefs.find(b, j);
  if (ca->v_server != cb->v_server) return ca->v_server > cb->v_server;
  return a < b;
}

}  // namespace

const Candidate* PreferenceTable::find(int task, int server) const {
  for (const auto& c : candidates[task])
    if (c.server == server) return &c;
  return nullptr;
}

void sort_preferences(PreferenceTable& prefs) {
  for (auto& list : prefs.candidates)
    std::sort(list.begin(), list.end(), [](const Candidate& a, const Candidate& b) {
      if (a.v_task != b.v_task) return a.v_task > b.v_task;
      return a.server < b.server;
    });
}

MatchingResult run_matching(const PreferenceTable& prefs, const std::vector<ServerQuota>& quotas) {
  const int n_tasks = static_cast<int>(prefs.candidates.size());
  const int n_servers = prefs.n_servers;
  MatchingResult m;
  m.assignment.assign(n_tasks, -1);
  m.matched.assign(n_servers, {});

  std::vector<size_t> next(n_tasks, 0);
  std::deque<int> free;
  for (int k = 0; k < n_tasks; ++k) free.push_back(k);

  while (!free.empty()) {
    int k = free.front();
    free.pop_front();
    if (next[k] >= prefs.candidates[k].size()) continue;
    const Candidate& c = prefs.candidates[k][next[k]++];
    const int j = c.server;
    ++m.proposals;

    auto& held = m.matched[j];
    held.push_back(k);
    std::sort(held.begin(), held.end(),
              [&](int a, int b) { return server_prefers(prefs, j, a, b); });

    const ServerQuota& q = quotas[j];
    int cores = 0;
    double f_sum = 0;
    size_t keep = 0;
    for (; keep < held.size(); ++keep) {
      double f = prefs.find(held[keep], j)->trade.f_alloc;
      if (cores + 1 > q.idle_cores || f_sum + f > q.available_f * (1 + kFitTol)) break;
      ++cores;
      f_sum += f;
    }
    for (size_t i = keep; i < held.size(); ++i) {
      int r = held[i];
      m.assignment[r] = -1;
      m.rejections.push_back({r, j, cores + 1 > q.idle_cores ? "cores" : "frequency"});
      free.push_back(r);
    }
    held.resize(keep);
    for (int t : held) m.assignment[t] = j;
  }
  for (auto& held : m.matched) std::sort(held.begin(), held.end());
  return m;
}

std::vector<BlockingPair> blocking_pairs(const PreferenceTable& prefs, const MatchingResult& m,
                                         const std::vector<ServerQuota>& quotas) {
  std::vector<BlockingPair> out;
  const int n_tasks = static_cast<int>(prefs.candidates.size());
  for (int k = 0; k < n_tasks; ++k) {
    for (const Candidate& c : prefs.candidates[k]) {
      const int j = c.server;
      if (j == m.assignment[k]) break;  // everything after is less preferred
      if (c.v_task <= 0 || c.v_server <= 0) continue;
      const auto& held = m.matched[j];
      bool block = false;
      double f_sum = 0;
      for (int t : held) {
        if (server_prefers(prefs, j, k, t)) block = true;
        f_sum += prefs.find(t, j)->trade.f_alloc;
      }
      if (static_cast<int>(held.size()) < quotas[j].idle_cores &&
          f_sum + c.trade.f_alloc <= quotas[j].available_f * (1 + kFitTol))
        block = true;
      if (block) out.push_back({k, j});
    }
  }
  return out;
}

bool respects_quotas(const PreferenceTable& prefs, const MatchingResult& m,
                     const std::vector<ServerQuota>& quotas, double tol) {
  for (int j = 0; j < prefs.n_servers; ++j) {
    const auto& held = m.matched[j];
    if (static_cast<int>(held.size()) > quotas[j].idle_cores) return false;
    double f_sum = 0;
    for (int t : held) {
      const Candidate* c = prefs.find(t, j);
      if (!c || m.assignment[t] != j) return false;
      f_sum += c->trade.f_alloc;
    }
    if (f_sum > quotas[j].available_f * (1 + tol)) return false;
  }
  for (size_t k = 0; k < m.assignment.size(); ++k) {
    int j = m.assignment[k];
    if (j >= 0 && std::find(m.matched[j].begin(), m.matched[j].end(), static_cast<int>(k)) ==
                      m.matched[j].end())
      return false;
  }
  return true;
}

}  // namespace uavmec

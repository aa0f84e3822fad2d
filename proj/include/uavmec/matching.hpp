#pragma once

#include <vector>

#include "uavmec/types.hpp"

namespace uavmec {

struct Candidate {
  int server = 0;
  TradeOutcome trade;
  double v_task = 0;    // MD utility
  double v_server = 0;  // server revenue
};

struct ServerQuota {
  int idle_cores = 0;
  double available_f = 0;
};

// candidates[k] holds task k's acceptable servers, sorted by (v_task desc,
// server asc). Pairs that failed negotiation or have a nonpositive value on
// either side are left out.
struct PreferenceTable {
  int n_servers = 0;
  std::vector<std::vector<Candidate>> candidates;
  const Candidate* find(int task, int server) const;
};

void sort_preferences(PreferenceTable& prefs);

// Task-proposing deferred acceptance. Each server keeps the longest prefix of
// all offers it has received, ranked by (v_server desc, task asc), that fits
// in its idle cores and available frequency; everything below the first offer
// that does not fit is rejected.
MatchingResult run_matching(const PreferenceTable& prefs, const std::vector<ServerQuota>& quotas);

struct BlockingPair {
  int task = 0;
  int server = 0;
};

// Pairs (k, j) where k prefers j to its assignment and j either holds a task
// it ranks below k or has an idle core and frequency room for k. When every
// allocation fits in one core and the frequency quota covers all idle cores,
// the matching from run_matching has none.
std::vector<BlockingPair> blocking_pairs(const PreferenceTable& prefs, const MatchingResult& m,
                                         const std::vector<ServerQuota>& quotas);

bool respects_quotas(const PreferenceTable& prefs, const MatchingResult& m,
                     const std::vector<ServerQuota>& quotas, double tol = 1e-9);

}  // namespace uavmec

#include "uavmec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uavmec {

void MetricsAccumulator::add_completion(double cycles, double delay_s) {
  cycles_ += cycles;
  delays_.push_back(delay_s);
}

MetricsReport MetricsAccumulator::report(double elapsed_s) const {
  MetricsReport r;
  r.system_utility = utility_;
  r.processing_rate = elapsed_s > 0 ? cycles_ / elapsed_s : 0.0;
  r.generated = generated_;
  r.completed = completed();
  if (!delays_.empty())
    r.completion_delay =
        std::accumulate(delays_.begin(), delays_.end(), 0.0) / static_cast<double>(delays_.size());
  r.completion_ratio =
      generated_ > 0 ? static_cast<double>(r.completed) / static_cast<double>(generated_) : 1.0;
  return r;
}

std::vector<MetricsReport> metrics_by_slot(const std::vector<Task>& tasks,
                                           const std::vector<double>& slot_utility,
                                           const TimeGrid& grid) {
  const int n = grid.total_slots;
  const double dt = grid.slot_duration_s;
  std::vector<long> generated(n, 0);
  std::vector<std::vector<const Task*>> done(n);
  for (const auto& t : tasks) {
    ++generated[t.gen_slot];
    if (t.status != TaskStatus::kCompleted) continue;
    // Completion instant t_c falls in the slot that ends at or after it.
    int s = std::clamp(static_cast<int>(std::ceil(t.completion_time_s / dt - 1e-9)) - 1, 0, n - 1);
    done[s].push_back(&t);
  }
  std::vector<MetricsReport> rows;
  MetricsAccumulator acc;
  for (int s = 0; s < n; ++s) {
    acc.add_generated(generated[s]);
    if (s < static_cast<int>(slot_utility.size())) acc.add_utility(slot_utility[s]);
    for (const Task* t : done[s]) acc.add_completion(t->total_cycles(), t->total_delay_s(dt));
    rows.push_back(acc.report((s + 1) * dt));
  }
  return rows;
}

MetricsReport compute_metrics(const std::vector<Task>& tasks,
                              const std::vector<double>& slot_utility, const TimeGrid& grid) {
  MetricsAccumulator acc;
  for (double u : slot_utility) acc.add_utility(u);
  for (const auto& t : tasks) {
    acc.add_generated();
    if (t.status == TaskStatus::kCompleted)
      acc.add_completion(t.total_cycles(), t.total_delay_s(grid.slot_duration_s));
  }
  return acc.report(grid.horizon_s());
}

}  // namespace uavmec

#pragma once

#include <vector>

#include "uavmec/types.hpp"

namespace uavmec {

struct MetricsReport {
  double system_utility = 0;
  double processing_rate = 0;     // completed cycles per second of horizon
  double completion_delay = kNaN; // mean generation-to-completion time, s
  double completion_ratio = 1;    // completed / generated, 1 when nothing arrived
  long generated = 0;
  long completed = 0;
};

class MetricsAccumulator {
 public:
  void add_generated(long n = 1) { generated_ += n; }
  void add_utility(double u) { utility_ += u; }
  void add_completion(double cycles, double delay_s);

  long generated() const { return generated_; }
  long completed() const { return static_cast<long>(delays_.size()); }
  double utility() const { return utility_; }
  MetricsReport report(double elapsed_s) const;

 private:
  double utility_ = 0;
  double cycles_ = 0;
  std::vector<double> delays_;
  long generated_ = 0;
};

// Offline recomputation from task records and per-slot utilities.
MetricsReport compute_metrics(const std::vector<Task>& tasks,
                              const std::vector<double>& slot_utility, const TimeGrid& grid);

// Cumulative metrics at the end of every slot: row s covers [0, (s + 1) delta].
std::vector<MetricsReport> metrics_by_slot(const std::vector<Task>& tasks,
                                           const std::vector<double>& slot_utility,
                                           const TimeGrid& grid);

}  // namespace uavmec

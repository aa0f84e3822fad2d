#include "uavmec/experiment.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace uavmec {

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::kNone: return "none";
    case SweepAxis::kMdCount: return "md-count";
    case SweepAxis::kTaskSize: return "task-size";
    case SweepAxis::kServerFreq: return "server-freq";
    case SweepAxis::kTime: return "time";
  }
  return "?";
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

Sweep parse_sweep(const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep must look like axis=start:step:stop");
  const std::string name = spec.substr(0, eq);
  Sweep s;
  for (SweepAxis a : {SweepAxis::kMdCount, SweepAxis::kTaskSize, SweepAxis::kServerFreq,
                      SweepAxis::kTime})
    if (name == to_string(a)) s.axis = a;
  if (s.axis == SweepAxis::kNone) throw ConfigError("unknown sweep axis: " + name);

  double start, step, stop;
  char c1, c2, extra;
  std::istringstream in(spec.substr(eq + 1));
  if (!(in >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' || (in >> extra))
    throw ConfigError("malformed sweep range: " + spec.substr(eq + 1));
  if (!(step > 0) || stop < start) throw ConfigError("sweep needs step > 0 and stop >= start");
  const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (int i = 0; i < n; ++i) s.values.push_back(start + i * step);
  return s;
}

namespace {

Range scaled(const Range& r, double factor) { return {r.lo * factor, r.hi * factor}; }

}  // namespace

ScenarioConfig apply_sweep(const ScenarioConfig& base, SweepAxis axis, double value) {
  ScenarioConfig c = base;
  switch (axis) {
    case SweepAxis::kNone:
      break;
    case SweepAxis::kMdCount:
      c.md_count = static_cast<int>(std::lround(value));
      break;
    case SweepAxis::kTaskSize: {
      double mean = 0.5 * (base.task_size_bits.lo + base.task_size_bits.hi);
      c.task_size_bits = scaled(base.task_size_bits, value * 1e6 / mean);
      break;
    }
    case SweepAxis::kServerFreq: {
      double mean = 0.5 * (base.uav_cpu_hz.lo + base.uav_cpu_hz.hi);
      double f = value * 1e9 / mean;
      c.uav_cpu_hz = scaled(base.uav_cpu_hz, f);
      c.mbs_cpu_hz = scaled(base.mbs_cpu_hz, f);
      break;
    }
    case SweepAxis::kTime:
      c.grid.total_slots = static_cast<int>(std::lround(value));
      break;
  }
  c.validate();
  return c;
}

ExperimentPlan make_plan(const ScenarioConfig& base, const std::vector<StrategyKind>& strategies,
                         const std::vector<std::uint64_t>& seeds, const Sweep& sweep,
                         const std::string& out_dir) {
  ExperimentPlan plan;
  plan.out_dir = out_dir;
  plan.sweep = sweep;
  std::vector<double> values = sweep.axis == SweepAxis::kNone ? std::vector<double>{0.0}
                                                               : sweep.values;
  std::set<std::string> ids;
  for (double v : values) {
    for (StrategyKind s : strategies) {
      for (std::uint64_t seed : seeds) {
        PlanItem it;
        it.strategy = s;
        it.seed = seed;
        it.axis = sweep.axis;
        it.value = v;
        it.config = apply_sweep(base, sweep.axis, v);
        it.config.strategy = s;
        it.config.seed = seed;
        it.run_id = std::string(to_string(s)) + "_s" + std::to_string(seed);
        if (sweep.axis != SweepAxis::kNone)
          it.run_id += std::string("_") + to_string(sweep.axis) + "_" + format_number(v);
        if (!ids.insert(it.run_id).second) throw ConfigError("duplicate run: " + it.run_id);
        plan.items.push_back(std::move(it));
      }
    }
  }
  if (plan.items.empty()) throw ConfigError("empty experiment plan");
  return plan;
}

RunSummary summarize(const PlanItem& item, const RunResult& r) {
  RunSummary s;
  s.item = item;
  s.report = r.report;
  s.violations = r.violations.size();
  auto rows = metrics_by_slot(r.tasks, r.slot_utility, r.config.grid);
  for (size_t k = r.config.grid.slots_per_epoch; k <= rows.size(); k += r.config.grid.slots_per_epoch)
    s.per_epoch.push_back(rows[k - 1]);
  s.uav_track = r.uav_track;
  return s;
}

std::string summary_csv(const std::vector<RunSummary>& runs) {
  std::string out =
      "run_id,strategy,seed,sweep_axis,sweep_value,system_utility,processing_rate,"
      "completion_delay,completion_ratio,generated,completed,violations\n";
  for (const auto& s : runs) {
    out += s.item.run_id + "," + to_string(s.item.strategy) + "," + std::to_string(s.item.seed) +
           "," + to_string(s.item.axis) + "," + format_number(s.item.value) + "," +
           format_number(s.report.system_utility) + "," + format_number(s.report.processing_rate) +
           "," + format_number(s.report.completion_delay) + "," +
           format_number(s.report.completion_ratio) + "," + std::to_string(s.report.generated) +
           "," + std::to_string(s.report.completed) + "," + std::to_string(s.violations) + "\n";
  }
  return out;
}

std::string metrics_csv(const RunResult& r) {
  const TimeGrid& g = r.config.grid;
  auto rows = metrics_by_slot(r.tasks, r.slot_utility, g);
  std::string out =
      "slot,epoch,slot_utility,system_utility,processing_rate,completion_delay,completion_ratio\n";
  for (size_t s = 0; s < rows.size(); ++s) {
    const auto& m = rows[s];
    out += std::to_string(s + 1) + "," + std::to_string(epoch_of(g, static_cast<int>(s)) + 1) +
           "," + format_number(s < r.slot_utility.size() ? r.slot_utility[s] : 0.0) + "," +
           format_number(m.system_utility) + "," + format_number(m.processing_rate) + "," +
           format_number(m.completion_delay) + "," + format_number(m.completion_ratio) + "\n";
  }
  return out;
}

std::string events_csv(const RunResult& r) {
  const double dt = r.config.grid.slot_duration_s;
  std::string out =
      "task,md,gen_slot,decision_slot,status,server,size_bits,cycles,deadline_s,f_alloc,price,"
      "payment,u_md,u_server,delay_s,completion_time_s\n";
  for (const auto& t : r.tasks) {
    bool decided = t.start_slot >= 0;
    out += std::to_string(t.id + 1) + "," + std::to_string(t.md + 1) + "," +
           std::to_string(t.gen_slot + 1) + "," +
           (decided ? std::to_string(t.start_slot + 1) : std::string()) + "," + to_string(t.status) +
           "," + (t.server >= 0 ? std::to_string(t.server + 1) : std::string(decided ? "local" : "")) +
           "," + format_number(t.size_bits) + "," + format_number(t.total_cycles()) + "," +
           format_number(t.deadline_s) + "," + format_number(t.f_alloc) + "," +
           format_number(t.price) + "," + format_number(t.payment) + "," + format_number(t.u_md) +
           "," + format_number(t.u_server) + "," +
           format_number(decided ? t.total_delay_s(dt) : kNaN) + "," +
           format_number(t.completion_time_s) + "\n";
  }
  return out;
}

std::string trajectories_csv(const std::vector<RunSummary>& runs) {
  std::string out = "run_id,strategy,seed,sweep_value,uav,epoch,x,y\n";
  for (const auto& s : runs)
    for (size_t u = 0; u < s.uav_track.size(); ++u)
      for (size_t e = 0; e < s.uav_track[u].size(); ++e)
        out += s.item.run_id + "," + to_string(s.item.strategy) + "," +
               std::to_string(s.item.seed) + "," + format_number(s.item.value) + "," +
               std::to_string(u + 1) + "," + std::to_string(e + 1) + "," +
               format_number(s.uav_track[u][e].x()) + "," + format_number(s.uav_track[u][e].y()) +
               "\n";
  return out;
}

namespace {

const char* kMetricNames[] = {"system_utility", "processing_rate", "completion_delay",
                              "completion_ratio"};

double metric(const MetricsReport& m, int k) {
  switch (k) {
    case 0: return m.system_utility;
    case 1: return m.processing_rate;
    case 2: return m.completion_delay;
    default: return m.completion_ratio;
  }
}

struct Stats {
  std::vector<double> xs;
  void add(double x) {
    if (std::isfinite(x)) xs.push_back(x);
  }
  std::string row() const {
    const double n = static_cast<double>(xs.size());
    double mean = kNaN, sd = kNaN;
    if (!xs.empty()) {
      mean = 0;
      for (double x : xs) mean += x;
      mean /= n;
      sd = 0;
      if (xs.size() > 1) {
        for (double x : xs) sd += (x - mean) * (x - mean);
        sd = std::sqrt(sd / (n - 1));
      }
    }
    return format_number(mean) + "," + format_number(sd) + "," + std::to_string(xs.size());
  }
};

// Keys keep strategies in their declared order.
using Key = std::tuple<double, int, long, int>;  // value, strategy, epoch, metric

}  // namespace

std::string sweep_plot_csv(const std::vector<RunSummary>& runs) {
  std::map<Key, Stats> agg;
  for (const auto& s : runs)
    for (int k = 0; k < 4; ++k)
      agg[{s.item.value, static_cast<int>(s.item.strategy), 0, k}].add(metric(s.report, k));
  std::string out = "sweep_axis,sweep_value,strategy,metric,mean,stddev,runs\n";
  const char* axis = runs.empty() ? "none" : to_string(runs.front().item.axis);
  for (const auto& [key, st] : agg)
    out += std::string(axis) + "," + format_number(std::get<0>(key)) + "," +
           to_string(static_cast<StrategyKind>(std::get<1>(key))) + "," +
           kMetricNames[std::get<3>(key)] + "," + st.row() + "\n";
  return out;
}

std::string time_plot_csv(const std::vector<RunSummary>& runs) {
  std::map<Key, Stats> agg;
  for (const auto& s : runs)
    for (size_t e = 0; e < s.per_epoch.size(); ++e)
      for (int k = 0; k < 4; ++k)
        agg[{s.item.value, static_cast<int>(s.item.strategy), static_cast<long>(e), k}].add(
            metric(s.per_epoch[e], k));
  std::string out = "sweep_value,strategy,epoch,metric,mean,stddev,runs\n";
  for (const auto& [key, st] : agg)
    out += format_number(std::get<0>(key)) + "," +
           to_string(static_cast<StrategyKind>(std::get<1>(key))) + "," +
           std::to_string(std::get<2>(key) + 1) + "," + kMetricNames[std::get<3>(key)] + "," +
           st.row() + "\n";
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path);
}

std::vector<RunSummary> execute_plan(const ExperimentPlan& plan, const RunnerOptions& opts) {
  namespace fs = std::filesystem;
  const fs::path root(plan.out_dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec || !fs::is_directory(root))
    throw std::runtime_error("cannot create output directory " + plan.out_dir);

  const size_t n = plan.items.size();
  std::vector<RunSummary> results(n);
  std::atomic<size_t> next{0};
  std::mutex io;
  std::exception_ptr failure;

  auto worker = [&]() {
    for (size_t i = next++; i < n; i = next++) {
      try {
        const PlanItem& item = plan.items[i];
        RunResult r = run(item.config);
        results[i] = summarize(item, r);
        std::lock_guard<std::mutex> lock(io);
        if (opts.write_run_files) {
          fs::path dir = root / "runs" / item.run_id;
          fs::create_directories(dir);
          write_file((dir / "metrics.csv").string(), metrics_csv(r));
          write_file((dir / "events.csv").string(), events_csv(r));
        }
        if (opts.verbose)
          std::fprintf(stderr, "[%zu/%zu] %s utility=%.6g ratio=%.4f\n", i + 1, n,
                       item.run_id.c_str(), r.report.system_utility, r.report.completion_ratio);
      } catch (...) {
        std::lock_guard<std::mutex> lock(io);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  write_file((root / "summary.csv").string(), summary_csv(results));
  write_file((root / "trajectories.csv").string(), trajectories_csv(results));
  write_file((root / "plot_time.csv").string(), time_plot_csv(results));
  if (plan.sweep.axis != SweepAxis::kNone)
    write_file((root / (std::string("plot_") + to_string(plan.sweep.axis) + ".csv")).string(),
               sweep_plot_csv(results));
  return results;
}

}  // namespace uavmec

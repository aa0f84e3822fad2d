#include "uavmec/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace uavmec {
namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Shortest text that parses back to the same double.
std::string fmt_num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  double d = to_double(key, v);
  if (d != static_cast<double>(static_cast<long long>(d)))
    throw ConfigError("'" + key + "': expected an integer, got '" + v + "'");
  return static_cast<long long>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  std::string s = lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("'" + key + "': expected a boolean, got '" + v + "'");
}

Range to_range(const std::string& key, const std::string& v) {
  auto colon = v.find(':');
  if (colon == std::string::npos) {
    double d = to_double(key, v);
    return {d, d};
  }
  return {to_double(key, trim(v.substr(0, colon))), to_double(key, trim(v.substr(colon + 1)))};
}

std::vector<Vec2> to_points(const std::string& key, const std::string& v) {
  std::vector<Vec2> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    auto comma = item.find(',');
    if (comma == std::string::npos)
      throw ConfigError("'" + key + "': expected 'x,y' pairs separated by ';'");
    out.emplace_back(to_double(key, trim(item.substr(0, comma))),
                     to_double(key, trim(item.substr(comma + 1))));
  }
  return out;
}

std::string range_str(const Range& r) { return fmt_num(r.lo) + ":" + fmt_num(r.hi); }

std::string points_str(const std::vector<Vec2>& pts) {
  std::string s;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i) s += "; ";
    s += fmt_num(pts[i].x()) + "," + fmt_num(pts[i].y());
  }
  return s;
}

struct Binding {
  std::function<void(ScenarioConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

#define NUM(name, field)                                                                       \
  {name,                                                                                       \
   {[](ScenarioConfig& c, const std::string& k, const std::string& v) {                        \
      c.field = to_double(k, v);                                                               \
    },                                                                                         \
    [](const ScenarioConfig& c) { return fmt_num(c.field); }}}
#define INT(name, field)                                                                       \
  {name,                                                                                       \
   {[](ScenarioConfig& c, const std::string& k, const std::string& v) {                        \
      c.field = static_cast<decltype(c.field)>(to_int(k, v));                                  \
    },                                                                                         \
    [](const ScenarioConfig& c) { return std::to_string(c.field); }}}
#define BOOL(name, field)                                                                      \
  {name,                                                                                       \
   {[](ScenarioConfig& c, const std::string& k, const std::string& v) {                        \
      c.field = to_bool(k, v);                                                                 \
    },                                                                                         \
    [](const ScenarioConfig& c) { return std::string(c.field ? "true" : "false"); }}}
#define RANGE(name, field)                                                                     \
  {name,                                                                                       \
   {[](ScenarioConfig& c, const std::string& k, const std::string& v) {                        \
      c.field = to_range(k, v);                                                                \
    },                                                                                         \
    [](const ScenarioConfig& c) { return range_str(c.field); }}}
#define POINTS(name, field)                                                                    \
  {name,                                                                                       \
   {[](ScenarioConfig& c, const std::string& k, const std::string& v) {                        \
      c.field = to_points(k, v);                                                               \
    },                                                                                         \
    [](const ScenarioConfig& c) { return points_str(c.field); }}}

const std::vector<std::pair<std::string, Binding>>& bindings() {
  static const std::vector<std::pair<std::string, Binding>> table = {
      NUM("slot_duration_s", grid.slot_duration_s),
      INT("slots_per_epoch", grid.slots_per_epoch),
      INT("total_slots", grid.total_slots),
      NUM("area_x_m", area.x_max),
      NUM("area_y_m", area.y_max),
      INT("md_count", md_count),
      BOOL("mbs_enabled", mbs_enabled),
      {"mbs_position",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          auto pts = to_points(k, v);
          if (pts.size() != 1) throw ConfigError("'mbs_position': expected one 'x,y' pair");
          c.mbs_position = pts[0];
        },
        [](const ScenarioConfig& c) { return points_str({c.mbs_position}); }}},
      NUM("mbs_height_m", mbs_height),
      POINTS("uav_initial", uav_initial),
      POINTS("uav_final", uav_final),
      RANGE("md_cpu_hz", md_cpu_hz),
      RANGE("md_tx_power_dbm", md_tx_power_dbm),
      RANGE("md_weight", md_weight),
      NUM("md_payment_budget", md_payment_budget),
      NUM("md_energy_wh_per_ghz", md_energy_wh_per_ghz),
      NUM("md_capacitance", md_capacitance),
      RANGE("task_size_bits", task_size_bits),
      RANGE("task_intensity_cycles_per_bit", task_intensity),
      RANGE("task_deadline_s", task_deadline_s),
      NUM("arrival_probability", arrival_probability),
      RANGE("mbs_cpu_hz", mbs_cpu_hz),
      RANGE("uav_cpu_hz", uav_cpu_hz),
      RANGE("server_cores", server_cores),
      RANGE("server_weight", server_weight),
      NUM("server_capacitance", server_capacitance),
      NUM("mbs_energy_wh_per_ghz", mbs_energy_wh_per_ghz),
      NUM("uav_energy_j", uav_energy_j),
      BOOL("split_core_frequency", split_core_frequency),
      NUM("max_unit_price", max_unit_price),
      NUM("bandwidth_terrestrial_hz", channel.bandwidth_terrestrial_hz),
      NUM("bandwidth_aerial_hz", channel.bandwidth_aerial_hz),
      {"noise_dbm",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          c.channel.noise_w = dbm_to_w(to_double(k, v));
        },
        [](const ScenarioConfig& c) {
          return fmt_num(10.0 * std::log10(c.channel.noise_w * 1e3));
        }}},
      NUM("carrier_hz", channel.carrier_hz),
      NUM("ref_distance_terrestrial_m", channel.ref_distance_terrestrial_m),
      NUM("ref_distance_aerial_m", channel.ref_distance_aerial_m),
      NUM("ple_terrestrial_los", channel.ple_terrestrial_los),
      NUM("ple_terrestrial_nlos", channel.ple_terrestrial_nlos),
      NUM("ple_aerial", channel.ple_aerial),
      NUM("nlos_attenuation", channel.nlos_attenuation),
      NUM("los_d1_m", channel.los_d1_m),
      NUM("los_d2_m", channel.los_d2_m),
      NUM("los_sigmoid_a", channel.sigmoid_a),
      NUM("los_sigmoid_b", channel.sigmoid_b),
      NUM("nakagami_terrestrial_los", channel.m_terrestrial_los),
      NUM("nakagami_terrestrial_nlos", channel.m_terrestrial_nlos),
      NUM("nakagami_aerial_los", channel.m_aerial_los),
      NUM("nakagami_aerial_nlos", channel.m_aerial_nlos),
      NUM("shadowing_los_db", channel.shadow_los_db),
      NUM("shadowing_nlos_db", channel.shadow_nlos_db),
      NUM("fading_mean_power", channel.mean_power),
      NUM("gm_alpha", gm_alpha),
      RANGE("gm_mean_speed", gm_mean_speed),
      NUM("gm_sigma", gm_sigma),
      NUM("uav_altitude_m", uav.altitude),
      NUM("uav_v_max", uav.v_max),
      NUM("uav_d_safe_m", uav.d_safe),
      NUM("reach_speed_factor", reach_speed_factor),
      NUM("eta1", propulsion.eta1),
      NUM("eta2", propulsion.eta2),
      NUM("eta3", propulsion.eta3),
      NUM("eta4", propulsion.eta4),
      NUM("rotor_tip_speed", propulsion.v_tip),
      INT("bargain_horizon", bargain_horizon),
      INT("bargain_max_rounds", bargain_max_rounds),
      NUM("bargain_tol", bargain_tol),
      NUM("sca_tol", sca_tol),
      INT("sca_max_iter", sca_max_iter),
      BOOL("fixed_los_for_trajectory", fixed_los_for_trajectory),
      NUM("fixed_los_value", fixed_los_value),
      {"qoe_energy_normalizer",
       {[](ScenarioConfig& c, const std::string&, const std::string& v) {
          std::string s = lower(v);
          if (s == "server") c.qoe_energy_normalizer = QoeEnergyNormalizer::kServer;
          else if (s == "md") c.qoe_energy_normalizer = QoeEnergyNormalizer::kMd;
          else throw ConfigError("'qoe_energy_normalizer': expected 'server' or 'md'");
        },
        [](const ScenarioConfig& c) {
          return std::string(c.qoe_energy_normalizer == QoeEnergyNormalizer::kServer ? "server"
                                                                                      : "md");
        }}},
      {"flight_energy_charging",
       {[](ScenarioConfig& c, const std::string&, const std::string& v) {
          std::string s = lower(v);
          if (s == "shared") c.flight_charging = FlightCharging::kShared;
          else if (s == "per_task") c.flight_charging = FlightCharging::kPerTask;
          else throw ConfigError("'flight_energy_charging': expected 'shared' or 'per_task'");
        },
        [](const ScenarioConfig& c) {
          return std::string(c.flight_charging == FlightCharging::kShared ? "shared"
                                                                          : "per_task");
        }}},
      {"strategy",
       {[](ScenarioConfig& c, const std::string&, const std::string& v) {
          c.strategy = parse_strategy(v);
        },
        [](const ScenarioConfig& c) { return std::string(to_string(c.strategy)); }}},
      NUM("pas_factor", pas_factor),
      NUM("pas_threshold", pas_threshold),
      NUM("pas_initial_price_fraction", pas_initial_price_fraction),
      INT("gcos_max_rounds", gcos_max_rounds),
      {"seed",
       {[](ScenarioConfig& c, const std::string& k, const std::string& v) {
          try {
            size_t pos = 0;
            c.seed = std::stoull(v, &pos);
            if (pos == v.size()) return;
          } catch (const std::exception&) {
          }
          throw ConfigError("'" + k + "': expected an unsigned integer");
        },
        [](const ScenarioConfig& c) { return std::to_string(c.seed); }}},
  };
  return table;
}

#undef NUM
#undef INT
#undef BOOL
#undef RANGE
#undef POINTS

void check_range(const char* name, const Range& r, double min_allowed = -kInf) {
  if (!(r.lo <= r.hi)) throw ConfigError(std::string(name) + ": min > max");
  if (r.lo < min_allowed) throw ConfigError(std::string(name) + ": value out of range");
}

void check_positive(const char* name, double v) {
  if (!(v > 0)) throw ConfigError(std::string(name) + " must be > 0");
}

}  // namespace

const char* to_string(StrategyKind s) {
  switch (s) {
    case StrategyKind::kTjcct: return "TJCCT";
    case StrategyKind::kLs: return "LS";
    case StrategyKind::kEcras: return "ECRAS";
    case StrategyKind::kPas: return "PAS";
    case StrategyKind::kGcos: return "GCOS";
    case StrategyKind::kStcs: return "STCS";
  }
  return "?";
}

StrategyKind parse_strategy(const std::string& name) {
  std::string s = lower(trim(name));
  for (StrategyKind k : all_strategies())
    if (lower(to_string(k)) == s) return k;
  throw ConfigError("unknown strategy '" + name + "'");
}

const std::vector<StrategyKind>& all_strategies() {
  static const std::vector<StrategyKind> v = {StrategyKind::kTjcct, StrategyKind::kLs,
                                              StrategyKind::kEcras, StrategyKind::kPas,
                                              StrategyKind::kGcos,  StrategyKind::kStcs};
  return v;
}

void ScenarioConfig::validate() const {
  try {
    grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  check_positive("area_x_m", area.x_max);
  check_positive("area_y_m", area.y_max);
  if (md_count < 0) throw ConfigError("md_count must be >= 0");
  if (uav_initial.size() != uav_final.size())
    throw ConfigError("uav_initial and uav_final must list the same number of UAVs");
  for (const auto& q : uav_initial)
    if (!area.contains(q)) throw ConfigError("uav_initial point outside the area");
  for (const auto& q : uav_final)
    if (!area.contains(q)) throw ConfigError("uav_final point outside the area");
  check_range("md_cpu_hz", md_cpu_hz, 1);
  check_range("md_tx_power_dbm", md_tx_power_dbm);
  check_range("md_weight", md_weight, 0);
  if (md_weight.hi > 1) throw ConfigError("md_weight must lie in [0, 1]");
  check_positive("md_payment_budget", md_payment_budget);
  check_positive("md_energy_wh_per_ghz", md_energy_wh_per_ghz);
  check_positive("md_capacitance", md_capacitance);
  check_range("task_size_bits", task_size_bits, 1);
  check_range("task_intensity_cycles_per_bit", task_intensity, 1e-12);
  check_range("task_deadline_s", task_deadline_s, 1e-12);
  if (arrival_probability < 0 || arrival_probability > 1)
    throw ConfigError("arrival_probability must lie in [0, 1]");
  check_range("mbs_cpu_hz", mbs_cpu_hz, 1);
  check_range("uav_cpu_hz", uav_cpu_hz, 1);
  check_range("server_cores", server_cores, 1);
  check_range("server_weight", server_weight, 0);
  if (server_weight.hi > 1) throw ConfigError("server_weight must lie in [0, 1]");
  check_positive("server_capacitance", server_capacitance);
  check_positive("mbs_energy_wh_per_ghz", mbs_energy_wh_per_ghz);
  check_positive("uav_energy_j", uav_energy_j);
  check_positive("max_unit_price", max_unit_price);
  try {
    channel.validate();
    propulsion.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (gm_alpha < 0 || gm_alpha > 1) throw ConfigError("gm_alpha must lie in [0, 1]");
  check_range("gm_mean_speed", gm_mean_speed, 0);
  if (gm_sigma < 0) throw ConfigError("gm_sigma must be >= 0");
  check_positive("uav_altitude_m", uav.altitude);
  check_positive("uav_v_max", uav.v_max);
  check_positive("uav_d_safe_m", uav.d_safe);
  if (!(reach_speed_factor > 0 && reach_speed_factor <= 1))
    throw ConfigError("reach_speed_factor must lie in (0, 1]");
  if (bargain_horizon < 1) throw ConfigError("bargain_horizon must be >= 1");
  if (bargain_max_rounds < 1) throw ConfigError("bargain_max_rounds must be >= 1");
  check_positive("bargain_tol", bargain_tol);
  if (!(sca_tol > 0)) throw ConfigError("sca_tol must be > 0");
  if (sca_max_iter < 1) throw ConfigError("sca_max_iter must be >= 1");
  if (fixed_los_value < 0 || fixed_los_value > 1)
    throw ConfigError("fixed_los_value must lie in [0, 1]");
  check_positive("pas_factor", pas_factor);
  if (pas_initial_price_fraction <= 0 || pas_initial_price_fraction > 1)
    throw ConfigError("pas_initial_price_fraction must lie in (0, 1]");
  if (gcos_max_rounds < 1) throw ConfigError("gcos_max_rounds must be >= 1");
}

void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  std::string k = lower(trim(key));
  for (const auto& [name, b] : bindings()) {
    if (name == k) {
      b.set(cfg, k, trim(value));
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

ScenarioConfig parse_config(const std::string& text, ScenarioConfig cfg) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    try {
      apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::string dump_config(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& [name, b] : bindings()) out += name + " = " + b.get(cfg) + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [name, b] : bindings()) keys.push_back(name);
  return keys;
}

}  // namespace uavmec

#include "uavmec/channel.hpp"

#include <algorithm>
#include <stdexcept>

namespace uavmec {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void ChannelParams::validate() const {
  const double positive[] = {bandwidth_terrestrial_hz, bandwidth_aerial_hz, noise_w, carrier_hz,
                             ref_distance_terrestrial_m, ref_distance_aerial_m,
                             ple_terrestrial_los, ple_terrestrial_nlos, ple_aerial,
                             nlos_attenuation, los_d1_m, los_d2_m, sigmoid_a, sigmoid_b,
                             mean_power};
  for (double v : positive)
    if (!(v > 0)) throw std::invalid_argument("channel parameters must be positive");
  for (double m : {m_terrestrial_los, m_terrestrial_nlos, m_aerial_los, m_aerial_nlos})
    if (!(m >= 0.5)) throw std::invalid_argument("Nakagami shape must be >= 0.5");
  if (shadow_los_db < 0 || shadow_nlos_db < 0)
    throw std::invalid_argument("shadowing std must be >= 0");
}

double dbm_to_w(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

double los_probability_terrestrial(double d3_m, const ChannelParams& p) {
  if (d3_m <= 0) return 1.0;
  double e = std::exp(-d3_m / p.los_d2_m);
  return std::clamp(std::min(p.los_d1_m / d3_m, 1.0) * (1.0 - e) + e, 0.0, 1.0);
}

double los_probability_aerial(double horizontal_m, double height_m, const ChannelParams& p) {
  double d3 = std::hypot(horizontal_m, height_m);
  if (d3 <= 0) return 1.0;
  double theta_deg = std::asin(std::clamp(height_m / d3, -1.0, 1.0)) * 180.0 / kPi;
  return 1.0 / (1.0 + p.sigmoid_a * std::exp(-p.sigmoid_b * (theta_deg - p.sigmoid_a)));
}

double los_probability(LinkKind kind, double horizontal_m, double height_m,
                       const ChannelParams& p) {
  if (kind == LinkKind::kAerial) return los_probability_aerial(horizontal_m, height_m, p);
  return los_probability_terrestrial(std::hypot(horizontal_m, height_m), p);
}

double nakagami_shape(LinkKind kind, bool los, const ChannelParams& p) {
  if (kind == LinkKind::kAerial) return los ? p.m_aerial_los : p.m_aerial_nlos;
  return los ? p.m_terrestrial_los : p.m_terrestrial_nlos;
}

double sample_fading_power(LinkKind kind, bool los, const ChannelParams& p, Rng& rng) {
  double m = nakagami_shape(kind, los, p);
  return std::gamma_distribution<double>(m, p.mean_power / m)(rng);
}

double reference_loss(double d0_m, const ChannelParams& p) {
  double a = 4.0 * kPi * d0_m * p.carrier_hz / kSpeedOfLight;
  return a * a;
}

double large_scale_loss(LinkKind kind, double d3_m, bool los, double shadow_db,
                        const ChannelParams& p) {
  if (kind == LinkKind::kAerial) {
    double d0 = p.ref_distance_aerial_m;
    double d = std::max(d3_m, d0);
    double loss = reference_loss(d0, p) * std::pow(d / d0, p.ple_aerial);
    return los ? loss : loss / p.nlos_attenuation;
  }
  double d0 = p.ref_distance_terrestrial_m;
  double d = std::max(d3_m, d0);
  double beta = los ? p.ple_terrestrial_los : p.ple_terrestrial_nlos;
  return reference_loss(d0, p) * std::pow(d / d0, beta) * std::pow(10.0, shadow_db / 10.0);
}

double large_scale_loss(LinkKind kind, double d3_m, bool los, const ChannelParams& p, Rng& rng) {
  double shadow = 0;
  if (kind == LinkKind::kTerrestrial) {
    double sigma = los ? p.shadow_los_db : p.shadow_nlos_db;
    shadow = std::normal_distribution<double>(0.0, sigma)(rng);
  }
  return large_scale_loss(kind, d3_m, los, shadow, p);
}

FadingDraw draw_fading(LinkKind kind, const ChannelParams& p, Rng& rng) {
  FadingDraw f;
  f.power_los = sample_fading_power(kind, true, p, rng);
  f.power_nlos = sample_fading_power(kind, false, p, rng);
  if (kind == LinkKind::kTerrestrial) {
    std::normal_distribution<double> n01(0.0, 1.0);
    f.shadow_los_db = p.shadow_los_db * n01(rng);
    f.shadow_nlos_db = p.shadow_nlos_db * n01(rng);
  }
  return f;
}

ChannelBranches channel_branches(LinkKind kind, double horizontal_m, double height_m,
                                 const FadingDraw& f, const ChannelParams& p) {
  double d3 = std::hypot(horizontal_m, height_m);
  ChannelBranches b;
  b.p_los = los_probability(kind, horizontal_m, height_m, p);
  b.gain_los = f.power_los / large_scale_loss(kind, d3, true, f.shadow_los_db, p);
  b.gain_nlos = f.power_nlos / large_scale_loss(kind, d3, false, f.shadow_nlos_db, p);
  return b;
}

double uplink_rate(double bandwidth_hz, double tx_power_w, double gain, double noise_w) {
  if (!(gain > 0)) return 0.0;
  return bandwidth_hz * std::log2(1.0 + tx_power_w * gain / noise_w);
}

const FadingDraw& FadingCache::get(int md, int server, int slot, LinkKind kind) {
  std::uint64_t key = (static_cast<std::uint64_t>(slot) << 32) |
                      (static_cast<std::uint64_t>(server & 0xffff) << 16) |
                      static_cast<std::uint64_t>(md & 0xffff);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  Rng rng = make_rng(seed_, Stream::kFading,
                     {static_cast<std::uint64_t>(md), static_cast<std::uint64_t>(server),
                      static_cast<std::uint64_t>(slot)});
  return cache_.emplace(key, draw_fading(kind, params_, rng)).first->second;
}

void FadingCache::drop_before(int slot) {
  std::erase_if(cache_, [slot](const auto& kv) {
    return static_cast<int>(kv.first >> 32) < slot;
  });
}

double mean_aerial_gain_coefficient(double p_los, const ChannelParams& p) {
  double d0 = p.ref_distance_aerial_m;
  return (p_los + (1 - p_los) * p.nlos_attenuation) * p.mean_power *
         std::pow(d0, p.ple_aerial) / reference_loss(d0, p);
}

}  // namespace uavmec

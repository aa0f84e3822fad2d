#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "uavmec/rng.hpp"

namespace uavmec {

inline constexpr double kSpeedOfLight = 299792458.0;

enum class LinkKind { kTerrestrial, kAerial };

struct ChannelParams {
  double bandwidth_terrestrial_hz = 20e6;
  double bandwidth_aerial_hz = 10e6;
  double noise_w = 1.5848931924611108e-13;  // -98 dBm
  double carrier_hz = 2e9;
  double ref_distance_terrestrial_m = 1;
  double ref_distance_aerial_m = 1;
  double ple_terrestrial_los = 2.42;
  double ple_terrestrial_nlos = 4.28;
  double ple_aerial = 2;
  double nlos_attenuation = 0.2;  // kappa
  double los_d1_m = 18;
  double los_d2_m = 36;
  double sigmoid_a = 10;    // p1
  double sigmoid_b = 0.6;   // p2
  double m_terrestrial_los = 4;
  double m_terrestrial_nlos = 2;
  double m_aerial_los = 3;
  double m_aerial_nlos = 1;
  double shadow_los_db = 4;
  double shadow_nlos_db = 6;
  double mean_power = 1;    // pbar

  double bandwidth(LinkKind k) const {
    return k == LinkKind::kAerial ? bandwidth_aerial_hz : bandwidth_terrestrial_hz;
  }
  void validate() const;
};

double dbm_to_w(double dbm);

// Distances are 3-D; horizontal and vertical parts are passed separately so the
// aerial elevation angle is asin(height / d3).
double los_probability(LinkKind kind, double horizontal_m, double height_m, const ChannelParams& p);
double los_probability_terrestrial(double d3_m, const ChannelParams& p);
double los_probability_aerial(double horizontal_m, double height_m, const ChannelParams& p);

double nakagami_shape(LinkKind kind, bool los, const ChannelParams& p);

// |h|^2 ~ Gamma(m, pbar / m)
double sample_fading_power(LinkKind kind, bool los, const ChannelParams& p, Rng& rng);
inline double sample_small_scale(LinkKind kind, bool los, const ChannelParams& p, Rng& rng) {
  return std::sqrt(sample_fading_power(kind, los, p, rng));
}

// (4 pi d0 fc / c)^2
double reference_loss(double d0_m, const ChannelParams& p);

// Linear loss factor (>= 1 means attenuation). Terrestrial carries log-normal
// shadowing given in dB; the aerial NLoS branch is divided by kappa.
double large_scale_loss(LinkKind kind, double d3_m, bool los, double shadow_db,
                        const ChannelParams& p);
double large_scale_loss(LinkKind kind, double d3_m, bool los, const ChannelParams& p, Rng& rng);

struct FadingDraw {
  double power_los = 1;
  double power_nlos = 1;
  double shadow_los_db = 0;
  double shadow_nlos_db = 0;
};

FadingDraw draw_fading(LinkKind kind, const ChannelParams& p, Rng& rng);

struct ChannelBranches {
  double p_los = 1;
  double gain_los = 0;
  double gain_nlos = 0;
  double gain() const { return p_los * gain_los + (1 - p_los) * gain_nlos; }
};

ChannelBranches channel_branches(LinkKind kind, double horizontal_m, double height_m,
                                 const FadingDraw& f, const ChannelParams& p);

inline double channel_gain(LinkKind kind, double horizontal_m, double height_m,
                           const FadingDraw& f, const ChannelParams& p) {
  return channel_branches(kind, horizontal_m, height_m, f, p).gain();
}

// B log2(1 + P g / N0)
double uplink_rate(double bandwidth_hz, double tx_power_w, double gain, double noise_w);

// Fading keyed by (md, server, slot): the same triple always yields the same
// draw, whatever order callers ask in.
class FadingCache {
 public:
  FadingCache(std::uint64_t seed, const ChannelParams& p) : seed_(seed), params_(p) {}
  const FadingDraw& get(int md, int server, int slot, LinkKind kind);
  void drop_before(int slot);

 private:
  std::uint64_t seed_;
  ChannelParams params_;
  std::unordered_map<std::uint64_t, FadingDraw> cache_;
};

// Channel gain averaged over small-scale fading with LoS probability fixed:
// (P + (1 - P) kappa) pbar d0^beta / L0, so gain at distance d is this / d^beta.
double mean_aerial_gain_coefficient(double p_los, const ChannelParams& p);

}  // namespace uavmec

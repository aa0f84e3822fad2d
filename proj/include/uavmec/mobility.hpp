#pragma once

#include <string>
#include <vector>

#include "uavmec/rng.hpp"
#include "uavmec/types.hpp"

namespace uavmec {

struct GaussMarkovParams {
  double alpha = 0.9;
  Vec2 mean_velocity = Vec2::Zero();
  double sigma = 2.0;
};

struct AreaBounds {
  double x_max = 1000;
  double y_max = 1000;
  bool contains(const Vec2& q, double tol = 0) const {
    return q.x() >= -tol && q.y() >= -tol && q.x() <= x_max + tol && q.y() <= y_max + tol;
  }
};

struct UavLimits {
  double v_max = 30;
  double d_safe = 10;
  double altitude = 100;
  AreaBounds area;
};

// v' = a v + (1 - a) vbar + sigma sqrt(1 - a^2) w,  w ~ N(0, I2)
Vec2 md_velocity_step(const Vec2& v_prev, const GaussMarkovParams& p, Rng& rng);

// Advances q by one epoch. Components leaving the box are clamped and the
// matching velocity component is negated (v is updated in place).
Vec2 md_position_step(const Vec2& q, Vec2& v, const TimeGrid& grid, const AreaBounds& area);

Vec2 uav_position_step(const Vec2& q, const Vec2& v, const TimeGrid& grid);

struct ConstraintViolation {
  std::string kind;  // bounds, start, end, speed, reach, separation
  int uav = -1;
  int other = -1;
  int epoch = -1;    // 0-based
  double amount = 0;
};

struct UavTrack {
  Vec2 start = Vec2::Zero();
  Vec2 target = Vec2::Zero();
  std::vector<Vec2> positions;  // one per epoch, positions[0] is the start
};

struct TrackCheckOptions {
  double tol = 1e-6;
  // Allowed distance to the target at the last epoch; negative means one
  // epoch of travel at v_max.
  double end_radius = -1;
};

// Reachability is checked as |q_F - q_e| <= v_max T (E - 1 - e) + end_radius.
std::vector<ConstraintViolation> check_uav_constraints(const std::vector<UavTrack>& tracks,
                                                       const UavLimits& limits,
                                                       const TimeGrid& grid,
                                                       const TrackCheckOptions& opts = {});

}  // namespace uavmec

#include "uavmec/mobility.hpp"

#include <algorithm>
#include <cmath>

namespace uavmec {

Vec2 md_velocity_step(const Vec2& v_prev, const GaussMarkovParams& p, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  double wx = n01(rng);
  double wy = n01(rng);
  double s = p.sigma * std::sqrt(std::max(0.0, 1.0 - p.alpha * p.alpha));
  return p.alpha * v_prev + (1.0 - p.alpha) * p.mean_velocity + s * Vec2(wx, wy);
}

Vec2 md_position_step(const Vec2& q, Vec2& v, const TimeGrid& grid, const AreaBounds& area) {
  Vec2 next = q + v * grid.epoch_duration_s();
  const double hi[2] = {area.x_max, area.y_max};
  for (int k = 0; k < 2; ++k) {
    if (next[k] < 0) {
      next[k] = 0;
      v[k] = -v[k];
    } else if (next[k] > hi[k]) {
      next[k] = hi[k];
      v[k] = -v[k];
    }
  }
  return next;
}

Vec2 uav_position_step(const Vec2& q, const Vec2& v, const TimeGrid& grid) {
  return q + v * grid.epoch_duration_s();
}

std::vector<ConstraintViolation> check_uav_constraints(const std::vector<UavTrack>& tracks,
                                                       const UavLimits& limits,
                                                       const TimeGrid& grid,
                                                       const TrackCheckOptions& opts) {
  std::vector<ConstraintViolation> out;
  const double step = limits.v_max * grid.epoch_duration_s();
  const double end_radius = opts.end_radius < 0 ? step : opts.end_radius;
  const double tol = opts.tol;

  for (size_t u = 0; u < tracks.size(); ++u) {
    const auto& tr = tracks[u];
    const int n = static_cast<int>(tr.positions.size());
    if (n == 0) continue;
    const int last = n - 1;
    for (int e = 0; e < n; ++e) {
      const Vec2& q = tr.positions[e];
      if (!limits.area.contains(q, tol)) {
        double over = std::max({-q.x(), -q.y(), q.x() - limits.area.x_max,
                                q.y() - limits.area.y_max});
        out.push_back({"bounds", static_cast<int>(u), -1, e, over});
      }
      if (e > 0) {
        double d = (q - tr.positions[e - 1]).norm();
        if (d > step + tol) out.push_back({"speed", static_cast<int>(u), -1, e, d - step});
      }
      // Reach is measured against the full horizon, so partial tracks are
      // checked as prefixes of a complete run.
      int epochs_left = grid.epochs() - 1 - e;
      if (epochs_left >= 0) {
        double allowed = step * epochs_left + end_radius;
        double d = (tr.target - q).norm();
        if (d > allowed + tol) out.push_back({"reach", static_cast<int>(u), -1, e, d - allowed});
      }
    }
    double d0 = (tr.positions[0] - tr.start).norm();
    if (d0 > tol) out.push_back({"start", static_cast<int>(u), -1, 0, d0});
    if (n == grid.epochs()) {
      double dend = (tr.positions[last] - tr.target).norm();
      if (dend > end_radius + tol)
        out.push_back({"end", static_cast<int>(u), -1, last, dend - end_radius});
    }
  }
  for (size_t a = 0; a < tracks.size(); ++a) {
    for (size_t b = a + 1; b < tracks.size(); ++b) {
      size_t n = std::min(tracks[a].positions.size(), tracks[b].positions.size());
      for (size_t e = 0; e < n; ++e) {
        double d = (tracks[a].positions[e] - tracks[b].positions[e]).norm();
        if (d < limits.d_safe - tol)
          out.push_back({"separation", static_cast<int>(a), static_cast<int>(b),
                         static_cast<int>(e), limits.d_safe - d});
      }
    }
  }
  return out;
}

}  // namespace uavmec

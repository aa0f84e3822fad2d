#include "uavmec/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "uavmec/barrier_solver.hpp"

namespace uavmec {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
// Rate positivity keeps the Taylor bound above this fraction of its expansion value.
constexpr double kRateFloor = 1e-3;

double uav_speed(const Vec2& q, const Vec2& q0, double epoch_s) { return (q - q0).norm() / epoch_s; }

}  // namespace

double extended_log(double z, double* d1, double* d2) {
  if (z >= kLogFloor) {
    if (d1) *d1 = 1.0 / z;
    if (d2) *d2 = -1.0 / (z * z);
    return std::log(z);
  }
  const double t = z - kLogFloor;
  const double z0 = kLogFloor;
  if (d1) *d1 = 1.0 / z0 - t / (z0 * z0);
  if (d2) *d2 = -1.0 / (z0 * z0);
  return std::log(z0) + t / z0 - t * t / (2 * z0 * z0);
}

double mean_rate(const LinkTerm& link, double dist2, double altitude, double beta) {
  const double y = dist2 + altitude * altitude;
  return link.bandwidth * std::log2(1.0 + link.snr0 / std::pow(y, 0.5 * beta));
}

double link_value(const LinkTerm& link, double rate, double* d1, double* d2) {
  if (!(rate > 0)) {
    if (d1) *d1 = kInf;
    if (d2) *d2 = -kInf;
    return -kInf;
  }
  const double l = link.size_bits;
  const double u = l / rate;
  const double du = -l / (rate * rate);
  const double ddu = 2 * l / (rate * rate * rate);
  double e1, e2;
  const double e = extended_log(1.0 + link.deadline_s - u - link.theta1, &e1, &e2);
  if (d1) *d1 = -du * (link.theta0 * e1 + link.theta2);
  if (d2) *d2 = link.theta0 * (e2 * du * du - e1 * ddu) - link.theta2 * ddu;
  return link.theta0 * e - link.theta2 * u;
}

double epoch_objective(const EpochProblem& prob, const std::vector<Vec2>& q) {
  double total = 0;
  for (const auto& link : prob.links) {
    double r = mean_rate(link, (q[link.uav] - link.md_pos).squaredNorm(), prob.altitude,
                         prob.path_loss_exp);
    total += link_value(link, r);
  }
  for (size_t u = 0; u < prob.uavs.size(); ++u) {
    const auto& t = prob.uavs[u];
    total -= t.flight_weight * propulsion_power(uav_speed(q[u], t.current, prob.epoch_s), prob.prop);
  }
  return total;
}

RateBound taylor_rate_bound(const LinkTerm& link, const Vec2& q_expansion, double altitude,
                            double beta) {
  RateBound b;
  b.x_hat = (q_expansion - link.md_pos).squaredNorm();
  const double y = b.x_hat + altitude * altitude;
  const double yb = std::pow(y, 0.5 * beta);
  b.value_at_expansion = link.bandwidth * std::log2(1.0 + link.snr0 / yb);
  b.slope = -(link.bandwidth * beta / (2 * kLn2)) * link.snr0 / (y * (yb + link.snr0));
  return b;
}

double phi_exact(double v, const PropulsionParams& p) { return induced_factor(v, p); }

namespace {

double linear_v2(const Vec2& q, const Vec2& q_hat, const Vec2& q0, double epoch_s) {
  const double t2 = epoch_s * epoch_s;
  return (q_hat - q0).squaredNorm() / t2 + 2 * (q_hat - q0).dot(q - q_hat) / t2;
}

// Positive root of b phi^3 + a phi^2 = eta3; unique for b > 0.
double cubic_root(double b, double a, double eta3) {
  auto g = [&](double x) { return (b * x + a) * x * x - eta3; };
  double lo = std::max(0.0, -a / b);
  double hi = std::max(lo, 1.0);
  while (g(hi) < 0) hi = 2 * hi + 1;
  double x = hi;
  for (int i = 0; i < 100; ++i) {
    double gx = g(x);
    if (gx > 0) hi = x; else lo = x;
    double dg = (3 * b * x + 2 * a) * x;
    double xn = dg > 0 ? x - gx / dg : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= 1e-15 * std::max(1.0, x)) return xn;
    x = xn;
  }
  return x;
}

}  // namespace

double phi_rhs(double phi, const Vec2& q, double phi_s, const Vec2& q_hat, const Vec2& q0,
               double epoch_s) {
  return phi_s * phi_s + 2 * phi_s * (phi - phi_s) + linear_v2(q, q_hat, q0, epoch_s);
}

double phi_epigraph(double phi, const Vec2& q, double phi_s, const Vec2& q_hat, const Vec2& q0,
                    double epoch_s, const PropulsionParams& p) {
  return p.eta3 / (phi * phi) - phi_rhs(phi, q, phi_s, q_hat, q0, epoch_s);
}

double phi_active(const Vec2& q, double phi_s, const Vec2& q_hat, const Vec2& q0, double epoch_s,
                  const PropulsionParams& p) {
  const double a = linear_v2(q, q_hat, q0, epoch_s) - phi_s * phi_s;
  return cubic_root(2 * phi_s, a, p.eta3);
}

double linearized_safe_distance(const Vec2& a, const Vec2& b, const Vec2& a_hat,
                                const Vec2& b_hat) {
  const Vec2 dh = a_hat - b_hat;
  return -dh.squaredNorm() + 2 * dh.dot(a - b);
}

namespace {

struct Surrogate {
  const EpochProblem& prob;
  const Expansion& e;
  std::vector<RateBound> bounds;

  Surrogate(const EpochProblem& p, const Expansion& ex) : prob(p), e(ex) {
    for (const auto& link : prob.links)
      bounds.push_back(taylor_rate_bound(link, e.q[link.uav], prob.altitude, prob.path_loss_exp));
  }

  double operator()(const VecX& x, VecX* grad, MatX* hess) const {
    const int n = static_cast<int>(x.size());
    if (grad) grad->setZero(n);
    if (hess) hess->setZero(n, n);
    const double t = prob.epoch_s;
    double total = 0;

    for (size_t k = 0; k < prob.links.size(); ++k) {
      const auto& link = prob.links[k];
      const int i = 2 * link.uav;
      const Vec2 q(x[i], x[i + 1]);
      const Vec2 d = q - link.md_pos;
      const RateBound& rb = bounds[k];
      const double r = rb(d.squaredNorm());
      double v1, v2;
      double v = link_value(link, r, &v1, &v2);
      if (!std::isfinite(v)) return -kInf;
      total += v;
      const Vec2 dr = 2 * rb.slope * d;
      if (grad) grad->segment<2>(i) += v1 * dr;
      if (hess)
        hess->block<2, 2>(i, i) +=
            v2 * dr * dr.transpose() + v1 * 2 * rb.slope * Eigen::Matrix2d::Identity();
    }

    const auto& p = prob.prop;
    for (size_t u = 0; u < prob.uavs.size(); ++u) {
      const auto& term = prob.uavs[u];
      const int i = 2 * static_cast<int>(u);
      const Vec2 q(x[i], x[i + 1]);
      const Vec2 d = q - term.current;
      const double dn = d.norm();
      const double w = term.flight_weight;

      // Profile and parasite terms, exact.
      const double c1 = p.eta1 * 3 / (p.v_tip * p.v_tip * t * t);
      const double c4 = p.eta4 / (t * t * t);
      double power = p.eta1 + c1 * dn * dn + c4 * dn * dn * dn;

      // Induced term through the linearized epigraph, phi solved at q.
      const double phi_s = e.phi[u];
      const Vec2& qh = e.q[u];
      const double a = linear_v2(q, qh, term.current, t) - phi_s * phi_s;
      const double b = 2 * phi_s;
      const double phi = cubic_root(b, a, p.eta3);
      power += p.eta2 * phi;
      total -= w * power;

      if (grad || hess) {
        const double dd = 3 * b * phi + 2 * a;
        const double p1 = -phi / dd;
        const double p2 = (-p1 * dd + phi * (3 * b * p1 + 2)) / (dd * dd);
        const Vec2 gl = 2 * (qh - term.current) / (t * t);
        if (grad) {
          Vec2 gp = 2 * c1 * d + 3 * c4 * dn * d + p.eta2 * p1 * gl;
          grad->segment<2>(i) -= w * gp;
        }
        if (hess) {
          Eigen::Matrix2d hp = 2 * c1 * Eigen::Matrix2d::Identity() + p.eta2 * p2 * gl * gl.transpose();
          if (dn > 0) hp += 3 * c4 * (dn * Eigen::Matrix2d::Identity() + d * d.transpose() / dn);
          hess->block<2, 2>(i, i) -= w * hp;
        }
      }
    }
    return total;
  }
};

VecX flatten(const std::vector<Vec2>& q) {
  VecX x(2 * q.size());
  for (size_t u = 0; u < q.size(); ++u) x.segment<2>(2 * u) = q[u];
  return x;
}

std::vector<Vec2> unflatten(const VecX& x) {
  std::vector<Vec2> q(x.size() / 2);
  for (size_t u = 0; u < q.size(); ++u) q[u] = x.segment<2>(2 * u);
  return q;
}

QuadConstraint ball(int n, int i, const Vec2& center, double radius) {
  QuadConstraint g;
  g.Q = MatX::Zero(n, n);
  g.Q(i, i) = g.Q(i + 1, i + 1) = 2;
  g.c = VecX::Zero(n);
  g.c.segment<2>(i) = -2 * center;
  g.d = center.squaredNorm() - radius * radius;
  // Scale to meters near the boundary; keeps phase I well conditioned.
  const double scale = 1.0 / (2 * std::max(radius, 1.0));
  g.Q *= scale;
  g.c *= scale;
  g.d *= scale;
  return g;
}

QuadConstraint linear(int n) {
  QuadConstraint g;
  g.c = VecX::Zero(n);
  return g;
}

std::vector<QuadConstraint> build_constraints(const EpochProblem& prob, const Expansion& e,
                                              const std::vector<RateBound>& bounds) {
  const int n = 2 * static_cast<int>(prob.uavs.size());
  std::vector<QuadConstraint> cons;
  const double step = prob.v_max * prob.epoch_s;
  for (size_t u = 0; u < prob.uavs.size(); ++u) {
    const int i = 2 * static_cast<int>(u);
    const double hi[2] = {prob.area.x_max, prob.area.y_max};
    for (int k = 0; k < 2; ++k) {
      QuadConstraint lo = linear(n);
      lo.c[i + k] = -1;
      cons.push_back(lo);
      QuadConstraint up = linear(n);
      up.c[i + k] = 1;
      up.d = -hi[k];
      cons.push_back(up);
    }
    cons.push_back(ball(n, i, prob.uavs[u].current, step));
    if (std::isfinite(prob.uavs[u].reach_radius))
      cons.push_back(ball(n, i, prob.uavs[u].target, prob.uavs[u].reach_radius));
  }
  for (size_t k = 0; k < prob.links.size(); ++k) {
    const auto& rb = bounds[k];
    const double x_max = rb.x_hat + (1 - kRateFloor) * rb.value_at_expansion / -rb.slope;
    cons.push_back(ball(n, 2 * prob.links[k].uav, prob.links[k].md_pos, std::sqrt(x_max)));
  }
  const double ds2 = prob.d_safe * prob.d_safe;
  for (size_t a = 0; a < prob.uavs.size(); ++a) {
    for (size_t b = a + 1; b < prob.uavs.size(); ++b) {
      const Vec2 dh = e.q[a] - e.q[b];
      QuadConstraint g = linear(n);
      g.c.segment<2>(2 * a) = -2 * dh;
      g.c.segment<2>(2 * b) = 2 * dh;
      g.d = ds2 + dh.squaredNorm();
      const double scale = 1.0 / (2 * std::max(dh.norm(), prob.d_safe));
      g.c *= scale;
      g.d *= scale;
      cons.push_back(g);
    }
  }
  return cons;
}

}  // namespace

double surrogate_objective(const EpochProblem& prob, const Expansion& e,
                           const std::vector<Vec2>& q) {
  return Surrogate(prob, e)(flatten(q), nullptr, nullptr);
}

ScaIterate solve_convex_subproblem(const EpochProblem& prob, const Expansion& e,
                                   const SolverOptions& opts) {
  Surrogate s(prob, e);
  auto cons = build_constraints(prob, e, s.bounds);
  BarrierOptions bo;
  bo.gap_tol = opts.gap_tol;
  ConcaveObjective f = [&s](const VecX& x, VecX* g, MatX* h) { return s(x, g, h); };
  BarrierResult r = maximize_concave(f, cons, flatten(e.q), bo);

  ScaIterate it;
  it.q = unflatten(r.x);
  it.feasible = r.feasible;
  it.surrogate = r.objective;
  it.kkt_residual = r.kkt_residual;
  it.max_residual = r.max_constraint;
  it.objective = epoch_objective(prob, it.q);
  for (size_t u = 0; u < prob.uavs.size(); ++u)
    it.phi.push_back(phi_active(it.q[u], e.phi[u], e.q[u], prob.uavs[u].current, prob.epoch_s,
                                prob.prop));
  for (size_t k = 0; k < prob.links.size(); ++k) {
    double v = s.bounds[k]((it.q[prob.links[k].uav] - prob.links[k].md_pos).squaredNorm());
    it.rate_aux.push_back(v);
    it.rate_bound.push_back(v);
  }
  return it;
}

namespace {

Expansion expand_at(const EpochProblem& prob, const std::vector<Vec2>& q) {
  Expansion e;
  e.q = q;
  for (size_t u = 0; u < q.size(); ++u)
    e.phi.push_back(phi_exact(uav_speed(q[u], prob.uavs[u].current, prob.epoch_s), prob.prop));
  return e;
}

// Straight step toward the target, used when no strictly feasible point exists.
std::vector<Vec2> straight_step(const EpochProblem& prob) {
  std::vector<Vec2> q;
  const double step = prob.v_max * prob.epoch_s;
  for (const auto& u : prob.uavs) {
    Vec2 d = u.target - u.current;
    double n = d.norm();
    Vec2 next = n <= step ? u.target : Vec2(u.current + d * (step / n));
    next.x() = std::clamp(next.x(), 0.0, prob.area.x_max);
    next.y() = std::clamp(next.y(), 0.0, prob.area.y_max);
    q.push_back(next);
  }
  return q;
}

}  // namespace

ScaResult sca_loop(const EpochProblem& prob, const ScaOptions& opts) {
  ScaResult res;
  std::vector<Vec2> q;
  for (const auto& u : prob.uavs) q.push_back(u.current);
  double obj = epoch_objective(prob, q);
  res.objective.push_back(obj);
  if (prob.uavs.empty()) {
    res.q = q;
    return res;
  }

  bool converged = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    ScaIterate sub = solve_convex_subproblem(prob, expand_at(prob, q));
    if (!sub.feasible) {
      if (it == 0) {
        res.fallback = true;
        q = straight_step(prob);
        res.objective.push_back(epoch_objective(prob, q));
      }
      converged = true;
      break;
    }
    // From the second solve on the expansion point is feasible and the
    // surrogate is tight there, so a decrease only comes from solver
    // tolerance; keep the previous iterate then. The first solve may have to
    // give up value to restore feasibility (e.g. the reach ball).
    if (it > 0 && sub.objective < obj - 1e-12 * std::max(1.0, std::abs(obj))) {
      converged = true;
      break;
    }
    ++res.iterations;
    const double change = sub.objective - obj;
    q = sub.q;
    obj = sub.objective;
    res.objective.push_back(obj);
    res.kkt.push_back(sub.kkt_residual);
    res.last = sub;
    if (std::abs(change) < opts.tol) {
      converged = true;
      break;
    }
  }
  res.hit_cap = !converged;
  res.q = q;
  return res;
}

}  // namespace uavmec

#include "uavmec/barrier_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uavmec {

double QuadConstraint::value(const VecX& x) const {
  double v = c.dot(x) + d;
  if (Q.size() > 0) v += 0.5 * x.dot(Q * x);
  return v;
}

VecX QuadConstraint::gradient(const VecX& x) const {
  if (Q.size() == 0) return c;
  return Q * x + c;
}

namespace {

double max_value(const std::vector<QuadConstraint>& cons, const VecX& x) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& g : cons) m = std::max(m, g.value(x));
  return m;
}

// Barrier function -f(x) - mu sum log(-g_k(x)); +inf outside the interior.
double barrier_value(const ConcaveObjective& f, const std::vector<QuadConstraint>& cons,
                     const VecX& x, double mu) {
  double v = -f(x, nullptr, nullptr);
  if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
  for (const auto& g : cons) {
    double gv = g.value(x);
    if (!(gv < 0)) return std::numeric_limits<double>::infinity();
    v -= mu * std::log(-gv);
  }
  return v;
}

VecX solve_psd(MatX h, const VecX& rhs) {
  const int n = static_cast<int>(h.rows());
  double shift = 0;
  for (int attempt = 0; attempt < 30; ++attempt) {
    Eigen::LLT<MatX> llt(h + shift * MatX::Identity(n, n));
    if (llt.info() == Eigen::Success) return llt.solve(rhs);
    shift = shift == 0 ? 1e-12 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff()) : shift * 10;
  }
  return rhs;  // gradient step as a last resort
}

struct CoreResult {
  VecX x;
  int newton_steps = 0;
  double mu = 0;
  bool converged = false;
};

using StopCheck = std::function<bool(const VecX&)>;

CoreResult barrier_core(const ConcaveObjective& f, const std::vector<QuadConstraint>& cons,
                        VecX x, const BarrierOptions& opts, const StopCheck& stop) {
  CoreResult r;
  const int n = static_cast<int>(x.size());
  const double m = std::max<double>(1.0, static_cast<double>(cons.size()));
  double mu = cons.empty() ? 0.0 : opts.mu0;
  while (true) {
    for (int it = 0; it < opts.max_newton; ++it) {
      VecX gf(n);
      MatX hf(n, n);
      f(x, &gf, &hf);
      VecX grad = -gf;
      MatX hess = -hf;
      for (const auto& g : cons) {
        double gv = g.value(x);
        VecX gg = g.gradient(x);
        grad += (mu / -gv) * gg;
        hess += (mu / (gv * gv)) * gg * gg.transpose();
        if (g.Q.size() > 0) hess += (mu / -gv) * g.Q;
      }
      VecX dx = solve_psd(hess, -grad);
      double decrement = -grad.dot(dx);
      if (!(decrement > 0)) {
        dx = -grad;
        decrement = grad.squaredNorm();
      }
      if (0.5 * decrement <= opts.newton_tol) break;

      double phi0 = barrier_value(f, cons, x, mu);
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        VecX xn = x + t * dx;
        double phin = barrier_value(f, cons, xn, mu);
        if (phin <= phi0 - opts.armijo * t * decrement) {
          x = xn;
          moved = true;
          break;
        }
      }
      ++r.newton_steps;
      if (!moved) break;
      if (stop && stop(x)) {
        r.x = x;
        r.mu = mu;
        r.converged = true;
        return r;
      }
    }
    if (mu * m < opts.gap_tol || cons.empty()) break;
    mu /= opts.mu_factor;
  }
  r.x = x;
  r.mu = mu;
  r.converged = true;
  return r;
}

}  // namespace

bool find_strictly_feasible(const std::vector<QuadConstraint>& cons, VecX& x, double margin,
                            const BarrierOptions& opts) {
  if (cons.empty() || max_value(cons, x) < -margin) return true;
  const int n = static_cast<int>(x.size());
  // Augmented variable (x, s): minimize s subject to g_k(x) <= s and s >= -1.
  std::vector<QuadConstraint> aug;
  for (const auto& g : cons) {
    QuadConstraint a;
    if (g.Q.size() > 0) {
      a.Q = MatX::Zero(n + 1, n + 1);
      a.Q.topLeftCorner(n, n) = g.Q;
    }
    a.c = VecX::Zero(n + 1);
    a.c.head(n) = g.c;
    a.c[n] = -1.0;
    a.d = g.d;
    aug.push_back(a);
  }
  QuadConstraint floor;
  floor.c = VecX::Zero(n + 1);
  floor.c[n] = -1.0;
  floor.d = -1.0;
  aug.push_back(floor);

  VecX y(n + 1);
  y.head(n) = x;
  y[n] = std::max(max_value(cons, x), 0.0) + 1.0;
  ConcaveObjective obj = [n](const VecX& z, VecX* grad, MatX* hess) {
    if (grad) {
      grad->setZero(n + 1);
      (*grad)[n] = -1.0;
    }
    if (hess) hess->setZero(n + 1, n + 1);
    return -z[n];
  };
  auto stop = [&](const VecX& z) { return max_value(cons, z.head(n)) < -margin; };
  BarrierOptions o = opts;
  o.gap_tol = std::min(opts.gap_tol, margin * 1e-3);
  CoreResult r = barrier_core(obj, aug, y, o, stop);
  VecX cand = r.x.head(n);
  if (max_value(cons, cand) < -margin) {
    x = cand;
    return true;
  }
  return false;
}

BarrierResult maximize_concave(const ConcaveObjective& f, const std::vector<QuadConstraint>& cons,
                               const VecX& x0, const BarrierOptions& opts) {
  BarrierResult res;
  VecX x = x0;
  if (!find_strictly_feasible(cons, x, opts.feasibility_margin, opts)) {
    res.x = x0;
    res.objective = f(x0, nullptr, nullptr);
    res.max_constraint = max_value(cons, x0);
    return res;
  }
  CoreResult r = barrier_core(f, cons, x, opts, nullptr);
  res.x = r.x;
  res.newton_steps = r.newton_steps;
  res.feasible = true;
  res.converged = r.converged;
  const int n = static_cast<int>(x.size());
  VecX grad(n);
  res.objective = f(r.x, &grad, nullptr);
  res.max_constraint = cons.empty() ? -std::numeric_limits<double>::infinity() : max_value(cons, r.x);
  VecX stat = grad;
  for (const auto& g : cons) {
    double lam = r.mu / -g.value(r.x);
    res.multipliers.push_back(lam);
    stat -= lam * g.gradient(r.x);
  }
  res.kkt_residual = std::max(stat.lpNorm<Eigen::Infinity>(),
                              r.mu * static_cast<double>(cons.size()));
  return res;
}

}  // namespace uavmec

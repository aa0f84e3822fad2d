#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace uavmec {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// g(x) = 0.5 x'Qx + c'x + d <= 0 with Q positive semidefinite.
struct QuadConstraint {
  MatX Q;  // empty means linear
  VecX c;
  double d = 0;

  double value(const VecX& x) const;
  VecX gradient(const VecX& x) const;
};

// Concave objective: returns f(x) and fills gradient / Hessian when non-null.
using ConcaveObjective = std::function<double(const VecX& x, VecX* grad, MatX* hess)>;

struct BarrierOptions {
  double mu0 = 1.0;
  double mu_factor = 10.0;
  double gap_tol = 1e-10;      // stop once m * mu falls below this
  double newton_tol = 1e-12;   // half squared Newton decrement
  int max_newton = 200;
  double armijo = 1e-4;
  double feasibility_margin = 1e-9;
};

struct BarrierResult {
  VecX x;
  double objective = 0;
  double kkt_residual = 0;       // max of stationarity inf-norm and final mu
  double max_constraint = 0;     // max_k g_k(x), negative when strictly feasible
  std::vector<double> multipliers;
  int newton_steps = 0;
  bool feasible = false;
  bool converged = false;
};

// Maximizes a concave objective over {x : g_k(x) <= 0} with a log barrier and
// damped Newton steps. Starts with a phase-I search when x0 is not strictly
// feasible.
BarrierResult maximize_concave(const ConcaveObjective& f, const std::vector<QuadConstraint>& cons,
                               const VecX& x0, const BarrierOptions& opts = {});

// Phase I on its own: a point with max_k g_k < -margin, if one exists.
bool find_strictly_feasible(const std::vector<QuadConstraint>& cons, VecX& x, double margin,
                            const BarrierOptions& opts = {});

}  // namespace uavmec

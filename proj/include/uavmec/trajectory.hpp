#pragma once

#include <vector>

#include "uavmec/cost_model.hpp"
#include "uavmec/mobility.hpp"
#include "uavmec/types.hpp"

namespace uavmec {

// One task served by a UAV, as it enters the epoch objective
//   theta0 log(1 + tau - l / r - theta1) - theta2 l / r
// where r is the mean-channel rate B log2(1 + snr0 / (|q - q_md|^2 + H^2)^(beta/2)).
struct LinkTerm {
  int uav = 0;
  Vec2 md_pos = Vec2::Zero();
  double snr0 = 0;        // P gbar / N0
  double bandwidth = 0;
  double size_bits = 0;
  double deadline_s = 0;
  double theta0 = 0;      // w / log(1 + tau)
  double theta1 = 0;      // C / f
  double theta2 = 0;      // (1 - w) P / E_norm
};

struct UavTerm {
  Vec2 current = Vec2::Zero();
  Vec2 target = Vec2::Zero();
  double flight_weight = 0;  // multiplies propulsion power (W)
  double reach_radius = kInf;
};

struct EpochProblem {
  std::vector<UavTerm> uavs;
  std::vector<LinkTerm> links;
  double altitude = 100;
  double path_loss_exp = 2;
  double epoch_s = 1;     // delta * Delta
  double v_max = 30;
  double d_safe = 10;
  AreaBounds area;
  PropulsionParams prop;
};

// log with a C2 quadratic continuation below z0, so the objective stays finite
// if a rate estimate drops far enough to push the argument toward zero.
double extended_log(double z, double* d1 = nullptr, double* d2 = nullptr);
inline constexpr double kLogFloor = 1e-3;

double mean_rate(const LinkTerm& link, double dist2, double altitude, double beta);

// Value of a link as a function of its rate, with first two derivatives.
double link_value(const LinkTerm& link, double rate, double* d1 = nullptr, double* d2 = nullptr);

// Epoch objective with the mean-channel rate and exact propulsion power.
double epoch_objective(const EpochProblem& prob, const std::vector<Vec2>& q);

// First-order Taylor bound of the rate in x = |q - q_md|^2 around x_hat.
struct RateBound {
  double value_at_expansion = 0;
  double slope = 0;  // d rate / d x at x_hat (negative)
  double x_hat = 0;
  double operator()(double x) const { return value_at_expansion + slope * (x - x_hat); }
};

RateBound taylor_rate_bound(const LinkTerm& link, const Vec2& q_expansion, double altitude,
                            double beta);

inline double taylor_rate_bound(const Vec2& q, const Vec2& q_expansion, const LinkTerm& link,
                                double altitude, double beta) {
  return taylor_rate_bound(link, q_expansion, altitude, beta)((q - link.md_pos).squaredNorm());
}

// Exact positive root phi of eta3 / phi^2 = phi^2 + v^2.
double phi_exact(double v, const PropulsionParams& p);

// Linearized right-hand side phi_s^2 + 2 phi_s (phi - phi_s) + v_hat^2
// + 2 (q_hat - q0)'(q - q_hat) / T^2 of the propulsion epigraph.
double phi_rhs(double phi, const Vec2& q, double phi_s, const Vec2& q_hat, const Vec2& q0,
               double epoch_s);
// eta3 / phi^2 - rhs; <= 0 means the epigraph constraint holds.
double phi_epigraph(double phi, const Vec2& q, double phi_s, const Vec2& q_hat, const Vec2& q0,
                    double epoch_s, const PropulsionParams& p);
// Smallest phi satisfying the linearized constraint.
double phi_active(const Vec2& q, double phi_s, const Vec2& q_hat, const Vec2& q0, double epoch_s,
                  const PropulsionParams& p);

// -|a_hat - b_hat|^2 + 2 (a_hat - b_hat)'(a - b)
double linearized_safe_distance(const Vec2& a, const Vec2& b, const Vec2& a_hat,
                                const Vec2& b_hat);

struct ScaIterate {
  std::vector<Vec2> q;
  std::vector<double> phi;        // from the active surrogate constraint
  std::vector<double> rate_aux;   // per link, equal to its Taylor bound
  std::vector<double> rate_bound;
  double objective = 0;           // true epoch objective at q
  double surrogate = 0;
  double kkt_residual = 0;
  double max_residual = 0;        // max constraint value of the subproblem
  bool feasible = false;
};

struct Expansion {
  std::vector<Vec2> q;
  std::vector<double> phi;
};

// Concave surrogate at an expansion point; exposed for tests.
double surrogate_objective(const EpochProblem& prob, const Expansion& e,
                           const std::vector<Vec2>& q);

struct SolverOptions {
  double gap_tol = 1e-10;
};

ScaIterate solve_convex_subproblem(const EpochProblem& prob, const Expansion& e,
                                   const SolverOptions& opts = {});

struct ScaOptions {
  double tol = 1e-4;
  int max_iter = 50;
};

struct ScaResult {
  std::vector<Vec2> q;
  std::vector<double> objective;   // entry 0 is the starting value
  std::vector<double> kkt;
  int iterations = 0;
  bool hit_cap = false;
  bool fallback = false;           // no strictly feasible subproblem; took a straight step toward the target
  ScaIterate last;
};

ScaResult sca_loop(const EpochProblem& prob, const ScaOptions& opts = {});

}  // namespace uavmec

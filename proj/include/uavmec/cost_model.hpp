#pragma once

namespace uavmec {

// Rotary-wing propulsion constants. Defaults come from a common quadrotor
// parameterization: blade profile 79.86 W, hover induced 88.63 W, mean rotor
// induced velocity 4.03 m/s, tip speed 120 m/s, and a fuselage drag term
// 0.5 * 0.6 * 1.225 * 0.05 * 0.503.
struct PropulsionParams {
  double eta1 = 79.86;
  double eta2 = 88.63 / 4.03;
  double eta3 = 4.03 * 4.03 * 4.03 * 4.03;
  double eta4 = 0.5 * 0.6 * 1.225 * 0.05 * 0.503;
  double v_tip = 120;
  void validate() const;
};

double local_delay(double cycles, double f);
double local_energy(double cycles, double f, double capacitance);

// l / r + C / f; +inf when the rate is zero.
double edge_delay(double size_bits, double cycles, double rate, double f_alloc);
double upload_energy(double size_bits, double tx_power_w, double rate);

double propulsion_power(double v, const PropulsionParams& p);
double hover_power(const PropulsionParams& p);
// sqrt(sqrt(eta3 + v^4/4) - v^2/2), the induced-velocity factor.
double induced_factor(double v, const PropulsionParams& p);
// Speed in [0, v_max] with the lowest propulsion power (golden section).
double min_power_speed(double v_max, const PropulsionParams& p);

// Computation energy plus, for UAV servers, flight_power * slot_s / share.
// share = 1 charges the whole slot of flight energy to this task.
double server_task_energy(double cycles, double f_alloc, double capacitance, bool aerial,
                          double flight_power_w, double slot_s, double share = 1);

}  // namespace uavmec

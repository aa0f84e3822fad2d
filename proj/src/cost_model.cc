#include "uavmec/cost_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavmec {

void PropulsionParams::validate() const {
  if (!(eta1 > 0 && eta2 > 0 && eta3 > 0 && eta4 > 0 && v_tip > 0))
    throw std::invalid_argument("propulsion parameters must be positive");
}

double local_delay(double cycles, double f) {
  if (!(f > 0)) throw std::domain_error("local_delay: CPU frequency must be > 0");
  return cycles / f;
}

double local_energy(double cycles, double f, double capacitance) {
  if (!(f > 0)) throw std::domain_error("local_energy: CPU frequency must be > 0");
  return capacitance * f * f * cycles;
}

double edge_delay(double size_bits, double cycles, double rate, double f_alloc) {
  if (!(rate > 0) || !(f_alloc > 0)) return std::numeric_limits<double>::infinity();
  return size_bits / rate + cycles / f_alloc;
}

double upload_energy(double size_bits, double tx_power_w, double rate) {
  if (!(rate > 0)) return std::numeric_limits<double>::infinity();
  return tx_power_w * size_bits / rate;
}

double induced_factor(double v, const PropulsionParams& p) {
  double v2 = v * v;
  // sqrt(eta3 + v^4/4) - v^2/2 written without cancellation at high speed.
  double inner = p.eta3 / (std::sqrt(p.eta3 + 0.25 * v2 * v2) + 0.5 * v2);
  return std::sqrt(inner);
}

double propulsion_power(double v, const PropulsionParams& p) {
  double v2 = v * v;
  return p.eta1 * (1.0 + 3.0 * v2 / (p.v_tip * p.v_tip)) + p.eta2 * induced_factor(v, p) +
         p.eta4 * v2 * v;
}

double hover_power(const PropulsionParams& p) {
  return p.eta1 + p.eta2 * std::pow(p.eta3, 0.25);
}

double min_power_speed(double v_max, const PropulsionParams& p) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0, b = v_max;
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int i = 0; i < 200 && b - a > 1e-10; ++i) {
    if (propulsion_power(c, p) < propulsion_power(d, p)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return 0.5 * (a + b);
}

double server_task_energy(double cycles, double f_alloc, double capacitance, bool aerial,
                          double flight_power_w, double slot_s, double share) {
  double e = capacitance * f_alloc * f_alloc * cycles;
  if (aerial) e += flight_power_w * slot_s / (share > 0 ? share : 1.0);
  return e;
}

}  // namespace uavmec

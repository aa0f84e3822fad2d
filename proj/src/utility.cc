#include "uavmec/utility.hpp"

#include <cmath>
#include <limits>

namespace uavmec {

double satisfaction(double deadline_s, double delay_s) {
  if (!(delay_s < deadline_s)) return -std::numeric_limits<double>::infinity();
  return std::log1p(deadline_s - delay_s) / std::log1p(deadline_s);
}

double md_qoe_local(double weight, double deadline_s, double delay_s, double energy_j,
                    double energy_norm_j) {
  double sat = satisfaction(deadline_s, delay_s);
  if (std::isinf(sat)) return sat;
  return weight * sat - (1.0 - weight) * energy_j / energy_norm_j;
}

double md_qoe_edge(double weight, double deadline_s, double delay_s, double upload_energy_j,
                   double energy_norm_j, double f, double price, double payment_budget) {
  double sat = satisfaction(deadline_s, delay_s);
  if (std::isinf(sat)) return sat;
  return weight * sat -
         (1.0 - weight) * (upload_energy_j / energy_norm_j + f * price / payment_budget);
}

double server_revenue(double weight, double f, double price, double f_max, double price_max,
                      double energy_j, double energy_norm_j) {
  return weight * f * price / (f_max * price_max) - (1.0 - weight) * energy_j / energy_norm_j;
}

double system_utility_slot(const std::vector<SlotDecision>& decisions) {
  double s = 0;
  for (const auto& d : decisions) s += d.u_md + (d.offloaded ? d.u_server : 0.0);
  return s;
}

}  // namespace uavmec

#pragma once

#include <vector>

namespace uavmec {

enum class QoeEnergyNormalizer { kServer, kMd };

// Satisfaction term log(1 + tau - D) / log(1 + tau); -inf once D >= tau.
double satisfaction(double deadline_s, double delay_s);

// Local branch: w sat - (1 - w) E / E_md_max.
double md_qoe_local(double weight, double deadline_s, double delay_s, double energy_j,
                    double energy_norm_j);

// Edge branch: w sat - (1 - w) (E_up / E_norm + f p / G).
double md_qoe_edge(double weight, double deadline_s, double delay_s, double upload_energy_j,
                   double energy_norm_j, double f, double price, double payment_budget);

// w_j f p / (f_max p_max) - (1 - w_j) E / E_max
double server_revenue(double weight, double f, double price, double f_max, double price_max,
                      double energy_j, double energy_norm_j);

struct SlotDecision {
  bool offloaded = false;
  double u_md = 0;
  double u_server = 0;
};

// Sum over decided tasks; locally computed tasks add their QoE only.
double system_utility_slot(const std::vector<SlotDecision>& decisions);

}  // namespace uavmec

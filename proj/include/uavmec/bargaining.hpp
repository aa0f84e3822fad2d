#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uavmec/types.hpp"

namespace uavmec {

// Everything one MD-server negotiation needs, flattened so the bargaining
// functions stay pure. elapsed_s is time the task already spent waiting; it is
// part of the completion delay and shrinks the effective deadline.
struct TradeContext {
  double size_bits = 0;
  double cycles = 0;
  double deadline_s = 0;
  double elapsed_s = 0;
  double rate = 0;

  double md_weight = 0.5;
  double tx_power_w = 0.1;
  double payment_budget = 20;
  double upload_energy_norm_j = 1;

  double server_weight = 0.5;
  double server_f_max = 1;
  double server_price_max = 1;
  double server_energy_norm_j = 1;
  double server_capacitance = 1e-27;
  double flight_energy_j = 0;  // propulsion energy attributed to this task

  int horizon = 10;

  double fixed_delay() const;  // elapsed + upload
  double delay(double f) const;
  double upload_energy() const;
  double server_energy(double f) const;
  double md_utility(double f, double price) const;
  double server_utility(double f, double price) const;
};

struct PriceBounds {
  double lower = 0;
  double upper = 0;
  double surplus() const { return upper - lower; }
  bool tradable() const { return upper >= lower && upper > 0; }
};

// Stationary point of the MD utility in f for a fixed unit price:
// f* = 2 w G / (theta(p) - log(1 + tau) p (1 - w)), evaluated in the
// cancellation-free form (C / 2K)(1 + sqrt(1 + 4 G w K / (A C))) with
// K = 1 + tau - fixed delay and A = log(1 + tau) p (1 - w).
// Empty when no interior optimum exists; +inf when the MD ignores cost.
std::optional<double> optimal_allocation(const TradeContext& ctx, double price);

// Break-even prices: lower makes the server revenue zero, upper makes the MD
// utility zero, both at allocation f.
PriceBounds price_bounds(const TradeContext& ctx, double f);

// price_bounds with the upper end also capped by the payment budget (p f <= G)
// and the server's price ceiling.
PriceBounds negotiation_bounds(const TradeContext& ctx, double f);

struct DiscountFactors {
  double md = 1;
  double server = 1;
};

// lambda_md = 1 - upload / tau_left, lambda_server = 1 - compute / tau_left,
// both clamped into [0, 1].
DiscountFactors discount_factors(const TradeContext& ctx, double f);

struct Partition {
  double md = 0;
  double server = 0;
};

// Subgame-perfect split of the surplus in a horizon-period alternating-offers
// game. `last` is the party that makes the offer in the final period (and so
// would take everything there); shares are those agreed in the first period.
Partition spe_partition(double lambda_md, double lambda_server, int horizon, Proposer last);

// upper - surplus * share_md; empty on negative surplus.
std::optional<double> consensus_price(const PriceBounds& b, const Partition& part);

struct NegotiationOptions {
  int max_rounds = 100;
  double tol = 1e-6;
  bool keep_trace = false;
};

struct BargainState {
  int round = 0;
  Proposer proposer = Proposer::kMd;
  double f = 0;
  double price = 0;
  double u_md = 0;
  double u_server = 0;
};

struct Negotiation {
  std::optional<TradeOutcome> trade;
  std::string failure;
  std::vector<BargainState> trace;
  bool ok() const { return trade.has_value(); }
};

// Alternating price / allocation updates starting from f = f_avl.
Negotiation negotiate(const TradeContext& ctx, double f_avl, const NegotiationOptions& opts = {});

// Price at allocation f for a given proposer (one round of the price update).
std::optional<double> price_at(const TradeContext& ctx, double f, Proposer proposer);

}  // namespace uavmec

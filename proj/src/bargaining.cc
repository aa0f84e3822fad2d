#include "uavmec/bargaining.hpp"

#include <algorithm>
#include <cmath>

#include "uavmec/cost_model.hpp"
#include "uavmec/utility.hpp"

namespace uavmec {

double TradeContext::fixed_delay() const {
  if (!(rate > 0)) return kInf;
  return elapsed_s + size_bits / rate;
}

double TradeContext::delay(double f) const {
  if (!(f > 0)) return kInf;
  return fixed_delay() + cycles / f;
}

double TradeContext::upload_energy() const {
  return uavmec::upload_energy(size_bits, tx_power_w, rate);
}

double TradeContext::server_energy(double f) const {
  return server_capacitance * f * f * cycles + flight_energy_j;
}

double TradeContext::md_utility(double f, double price) const {
  return md_qoe_edge(md_weight, deadline_s, delay(f), upload_energy(), upload_energy_norm_j, f,
                     price, payment_budget);
}

double TradeContext::server_utility(double f, double price) const {
  return server_revenue(server_weight, f, price, server_f_max, server_price_max,
                        server_energy(f), server_energy_norm_j);
}

std::optional<double> optimal_allocation(const TradeContext& ctx, double price) {
  const double w = ctx.md_weight;
  const double k = 1.0 + ctx.deadline_s - ctx.fixed_delay();
  if (!(w > 0) || !(k > 0) || !(ctx.cycles > 0)) return std::nullopt;
  const double a = std::log1p(ctx.deadline_s) * price * (1.0 - w);
  if (!(a > 0)) return kInf;
  const double c = ctx.cycles;
  const double radicand = 1.0 + 4.0 * ctx.payment_budget * w * k / (a * c);
  if (!(radicand >= 0)) return std::nullopt;
  return c / (2.0 * k) * (1.0 + std::sqrt(radicand));
}

PriceBounds price_bounds(const TradeContext& ctx, double f) {
  PriceBounds b;
  const double e = ctx.server_energy(f);
  const double wj = ctx.server_weight;
  b.lower = wj > 0 ? (1.0 - wj) * e * ctx.server_f_max * ctx.server_price_max /
                         (wj * ctx.server_energy_norm_j * f)
                   : kInf;
  const double sat = satisfaction(ctx.deadline_s, ctx.delay(f));
  const double w = ctx.md_weight;
  if (std::isinf(sat)) {
    b.upper = -kInf;
  } else if (w >= 1.0) {
    b.upper = kInf;
  } else {
    b.upper = (w * sat / (1.0 - w) - ctx.upload_energy() / ctx.upload_energy_norm_j) *
              ctx.payment_budget / f;
  }
  return b;
}

PriceBounds negotiation_bounds(const TradeContext& ctx, double f) {
  PriceBounds b = price_bounds(ctx, f);
  b.upper = std::min({b.upper, ctx.payment_budget / f, ctx.server_price_max});
  return b;
}

DiscountFactors discount_factors(const TradeContext& ctx, double f) {
  const double left = ctx.deadline_s - ctx.elapsed_s;
  if (!(left > 0) || !(ctx.rate > 0) || !(f > 0)) return {0.0, 0.0};
  DiscountFactors d;
  d.md = std::clamp(1.0 - ctx.size_bits / ctx.rate / left, 0.0, 1.0);
  d.server = std::clamp(1.0 - ctx.cycles / f / left, 0.0, 1.0);
  return d;
}

namespace {

// 1 + x + ... + x^(m-1)
double geometric_sum(double x, int m) {
  if (m <= 0) return 0.0;
  if (std::abs(1.0 - x) > 1e-3) return (1.0 - std::pow(x, m)) / (1.0 - x);
  double s = 0, t = 1;
  for (int k = 0; k < m; ++k, t *= x) s += t;
  return s;
}

}  // namespace

Partition spe_partition(double lambda_md, double lambda_server, int horizon, Proposer last) {
  // Roll back in pairs of periods from the final one, where `last` takes the
  // whole surplus. Two periods earlier its share is (1 - l_other) + x * share.
  const double la = last == Proposer::kMd ? lambda_md : lambda_server;
  const double lb = last == Proposer::kMd ? lambda_server : lambda_md;
  const double x = la * lb;
  double a;
  if (horizon % 2 == 1) {
    int m = (horizon - 1) / 2;
    a = (1.0 - lb) * geometric_sum(x, m) + std::pow(x, m);
  } else {
    // First period belongs to the other party, which offers la times the
    // continuation share.
    int m = (horizon - 2) / 2;
    a = la * ((1.0 - lb) * geometric_sum(x, m) + std::pow(x, m));
  }
  Partition p;
  if (last == Proposer::kMd) {
    p.md = a;
    p.server = 1.0 - a;
  } else {
    p.server = a;
    p.md = 1.0 - a;
  }
  return p;
}

std::optional<double> consensus_price(const PriceBounds& b, const Partition& part) {
  const double surplus = b.surplus();
  if (!(surplus >= 0) || std::isinf(surplus)) return std::nullopt;
  return b.upper - surplus * part.md;
}

std::optional<double> price_at(const TradeContext& ctx, double f, Proposer proposer) {
  PriceBounds b = negotiation_bounds(ctx, f);
  if (!b.tradable()) return std::nullopt;
  DiscountFactors d = discount_factors(ctx, f);
  return consensus_price(b, spe_partition(d.md, d.server, ctx.horizon, proposer));
}

namespace {

Proposer next_proposer(double u_md, double u_server, Proposer current) {
  if (u_md > 0 && u_server > 0) return current;
  if (u_md <= 0 && u_server > 0) return Proposer::kServer;
  return Proposer::kMd;
}

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

Negotiation negotiate(const TradeContext& ctx, double f_avl, const NegotiationOptions& opts) {
  Negotiation out;
  if (!(f_avl > 0)) {
    out.failure = "no capacity";
    return out;
  }
  if (!(ctx.rate > 0) || !(ctx.fixed_delay() < ctx.deadline_s)) {
    out.failure = "deadline";
    return out;
  }

  double f = f_avl;
  Proposer proposer = Proposer::kMd;
  double u_md = 0, u_server = 0;
  double p_prev = -1;
  bool converged = false;
  int round = 0;
  while (round < opts.max_rounds) {
    ++round;
    proposer = next_proposer(u_md, u_server, proposer);
    auto p = price_at(ctx, f, proposer);
    if (!p) {
      out.failure = "no surplus";
      return out;
    }
    u_md = ctx.md_utility(f, *p);
    u_server = ctx.server_utility(f, *p);
    if (opts.keep_trace) out.trace.push_back({round, proposer, f, *p, u_md, u_server});
    auto f_opt = optimal_allocation(ctx, *p);
    if (!f_opt) {
      out.failure = "no interior optimum";
      return out;
    }
    const double f_next = std::min(*f_opt, f_avl);
    const bool settled = round > 1 && close(f_next, f, opts.tol) && close(*p, p_prev, opts.tol);
    p_prev = *p;
    f = f_next;
    if (settled) {
      converged = true;
      break;
    }
  }

  auto p = price_at(ctx, f, proposer);
  if (!p) {
    out.failure = "no surplus";
    return out;
  }
  TradeOutcome t;
  t.f_alloc = f;
  t.p_unit = *p;
  t.u_md = ctx.md_utility(f, *p);
  t.u_server = ctx.server_utility(f, *p);
  t.rounds = round;
  t.proposer = proposer;
  t.converged = converged;
  if (!(t.u_md > 0) || !(t.u_server > 0)) {
    out.failure = "no mutual gain";
    return out;
  }
  if (!(ctx.delay(f) < ctx.deadline_s)) {
    out.failure = "deadline";
    return out;
  }
  out.trade = t;
  return out;
}

}  // namespace uavmec

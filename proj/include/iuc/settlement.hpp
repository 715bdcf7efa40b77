#pragma once

// Market settlement: per-unit cost/revenue decomposition, make-whole uplift,
// RES opportunity payments, RMR overlay construction, and cross-scheme
// comparison.

#include <algorithm>
#include <string>
#include <vector>

#include "iuc/pricing.hpp"

namespace iuc {

struct UnitSettlement {
  std::string id;
  std::string kind;  // "sg" | "es" | "res"
  double cost = 0.0;
  double energy_revenue = 0.0;
  double reserve_revenue = 0.0;
  double inertia_revenue = 0.0;
  double uplift = 0.0;
  double opportunity = 0.0;  // RES deloading payment
  double profit = 0.0;
};

struct SettlementReport {
  Scheme scheme = Scheme::MP;
  std::vector<UnitSettlement> units;
  double total_uplift = 0.0;
  double consumer_payment = 0.0;
  // Flag for the unresolved overlap between RES inertia revenue and the
  // opportunity payment; both are reported, neither is silently dropped.
  bool res_double_payment = false;
};

// Curtailment payment at the unit's nodal price (Eq.-8b style).
inline double res_opportunity(const SystemCase& c, const ResUnit& r,
                              const PriceSeries& prices) {
  const int b = c.network.bus_index(r.bus);
  double pay = 0.0;
  for (int t = 0; t < c.params.T; ++t)
    pay += prices.lambda[b][t] * (r.mppt[t] - r.forecast[t]);
  return pay;
}

inline SettlementReport settle(const SystemCase& c,
                               const DecisionSchedule& sched,
                               const PriceSeries& prices) {
  if (prices.lambda.size() != c.network.buses.size())
    throw std::invalid_argument("settle: price series does not cover buses");
  const int T = c.params.T;
  AggregateError agg = aggregate_errors(c);
  SettlementReport rep;
  rep.scheme = prices.scheme;

  double settled_inertia_payment = 0.0;
  for (size_t i = 0; i < c.sgs.size(); ++i) {
    const auto& g = c.sgs[i];
    const int b = c.network.bus_index(g.bus);
    UnitSettlement u;
    u.id = g.id;
    u.kind = "sg";
    for (int t = 0; t < T; ++t) {
      u.cost += expected_sg_cost(g, sched.P[i][t], sched.alpha[i][t],
                                 sched.u[i][t], sched.v[i][t], agg.Mrt[t],
                                 agg.Srt[t]);
      u.energy_revenue += prices.lambda[b][t] * sched.P[i][t];
      // Reserve settled against the unit-simplex participation factor.
      u.reserve_revenue += prices.gamma[t] * sched.alpha[i][t];
      u.inertia_revenue +=
          prices.chi[t] * sched.u[i][t] * g.Hg * g.Pmax;
    }
    settled_inertia_payment += u.inertia_revenue;
    double rev = u.energy_revenue + u.reserve_revenue + u.inertia_revenue;
    u.uplift = std::max(0.0, u.cost - rev);
    u.profit = rev + u.uplift + u.opportunity - u.cost;
    rep.total_uplift += u.uplift;
    rep.units.push_back(u);
  }
  for (size_t j = 0; j < c.ess.size(); ++j) {
    const auto& e = c.ess[j];
    const int b = c.network.bus_index(e.bus);
    UnitSettlement u;
    u.id = e.id;
    u.kind = "es";
    for (int t = 0; t < T; ++t) {
      u.energy_revenue +=
          prices.lambda[b][t] * (sched.Pd[j][t] - sched.Pc[j][t]);
      u.reserve_revenue += prices.gamma[t] * (sched.ad[j][t] - sched.ac[j][t]);
      u.inertia_revenue += prices.chi[t] * sched.He[j][t] * e.Pe_max;
    }
    settled_inertia_payment += u.inertia_revenue;
    double rev = u.energy_revenue + u.reserve_revenue + u.inertia_revenue;
    u.uplift = std::max(0.0, u.cost - rev);
    u.profit = rev + u.uplift - u.cost;
    rep.total_uplift += u.uplift;
    rep.units.push_back(u);
  }
  for (size_t k = 0; k < c.ress.size(); ++k) {
    const auto& r = c.ress[k];
    const int b = c.network.bus_index(r.bus);
    UnitSettlement u;
    u.id = r.id;
    u.kind = "res";
    for (int t = 0; t < T; ++t) {
      u.energy_revenue += prices.lambda[b][t] * r.forecast[t];
      u.inertia_revenue +=
          prices.chi[t] * r.inertia_forecast[t] * r.Pmax;
    }
    settled_inertia_payment += u.inertia_revenue;
    u.opportunity = res_opportunity(c, r, prices);
    if (u.inertia_revenue > 1e-9 && u.opportunity > 1e-9)
      rep.res_double_payment = true;
    double rev = u.energy_revenue + u.reserve_revenue + u.inertia_revenue;
    u.uplift = std::max(0.0, u.cost - rev);
    u.profit = rev + u.uplift + u.opportunity - u.cost;
    rep.total_uplift += u.uplift;
    rep.units.push_back(u);
  }
  for (int t = 0; t < T; ++t) {
    for (size_t b = 0; b < c.network.buses.size(); ++b) {
      auto it = c.load.find(c.network.buses[b]);
      if (it != c.load.end())
        rep.consumer_payment += prices.lambda[b][t] * it->second[t];
    }
    rep.consumer_payment += prices.gamma[t];  // unit-simplex reserve demand
  }
  rep.consumer_payment += settled_inertia_payment;
  return rep;
}

// Kinetic-energy supply of a schedule hour against the requirement, using
// the same margin-adjusted RES terms as the constraint row.
inline double inertia_supply(const SystemCase& c, const ChanceMargins& m,
                             const DecisionSchedule& s, int t) {
  double lhs = 0.0;
  for (size_t i = 0; i < c.sgs.size(); ++i)
    lhs += s.u[i][t] * c.sgs[i].Hg * c.sgs[i].Pmax;
  for (size_t j = 0; j < c.ess.size(); ++j)
    lhs += s.He[j][t] * c.ess[j].Pe_max;
  for (size_t k = 0; k < c.ress.size(); ++k)
    lhs += (c.ress[k].inertia_forecast[t] + m.dh[k][t]) * c.ress[k].Pmax;
  return lhs;
}

// RMR overlay: for each deficit hour, bring offline SGs online in ascending
// order of marginal cost at minimum output until the requirement is met.
// Online blocks are then stretched to the minimum up time so the overlay
// admits a feasible re-dispatch.
inline std::vector<std::vector<int>> rmr_select(const SystemCase& c,
                                                const ChanceMargins& m,
                                                const DecisionSchedule& base) {
  const int T = c.params.T;
  const int nG = static_cast<int>(c.sgs.size());
  const double req = c.params.Psys * c.params.Hmin;

  std::vector<int> order(nG);
  for (int i = 0; i < nG; ++i) order[i] = i;
  auto metric = [&](int i) {
    const auto& g = c.sgs[i];
    if (g.Pmin > 0)
      return (g.a * g.Pmin * g.Pmin + g.b * g.Pmin + g.c) / g.Pmin;
    return g.b;
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double ma = metric(a), mb = metric(b);
    if (ma != mb) return ma < mb;
    return c.sgs[a].id < c.sgs[b].id;  // deterministic tie-break
  });

  std::vector<std::vector<int>> u = base.u;
  for (int t = 0; t < T; ++t) {
    double lhs = 0.0;
    for (int i = 0; i < nG; ++i) lhs += u[i][t] * c.sgs[i].Hg * c.sgs[i].Pmax;
    for (size_t j = 0; j < c.ess.size(); ++j)
      lhs += base.He[j][t] * c.ess[j].Pe_max;
    for (size_t k = 0; k < c.ress.size(); ++k)
      lhs += (c.ress[k].inertia_forecast[t] + m.dh[k][t]) * c.ress[k].Pmax;
    if (lhs >= req - 1e-9) continue;
    for (int i : order) {
      if (u[i][t]) continue;
      u[i][t] = 1;
      lhs += c.sgs[i].Hg * c.sgs[i].Pmax;
      if (lhs >= req - 1e-9) break;
    }
    if (lhs < req - 1e-9)
      throw InfeasibleError(
          "inertia requirement unattainable with all SGs online at hour " +
              std::to_string(t),
          "inertia");
  }
  // Stretch added on-blocks to the minimum up time.
  for (int i = 0; i < nG; ++i) {
    const int TU = c.sgs[i].TU;
    for (int t = 0; t < T;) {
      if (!u[i][t]) {
        ++t;
        continue;
      }
      int t0 = t;
      while (t < T && u[i][t]) ++t;
      int len = t - t0;
      bool from_start = (t0 == 0 && c.sgs[i].u0 == 1);
      if (!from_start && len < TU) {
        int need = TU - len;
        int fwd = std::min(need, T - t);
        for (int k = 0; k < fwd; ++k) u[i][t + k] = 1;
        t += fwd;
      }
    }
  }
  return u;
}

struct SchemeComparison {
  struct Row {
    Scheme scheme;
    double total_uplift = 0.0;
    double consumer_payment = 0.0;
    double sg_profit = 0.0, es_profit = 0.0, res_profit = 0.0;
  };
  std::vector<Row> rows;
};

inline SchemeComparison compare_schemes(
    const std::vector<SettlementReport>& reports) {
  if (reports.size() < 2)
    throw std::invalid_argument("compare_schemes: need at least two reports");
  for (const auto& r : reports)
    if (r.units.size() != reports.front().units.size())
      throw std::invalid_argument("compare_schemes: mismatched scenarios");
  SchemeComparison cmp;
  for (const auto& r : reports) {
    SchemeComparison::Row row;
    row.scheme = r.scheme;
    row.total_uplift = r.total_uplift;
    row.consumer_payment = r.consumer_payment;
    for (const auto& u : r.units) {
      if (u.kind == "sg") row.sg_profit += u.profit;
      else if (u.kind == "es") row.es_profit += u.profit;
      else row.res_profit += u.profit;
    }
    cmp.rows.push_back(row);
  }
  return cmp;
}

}  // namespace iuc

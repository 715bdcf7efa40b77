#pragma once

// Remuneration price formation: marginal pricing from the fixed-commitment
// QP duals, approximate convex-hull pricing via hourly relaxed problems with
// distributed start-up costs, and average incremental pricing with fixed
// costs folded into the energy coefficient.

#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "iuc/solve.hpp"

namespace iuc {

enum class Scheme { MP, ACHP, AIP };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::MP: return "MP";
    case Scheme::ACHP: return "ACHP";
    case Scheme::AIP: return "AIP";
  }
  return "?";
}

struct PriceSeries {
  Scheme scheme = Scheme::MP;
  std::vector<std::vector<double>> lambda;  // [bus][t] $/MWh
  std::vector<double> gamma;                // [t] $/MW
  std::vector<double> chi;                  // [t] $/(MW*s)
  std::string allocation_rule;              // aCHP metadata
  std::vector<std::string> notes;           // fallbacks, non-uniqueness flags
};

// ---------------------------------------------------------------------------
// Start-up cost allocation over online intervals (half-open [t_on, t_off)).

enum class AllocationRule { Uniform, FirstHour, EnergyWeighted };

inline const char* to_string(AllocationRule r) {
  switch (r) {
    case AllocationRule::Uniform: return "uniform";
    case AllocationRule::FirstHour: return "first-hour";
    case AllocationRule::EnergyWeighted: return "energy-weighted";
  }
  return "?";
}

inline std::optional<AllocationRule> allocation_rule_from_string(
    const std::string& s) {
  if (s == "uniform") return AllocationRule::Uniform;
  if (s == "first-hour") return AllocationRule::FirstHour;
  if (s == "energy-weighted") return AllocationRule::EnergyWeighted;
  return std::nullopt;
}

// Exact rational arithmetic for the conservation guarantee.
struct Rational {
  long long num = 0, den = 1;
  Rational() = default;
  Rational(long long n, long long d = 1) : num(n), den(d) { normalize(); }
  void normalize() {
    if (den < 0) num = -num, den = -den;
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) num /= g, den /= g;
    if (num == 0) den = 1;
  }
  Rational operator+(const Rational& o) const {
    return Rational(num * o.den + o.num * den, den * o.den);
  }
  Rational operator-(const Rational& o) const {
    return Rational(num * o.den - o.num * den, den * o.den);
  }
  Rational operator*(const Rational& o) const {
    return Rational(num * o.num, den * o.den);
  }
  Rational operator/(const Rational& o) const {
    return Rational(num * o.den, den * o.num);
  }
  bool operator==(const Rational& o) const {
    return num == o.num && den == o.den;
  }
  double value() const { return double(num) / double(den); }
};

struct OnlineInterval {
  int t_on = 0, t_off = 0;  // [t_on, t_off)
  bool startup = true;      // false when inherited from u0 = 1
};

inline std::vector<OnlineInterval> online_intervals(
    const std::vector<int>& u, int u0) {
  std::vector<OnlineInterval> out;
  const int T = static_cast<int>(u.size());
  int t = 0;
  while (t < T) {
    if (u[t] == 1) {
      OnlineInterval iv;
      iv.t_on = t;
      iv.startup = !(t == 0 && u0 == 1);
      while (t < T && u[t] == 1) ++t;
      iv.t_off = t;  // unit online at t = T-1 keeps t_off = T
      out.push_back(iv);
    } else {
      ++t;
    }
  }
  return out;
}

// Exact per-hour allocation of an integer-scaled start-up cost.  `energy`
// supplies integer-valued weights for the energy-weighted rule.
inline std::vector<Rational> allocate_interval_exact(
    long long s_num, long long s_den, int len, AllocationRule rule,
    const std::vector<long long>& energy = {}) {
  std::vector<Rational> out(len, Rational(0));
  Rational s(s_num, s_den);
  switch (rule) {
    case AllocationRule::Uniform:
      for (int t = 0; t < len; ++t) out[t] = s / Rational(len);
      break;
    case AllocationRule::FirstHour:
      if (len > 0) out[0] = s;
      break;
    case AllocationRule::EnergyWeighted: {
      long long tot = 0;
      for (long long e : energy) tot += e;
      if (tot == 0) {
        for (int t = 0; t < len; ++t) out[t] = s / Rational(len);
      } else {
        for (int t = 0; t < len; ++t)
          out[t] = s * Rational(energy[t], tot);
      }
      break;
    }
  }
  return out;
}

struct StartupAllocation {
  // [sg][t]; zero off-line, sums to s over each interval with a startup.
  std::vector<std::vector<double>> s_tilde;
  AllocationRule rule = AllocationRule::Uniform;
};

inline StartupAllocation allocate_startup(const SystemCase& c,
                                          const DecisionSchedule& sched,
                                          AllocationRule rule) {
  StartupAllocation out;
  out.rule = rule;
  const int T = c.params.T;
  out.s_tilde.assign(c.sgs.size(), std::vector<double>(T, 0.0));
  for (size_t i = 0; i < c.sgs.size(); ++i) {
    for (const auto& iv : online_intervals(sched.u[i], c.sgs[i].u0)) {
      if (!iv.startup) continue;  // no startup to allocate for u0 = 1 runs
      const int len = iv.t_off - iv.t_on;
      switch (rule) {
        case AllocationRule::Uniform:
          for (int t = iv.t_on; t < iv.t_off; ++t)
            out.s_tilde[i][t] = c.sgs[i].s / len;
          break;
        case AllocationRule::FirstHour:
          out.s_tilde[i][iv.t_on] = c.sgs[i].s;
          break;
        case AllocationRule::EnergyWeighted: {
          double tot = 0.0;
          for (int t = iv.t_on; t < iv.t_off; ++t) tot += sched.P[i][t];
          for (int t = iv.t_on; t < iv.t_off; ++t)
            out.s_tilde[i][t] =
                tot > 0 ? c.sgs[i].s * sched.P[i][t] / tot
                        : c.sgs[i].s / len;
          break;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// MP: prices are the central duals of the fixed-commitment QP.

inline PriceSeries mp_prices(const DualRecord& d) {
  if (d.lambda.empty()) throw std::invalid_argument("mp_prices: missing duals");
  PriceSeries p;
  p.scheme = Scheme::MP;
  p.lambda = d.lambda;
  p.gamma = d.gamma;
  p.chi = d.chi;
  return p;
}

// ---------------------------------------------------------------------------
// KKT price assemblers (closed forms used as cross-checks against the
// solver duals; the solver duals are authoritative).

// Energy price at the unit: 2a(P + M alpha) + b_eff + mu+ - mu- + ups+ - ups-.
inline double assemble_energy_price(const SgUnit& g, double P, double alpha,
                                    double M, double mu_p, double mu_m,
                                    double ups_p, double ups_m,
                                    double b_eff_override = -1) {
  const double b = b_eff_override >= 0 ? b_eff_override : g.b;
  return 2 * g.a * (P + M * alpha) + b + mu_p - mu_m + ups_p - ups_m;
}

// Reserve price at the unit from the stationarity in alpha.
inline double assemble_reserve_price(const SgUnit& g, double P, double alpha,
                                     double M, double S, double d_hi,
                                     double d_lo, double mu_p, double mu_m,
                                     double rho_p, double rho_m,
                                     double b_eff_override = -1) {
  const double b = b_eff_override >= 0 ? b_eff_override : g.b;
  return 2 * g.a * (M * P + alpha * (M * M + S * S)) + b * M +
         mu_p * d_hi + mu_m * d_lo + rho_p - rho_m;
}

// Inertia price from the stationarity in the relaxed commitment variable.
inline double assemble_inertia_price(const SgUnit& g, double c_plus_stilde,
                                     double kappa_p, double kappa_m,
                                     double rho_p, double mu_p, double mu_m) {
  return (c_plus_stilde + kappa_p - kappa_m - rho_p - mu_p * g.Pmax +
          mu_m * g.Pmin) /
         (g.Hg * g.Pmax);
}

// Aggregated quotient form of the inertia price (cross-check only; the
// denominator can vanish when non-SG inertia exceeds the requirement).
inline std::optional<double> inertia_price_quotient(
    const SystemCase& c, const ChanceMargins& m, const DecisionSchedule& s,
    int t, const std::vector<double>& unit_numerators) {
  double denom = c.params.Psys * c.params.Hmin;
  for (size_t j = 0; j < c.ess.size(); ++j)
    denom -= s.He[j][t] * c.ess[j].Pe_max;
  for (size_t k = 0; k < c.ress.size(); ++k)
    denom -= (c.ress[k].inertia_forecast[t] + m.dh[k][t]) * c.ress[k].Pmax;
  if (std::abs(denom) < 1e-9) return std::nullopt;
  double num = 0.0;
  for (size_t i = 0; i < c.sgs.size(); ++i)
    num += s.u[i][t] * unit_numerators[i];
  return num / denom;
}

// ---------------------------------------------------------------------------
// Hourly relaxed pricing problem shared by aCHP and AIP.  Variables per
// hour: SG (u, P, alpha) and bus angles; ES quantities and RES output are
// fixed from the dispatch schedule.

struct HourlyDuals {
  std::vector<double> lambda;  // per bus
  double gamma = 0.0, chi = 0.0;
  std::vector<double> mu_p, mu_m, rho_p, rho_m, kap_p, kap_m, ups_p, ups_m;
  std::vector<double> P, alpha, u;  // primal, for chaining and assembly
};

namespace detail {

inline HourlyDuals solve_hourly_pricing(
    const SystemCase& c, const ChanceMargins& margins,
    const AggregateError& agg, const DecisionSchedule& sched, int t,
    const std::vector<double>& p_prev, const std::vector<double>& u_cost,
    const std::vector<double>& b_eff, const QpOptions& qp_opt) {
  const int nG = static_cast<int>(c.sgs.size());
  const int nB = static_cast<int>(c.network.buses.size());
  const int nE = static_cast<int>(c.ess.size());
  // Layout: [u_0..], [P_0..], [alpha_0..], [theta_0..]
  const int iu = 0, iP = nG, ia = 2 * nG, ith = 3 * nG;
  const int n = 3 * nG + nB;
  const double M = agg.Mrt[t], S = agg.Srt[t];

  QpProblem p;
  p.P = Eigen::MatrixXd::Zero(n, n);
  p.q = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < nG; ++i) {
    const auto& g = c.sgs[i];
    p.P(iP + i, iP + i) = 2 * g.a;
    p.P(ia + i, ia + i) = 2 * g.a * (M * M + S * S);
    p.P(iP + i, ia + i) = p.P(ia + i, iP + i) = 2 * g.a * M;
    p.q(iP + i) = b_eff[i];
    p.q(ia + i) = b_eff[i] * M;
    p.q(iu + i) = u_cost[i];
  }

  detail::RowBuffer eq, in;
  std::vector<int> balance_rows(nB, -1);
  for (int b = 0; b < nB; ++b) {
    const std::string& bus = c.network.buses[b];
    double rhs = 0.0;
    auto it = c.load.find(bus);
    if (it != c.load.end()) rhs += it->second[t];
    for (const auto& r : c.ress)
      if (r.bus == bus) rhs -= r.forecast[t];
    for (int j = 0; j < nE; ++j)
      if (c.ess[j].bus == bus) rhs -= sched.Pd[j][t] - sched.Pc[j][t];
    int row = eq.add(rhs);
    for (int i = 0; i < nG; ++i)
      if (c.sgs[i].bus == bus) eq.coef(row, iP + i, 1.0);
    const double base = c.params.mva_base;
    for (const auto& l : c.network.lines) {
      if (l.from != bus && l.to != bus) continue;
      int bf = c.network.bus_index(l.from), bt2 = c.network.bus_index(l.to);
      int other = (l.from == bus) ? bt2 : bf;
      eq.coef(row, ith + b, -l.B * base);
      eq.coef(row, ith + other, l.B * base);
    }
    balance_rows[b] = row;
  }
  double res_rhs = 1.0;
  for (int j = 0; j < nE; ++j) res_rhs -= sched.ad[j][t] - sched.ac[j][t];
  int reserve_row = eq.add(res_rhs);
  for (int i = 0; i < nG; ++i) eq.coef(reserve_row, ia + i, 1.0);
  int slack_row = eq.add(0.0);
  eq.coef(slack_row, ith + c.network.bus_index(c.network.slack_bus), 1.0);

  std::vector<int> r_cap_hi(nG), r_cap_lo(nG), r_a_hi(nG), r_a_lo(nG);
  std::vector<int> r_u_hi(nG), r_u_lo(nG), r_rmp_hi(nG), r_rmp_lo(nG);
  for (int i = 0; i < nG; ++i) {
    const auto& g = c.sgs[i];
    int r = in.add(0.0);
    in.coef(r, iP + i, 1.0);
    in.coef(r, ia + i, margins.dg_hi[i][t]);
    in.coef(r, iu + i, -g.Pmax);
    r_cap_hi[i] = r;
    r = in.add(0.0);
    in.coef(r, iP + i, -1.0);
    in.coef(r, ia + i, margins.dg_lo[i][t]);
    in.coef(r, iu + i, g.Pmin);
    r_cap_lo[i] = r;
    r = in.add(0.0);
    in.coef(r, ia + i, 1.0);
    in.coef(r, iu + i, -1.0);
    r_a_hi[i] = r;
    r = in.add(0.0);
    in.coef(r, ia + i, -1.0);
    r_a_lo[i] = r;
    r = in.add(1.0);
    in.coef(r, iu + i, 1.0);
    r_u_hi[i] = r;
    r = in.add(0.0);
    in.coef(r, iu + i, -1.0);
    r_u_lo[i] = r;
    r = in.add(g.RU + p_prev[i]);
    in.coef(r, iP + i, 1.0);
    r_rmp_hi[i] = r;
    r = in.add(g.RD - p_prev[i]);
    in.coef(r, iP + i, -1.0);
    r_rmp_lo[i] = r;
  }
  const double base = c.params.mva_base;
  for (const auto& l : c.network.lines) {
    int bf = c.network.bus_index(l.from), bt2 = c.network.bus_index(l.to);
    int r = in.add(l.Fmax);
    in.coef(r, ith + bf, l.B * base);
    in.coef(r, ith + bt2, -l.B * base);
    r = in.add(l.Fmax);
    in.coef(r, ith + bf, -l.B * base);
    in.coef(r, ith + bt2, l.B * base);
  }
  double irhs = -c.params.Psys * c.params.Hmin;
  for (int j = 0; j < nE; ++j) irhs += sched.He[j][t] * c.ess[j].Pe_max;
  for (size_t k = 0; k < c.ress.size(); ++k)
    irhs += (c.ress[k].inertia_forecast[t] + margins.dh[k][t]) *
            c.ress[k].Pmax;
  int inertia_row = in.add(irhs);
  for (int i = 0; i < nG; ++i)
    in.coef(inertia_row, iu + i, -c.sgs[i].Hg * c.sgs[i].Pmax);

  eq.to_dense(p.A, p.b, n);
  in.to_dense(p.G, p.h, n);
  QpSolution sol = solve_qp(p, qp_opt);
  if (sol.status == QpStatus::Infeasible)
    throw InfeasibleError("hourly pricing problem infeasible at hour " +
                              std::to_string(t),
                          "hourly");

  HourlyDuals d;
  d.lambda.resize(nB);
  for (int b = 0; b < nB; ++b) d.lambda[b] = -sol.y(balance_rows[b]);
  d.gamma = -sol.y(reserve_row);
  d.chi = sol.z(inertia_row);
  d.mu_p.resize(nG);
  d.mu_m.resize(nG);
  d.rho_p.resize(nG);
  d.rho_m.resize(nG);
  d.kap_p.resize(nG);
  d.kap_m.resize(nG);
  d.ups_p.resize(nG);
  d.ups_m.resize(nG);
  d.P.resize(nG);
  d.alpha.resize(nG);
  d.u.resize(nG);
  for (int i = 0; i < nG; ++i) {
    d.mu_p[i] = sol.z(r_cap_hi[i]);
    d.mu_m[i] = sol.z(r_cap_lo[i]);
    d.rho_p[i] = sol.z(r_a_hi[i]);
    d.rho_m[i] = sol.z(r_a_lo[i]);
    d.kap_p[i] = sol.z(r_u_hi[i]);
    d.kap_m[i] = sol.z(r_u_lo[i]);
    d.ups_p[i] = sol.z(r_rmp_hi[i]);
    d.ups_m[i] = sol.z(r_rmp_lo[i]);
    d.P[i] = sol.x(iP + i);
    d.alpha[i] = sol.x(ia + i);
    d.u[i] = sol.x(iu + i);
  }
  return d;
}

}  // namespace detail

struct HourlyPricingTrace {
  std::vector<HourlyDuals> hours;
};

// aCHP: hourly convex relaxation with the start-up cost distributed over the
// committed unit's online hours; ES quantities fixed from dispatch.
inline PriceSeries achp_prices(const SystemCase& c,
                               const ChanceMargins& margins,
                               const DecisionSchedule& sched,
                               const StartupAllocation& alloc,
                               HourlyPricingTrace* trace = nullptr,
                               const QpOptions& qp_opt = {}) {
  const int T = c.params.T;
  const int nG = static_cast<int>(c.sgs.size());
  AggregateError agg = aggregate_errors(c);
  PriceSeries out;
  out.scheme = Scheme::ACHP;
  out.allocation_rule = to_string(alloc.rule);
  out.lambda.assign(c.network.buses.size(), std::vector<double>(T, 0.0));
  out.gamma.assign(T, 0.0);
  out.chi.assign(T, 0.0);
  std::vector<double> p_prev(nG);
  for (int i = 0; i < nG; ++i) p_prev[i] = c.sgs[i].p0;
  for (int t = 0; t < T; ++t) {
    std::vector<double> u_cost(nG), b_eff(nG);
    for (int i = 0; i < nG; ++i) {
      u_cost[i] = c.sgs[i].c + alloc.s_tilde[i][t];
      b_eff[i] = c.sgs[i].b;
    }
    HourlyDuals d = detail::solve_hourly_pricing(c, margins, agg, sched, t,
                                                 p_prev, u_cost, b_eff,
                                                 qp_opt);
    for (size_t b = 0; b < c.network.buses.size(); ++b)
      out.lambda[b][t] = d.lambda[b];
    out.gamma[t] = d.gamma;
    out.chi[t] = d.chi;
    p_prev = d.P;  // chain the preceding interval's pricing solution
    if (trace) trace->hours.push_back(std::move(d));
  }
  return out;
}

// Average incremental cost coefficient per online interval (Eq.-22 style):
// non-load and start-up costs spread over dispatched energy.
struct AipCoefficients {
  std::vector<std::vector<double>> b_hat;   // [sg][t]
  std::vector<std::vector<double>> u_cost;  // [sg][t] fallback u coefficient
  std::vector<std::string> flagged;         // units with zero-energy intervals
};

inline AipCoefficients aip_coefficients(const SystemCase& c,
                                        const DecisionSchedule& sched) {
  const int T = c.params.T;
  AipCoefficients out;
  out.b_hat.assign(c.sgs.size(), std::vector<double>(T, 0.0));
  out.u_cost.assign(c.sgs.size(), std::vector<double>(T, 0.0));
  for (size_t i = 0; i < c.sgs.size(); ++i) {
    const auto& g = c.sgs[i];
    for (int t = 0; t < T; ++t) out.b_hat[i][t] = g.b;
    for (const auto& iv : online_intervals(sched.u[i], g.u0)) {
      const int len = iv.t_off - iv.t_on;
      double energy = 0.0;
      for (int t = iv.t_on; t < iv.t_off; ++t) energy += sched.P[i][t];
      const double fixed = g.c * len + (iv.startup ? g.s : 0.0);
      if (energy > 1e-9) {
        for (int t = iv.t_on; t < iv.t_off; ++t)
          out.b_hat[i][t] = g.b + fixed / energy;
      } else {
        // Zero dispatched energy: average coefficient undefined; price the
        // unit at b and keep the fixed cost on the commitment variable.
        out.flagged.push_back(g.id);
        for (int t = iv.t_on; t < iv.t_off; ++t)
          out.u_cost[i][t] = fixed / len;
      }
    }
  }
  return out;
}

inline PriceSeries aip_prices(const SystemCase& c, const ChanceMargins& margins,
                              const DecisionSchedule& sched,
                              HourlyPricingTrace* trace = nullptr,
                              const QpOptions& qp_opt = {}) {
  const int T = c.params.T;
  const int nG = static_cast<int>(c.sgs.size());
  AggregateError agg = aggregate_errors(c);
  AipCoefficients coef = aip_coefficients(c, sched);
  PriceSeries out;
  out.scheme = Scheme::AIP;
  out.lambda.assign(c.network.buses.size(), std::vector<double>(T, 0.0));
  out.gamma.assign(T, 0.0);
  out.chi.assign(T, 0.0);
  for (const auto& id : coef.flagged)
    out.notes.push_back("zero-energy online interval for unit " + id +
                        "; fixed costs kept on the commitment variable");
  std::vector<double> p_prev(nG);
  for (int i = 0; i < nG; ++i) p_prev[i] = c.sgs[i].p0;
  for (int t = 0; t < T; ++t) {
    std::vector<double> u_cost(nG), b_eff(nG);
    for (int i = 0; i < nG; ++i) {
      u_cost[i] = coef.u_cost[i][t];
      b_eff[i] = coef.b_hat[i][t];
    }
    HourlyDuals d = detail::solve_hourly_pricing(c, margins, agg, sched, t,
                                                 p_prev, u_cost, b_eff,
                                                 qp_opt);
    for (size_t b = 0; b < c.network.buses.size(); ++b)
      out.lambda[b][t] = d.lambda[b];
    out.gamma[t] = d.gamma;
    out.chi[t] = d.chi;
    p_prev = d.P;
    if (trace) trace->hours.push_back(std::move(d));
  }
  return out;
}

}  // namespace iuc

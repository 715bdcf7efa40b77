#pragma once

// Artifact emission: solution dumps, price/settlement/metrics CSVs, and the
// run manifest with content hashes.  All output is byte-deterministic for a
// given input (fixed float formatting, ordered containers only).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "iuc/sfr.hpp"

namespace iuc {

inline std::string fmt(double x) {
  if (x == 0.0) x = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

// FNV-1a 64-bit content hash (stable across platforms).
inline std::string content_hash(const std::string& data) {
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", h);
  return buf;
}

inline void write_file(const std::string& path, const std::string& data) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << data;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string s((std::istreambuf_iterator<char>(in)),
                std::istreambuf_iterator<char>());
  return s;
}

// Solution dump: schedule + duals + census + solver stats.
inline json solution_to_json(const SystemCase& c, const DecisionSchedule& s,
                             const DualRecord* d,
                             const std::map<std::string, int>& census) {
  json j;
  json js;
  js["objective"] = s.objective;
  js["optimal"] = s.optimal;
  auto arr2 = [](const auto& m) {
    json a = json::array();
    for (const auto& row : m) a.push_back(row);
    return a;
  };
  js["u"] = arr2(s.u);
  js["v"] = arr2(s.v);
  js["w"] = arr2(s.w);
  js["P"] = arr2(s.P);
  js["alpha"] = arr2(s.alpha);
  js["Pd"] = arr2(s.Pd);
  js["Pc"] = arr2(s.Pc);
  js["alpha_d"] = arr2(s.ad);
  js["alpha_c"] = arr2(s.ac);
  js["He"] = arr2(s.He);
  js["e"] = arr2(s.e);
  js["theta"] = arr2(s.theta);
  j["schedule"] = js;
  if (d) {
    json jd;
    jd["lambda"] = arr2(d->lambda);
    jd["gamma"] = d->gamma;
    jd["chi"] = d->chi;
    jd["mu_plus"] = arr2(d->mu_plus);
    jd["mu_minus"] = arr2(d->mu_minus);
    jd["upsilon_plus"] = arr2(d->upsilon_plus);
    jd["upsilon_minus"] = arr2(d->upsilon_minus);
    jd["rho_plus"] = arr2(d->rho_plus);
    jd["rho_minus"] = arr2(d->rho_minus);
    jd["kappa"] = arr2(d->kappa);
    j["duals"] = jd;
  }
  j["census"] = census;
  j["gap"] = s.gap;
  j["node_count"] = s.node_count;
  j["sg_ids"] = json::array();
  for (const auto& g : c.sgs) j["sg_ids"].push_back(g.id);
  return j;
}

inline std::string prices_to_csv(const SystemCase& c, const PriceSeries& p) {
  std::string out = "hour,bus,lambda\n";
  for (int t = 0; t < c.params.T; ++t)
    for (size_t b = 0; b < c.network.buses.size(); ++b)
      out += std::to_string(t) + "," + c.network.buses[b] + "," +
             fmt(p.lambda[b][t]) + "\n";
  return out;
}

inline std::string system_prices_to_csv(const SystemCase& c,
                                        const PriceSeries& p) {
  std::string out = "hour,gamma,chi\n";
  for (int t = 0; t < c.params.T; ++t)
    out += std::to_string(t) + "," + fmt(p.gamma[t]) + "," + fmt(p.chi[t]) +
           "\n";
  return out;
}

inline json prices_metadata(const PriceSeries& p, double dual_tol) {
  json j;
  j["scheme"] = to_string(p.scheme);
  if (!p.allocation_rule.empty()) j["allocation_rule"] = p.allocation_rule;
  j["dual_tolerance"] = dual_tol;
  j["notes"] = p.notes;
  return j;
}

inline std::string settlement_to_csv(const SettlementReport& r) {
  std::string out =
      "unit,kind,cost,energy_revenue,reserve_revenue,inertia_revenue,uplift,"
      "opportunity,profit\n";
  for (const auto& u : r.units)
    out += u.id + "," + u.kind + "," + fmt(u.cost) + "," +
           fmt(u.energy_revenue) + "," + fmt(u.reserve_revenue) + "," +
           fmt(u.inertia_revenue) + "," + fmt(u.uplift) + "," +
           fmt(u.opportunity) + "," + fmt(u.profit) + "\n";
  return out;
}

inline json settlement_summary(const SettlementReport& r) {
  json j;
  j["scheme"] = to_string(r.scheme);
  j["total_uplift"] = r.total_uplift;
  j["consumer_payment"] = r.consumer_payment;
  j["res_double_payment_flag"] = r.res_double_payment;
  return j;
}

inline std::string trajectory_to_csv(const FrequencyTrajectory& t) {
  std::string out = "t,delta_f\n";
  for (size_t k = 0; k < t.time.size(); ++k)
    out += fmt(t.time[k]) + "," + fmt(t.delta_f[k]) + "\n";
  return out;
}

inline std::string metrics_to_csv(const std::vector<FrequencyMetricsRow>& m) {
  std::string out = "scenario,hour,E,rocof,nadir\n";
  for (const auto& r : m)
    out += r.scenario + "," + std::to_string(r.hour) + "," + fmt(r.E) + "," +
           fmt(r.rocof) + "," + fmt(r.nadir) + "\n";
  return out;
}

inline std::string comparison_to_csv(const SchemeComparison& cmp) {
  std::string out =
      "scheme,total_uplift,consumer_payment,sg_profit,es_profit,res_profit\n";
  for (const auto& r : cmp.rows)
    out += std::string(to_string(r.scheme)) + "," + fmt(r.total_uplift) + "," +
           fmt(r.consumer_payment) + "," + fmt(r.sg_profit) + "," +
           fmt(r.es_profit) + "," + fmt(r.res_profit) + "\n";
  return out;
}

inline std::string chance_check_to_csv(const ChanceCheckResult& r) {
  std::string out = "family,worst_rate,target,below_target\n";
  for (const auto& [name, f] : r.families)
    out += name + "," + fmt(f.worst_rate) + "," + fmt(f.target) + "," +
           (f.below_target ? "1" : "0") + "\n";
  return out;
}

}  // namespace iuc

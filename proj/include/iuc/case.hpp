#pragma once

// Test-system description: network, synchronous generators, storage,
// renewable units, load series, and system-wide parameters.  Cases are
// stored as JSON (see docs/case-format.md) and immutable after load.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace iuc {

using json = nlohmann::json;

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Invariant violation; `field` carries a path like "sgs[2].Pmin".
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct SystemParams {
  double f0 = 60.0;          // nominal frequency [Hz]
  double fmax_prime = 0.5;   // max admissible RoCoF [Hz/s]
  double dfmax = 0.55;       // max admissible frequency deviation [Hz]
  double Hmin = 3.5;         // minimum equivalent inertia requirement [s]
  double Psys = 0.0;         // base power for the inertia requirement [MW]
  int T = 24;                // number of hourly periods
  double mva_base = 100.0;   // MVA base for line susceptances
  // Optional system-wide aggregate error override (Table-II style single
  // values).  When present these replace the per-unit aggregation.
  std::optional<double> agg_err_mean;
  std::optional<double> agg_err_std;
};

struct Line {
  std::string from, to;
  double B = 0.0;     // susceptance [pu]
  double Fmax = 0.0;  // thermal limit [MW]
};

struct Network {
  std::vector<std::string> buses;
  std::vector<Line> lines;
  std::string slack_bus;

  int bus_index(const std::string& id) const {
    auto it = std::find(buses.begin(), buses.end(), id);
    if (it == buses.end())
      throw ValidationError("network.buses", "unknown bus id '" + id + "'");
    return static_cast<int>(it - buses.begin());
  }
};

struct SgUnit {
  std::string id;
  std::string bus;
  double a = 0.0, b = 0.0, c = 0.0;  // quadratic/linear/no-load cost
  double s = 0.0;                    // start-up cost [$]
  double Pmin = 0.0, Pmax = 0.0;     // [MW]
  double RU = 0.0, RD = 0.0;         // ramp limits [MW/h]
  int TU = 1, TD = 1;                // min up/down [h]
  double Hg = 0.0;                   // inertia constant [s]
  double eps_g = 0.05;               // chance level
  int u0 = 0;                        // initial status
  double p0 = 0.0;                   // initial output [MW]
};

struct EsUnit {
  std::string id;
  std::string bus;
  double Pe_max = 0.0;  // discharge limit [MW]
  double Pc_max = 0.0;  // charge limit [MW]
  double Emin = 0.0, Emax = 0.0;  // [MWh]
  double k = 1.0;       // one-way efficiency
  double He_max = 0.0;  // max inertia constant [s]
  double e0 = 0.0;      // initial energy [MWh]
  double eps_d = 0.05, eps_c = 0.05;
};

enum class ResKind { PV, WT };

struct ResUnit {
  std::string id;
  std::string bus;
  ResKind kind = ResKind::PV;
  double Pmax = 0.0;  // rated capacity [MW]
  std::vector<double> forecast;          // P_{t} [MW]
  std::vector<double> err_mean;          // m_t [MW]
  std::vector<double> err_std;           // sigma_t [MW]
  std::vector<double> inertia_forecast;  // H_t [s]
  std::vector<double> inertia_err_mean;  // m_h,t [s]
  std::vector<double> inertia_err_std;   // sigma_h,t [s]
  double eps_h = 0.05;
  std::vector<double> mppt;  // maximum available power [MW]
};

struct SystemCase {
  SystemParams params;
  Network network;
  std::vector<SgUnit> sgs;
  std::vector<EsUnit> ess;
  std::vector<ResUnit> ress;
  // load[bus id] -> per-hour demand [MW]
  std::map<std::string, std::vector<double>> load;

  double total_demand(int t) const {
    double d = 0.0;
    for (const auto& [bus, series] : load) d += series[t];
    return d;
  }
};

namespace detail {

inline void check(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ValidationError(field, msg);
}

inline void check_series(const std::vector<double>& v, int T,
                         const std::string& field) {
  check(static_cast<int>(v.size()) == T, field,
        "series length " + std::to_string(v.size()) + " != T=" +
            std::to_string(T));
  for (double x : v)
    check(std::isfinite(x), field, "non-finite entry");
}

}  // namespace detail

inline void validate(const SystemCase& c) {
  using detail::check;
  const auto& p = c.params;
  check(p.f0 > 0, "params.f0", "must be > 0");
  check(p.fmax_prime > 0, "params.fmax_prime", "must be > 0");
  check(p.dfmax > 0, "params.dfmax", "must be > 0");
  check(p.Hmin > 0, "params.Hmin", "must be > 0");
  check(p.Psys > 0, "params.Psys", "must be > 0");
  check(p.T >= 1, "params.T", "must be >= 1");
  check(p.mva_base > 0, "params.mva_base", "must be > 0");

  const auto& n = c.network;
  check(!n.buses.empty(), "network.buses", "at least one bus required");
  std::set<std::string> bus_set(n.buses.begin(), n.buses.end());
  check(bus_set.size() == n.buses.size(), "network.buses", "duplicate bus id");
  check(bus_set.count(n.slack_bus) == 1, "network.slack_bus",
        "slack bus not declared");
  for (size_t l = 0; l < n.lines.size(); ++l) {
    const auto f = "network.lines[" + std::to_string(l) + "]";
    check(bus_set.count(n.lines[l].from) == 1, f + ".from", "unknown bus");
    check(bus_set.count(n.lines[l].to) == 1, f + ".to", "unknown bus");
    check(n.lines[l].B > 0, f + ".B", "must be > 0");
    check(n.lines[l].Fmax > 0, f + ".Fmax", "must be > 0");
  }
  // Connectivity (BFS over lines).
  if (n.buses.size() > 1) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& l : n.lines) {
      adj[l.from].push_back(l.to);
      adj[l.to].push_back(l.from);
    }
    std::set<std::string> seen{n.buses.front()};
    std::queue<std::string> q;
    q.push(n.buses.front());
    while (!q.empty()) {
      auto b = q.front();
      q.pop();
      for (const auto& nb : adj[b])
        if (seen.insert(nb).second) q.push(nb);
    }
    check(seen.size() == n.buses.size(), "network.lines",
          "graph is not connected");
  }

  for (size_t i = 0; i < c.sgs.size(); ++i) {
    const auto& g = c.sgs[i];
    const auto f = "sgs[" + std::to_string(i) + "]";
    check(bus_set.count(g.bus) == 1, f + ".bus", "unknown bus");
    check(g.Pmin >= 0 && g.Pmin <= g.Pmax, f + ".Pmin",
          "requires 0 <= Pmin <= Pmax (unit " + g.id + ")");
    check(g.a >= 0, f + ".a", "must be >= 0");
    check(g.TU >= 1 && g.TD >= 1, f + ".TU", "min up/down must be >= 1");
    check(g.eps_g > 0 && g.eps_g < 0.5, f + ".eps_g", "must be in (0, 0.5)");
    check(g.Hg >= 0, f + ".Hg", "must be >= 0");
    check(g.RU > 0 && g.RD > 0, f + ".RU", "ramp limits must be > 0");
    check(g.u0 == 0 || g.u0 == 1, f + ".u0", "must be 0 or 1");
  }
  for (size_t i = 0; i < c.ess.size(); ++i) {
    const auto& e = c.ess[i];
    const auto f = "ess[" + std::to_string(i) + "]";
    check(bus_set.count(e.bus) == 1, f + ".bus", "unknown bus");
    check(e.Emin >= 0 && e.Emin <= e.e0 && e.e0 <= e.Emax, f + ".e0",
          "requires 0 <= Emin <= e0 <= Emax (unit " + e.id + ")");
    check(e.k > 0 && e.k <= 1, f + ".k", "must be in (0, 1]");
    check(e.He_max >= 0, f + ".He_max", "must be >= 0");
    check(e.Pe_max >= 0 && e.Pc_max >= 0, f + ".Pe_max", "must be >= 0");
    check(e.eps_d > 0 && e.eps_d < 0.5, f + ".eps_d", "must be in (0, 0.5)");
    check(e.eps_c > 0 && e.eps_c < 0.5, f + ".eps_c", "must be in (0, 0.5)");
  }
  for (size_t i = 0; i < c.ress.size(); ++i) {
    const auto& r = c.ress[i];
    const auto f = "ress[" + std::to_string(i) + "]";
    check(bus_set.count(r.bus) == 1, f + ".bus", "unknown bus");
    check(r.Pmax > 0, f + ".Pmax", "must be > 0");
    detail::check_series(r.forecast, p.T, f + ".forecast");
    detail::check_series(r.err_mean, p.T, f + ".err_mean");
    detail::check_series(r.err_std, p.T, f + ".err_std");
    detail::check_series(r.inertia_forecast, p.T, f + ".inertia_forecast");
    detail::check_series(r.inertia_err_mean, p.T, f + ".inertia_err_mean");
    detail::check_series(r.inertia_err_std, p.T, f + ".inertia_err_std");
    detail::check_series(r.mppt, p.T, f + ".mppt");
    check(r.eps_h > 0 && r.eps_h < 0.5, f + ".eps_h", "must be in (0, 0.5)");
    for (int t = 0; t < p.T; ++t) {
      check(r.forecast[t] >= 0 && r.forecast[t] <= r.mppt[t] + 1e-9,
            f + ".forecast", "requires 0 <= forecast <= mppt at hour " +
                std::to_string(t) + " (unit " + r.id + ")");
      check(r.mppt[t] <= r.Pmax + 1e-9, f + ".mppt",
            "exceeds rated capacity at hour " + std::to_string(t));
      check(r.err_std[t] >= 0, f + ".err_std", "must be >= 0");
      check(r.inertia_err_std[t] >= 0, f + ".inertia_err_std", "must be >= 0");
    }
  }
  for (const auto& [bus, series] : c.load) {
    check(bus_set.count(bus) == 1, "load." + bus, "unknown bus");
    detail::check_series(series, p.T, "load." + bus);
  }
}

// ---------------------------------------------------------------------------
// JSON (de)serialization.  schema_version 1.

inline constexpr int kCaseSchemaVersion = 1;

namespace detail {

template <typename T>
T get(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key)) throw ParseError(ctx + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(ctx + "." + key + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T def) {
  return j.contains(key) ? j.at(key).get<T>() : def;
}

}  // namespace detail

inline SystemCase case_from_json(const json& j) {
  using detail::get;
  using detail::get_or;
  SystemCase c;
  int ver = get_or<int>(j, "schema_version", kCaseSchemaVersion);
  if (ver != kCaseSchemaVersion)
    throw ParseError("unsupported schema_version " + std::to_string(ver));

  const json& jp = j.contains("params") ? j.at("params") : json::object();
  c.params.f0 = get_or<double>(jp, "f0", 60.0);
  c.params.fmax_prime = get_or<double>(jp, "fmax_prime", 0.5);
  c.params.dfmax = get_or<double>(jp, "dfmax", 0.55);
  c.params.Hmin = get<double>(jp, "Hmin", "params");
  c.params.Psys = get<double>(jp, "Psys", "params");
  c.params.T = get<int>(jp, "T", "params");
  c.params.mva_base = get_or<double>(jp, "mva_base", 100.0);
  if (jp.contains("agg_err_mean"))
    c.params.agg_err_mean = jp.at("agg_err_mean").get<double>();
  if (jp.contains("agg_err_std"))
    c.params.agg_err_std = jp.at("agg_err_std").get<double>();

  const json& jn = j.contains("network") ? j.at("network") : json::object();
  c.network.buses = get<std::vector<std::string>>(jn, "buses", "network");
  c.network.slack_bus = get<std::string>(jn, "slack_bus", "network");
  for (const auto& jl : get_or<json>(jn, "lines", json::array())) {
    Line l;
    l.from = get<std::string>(jl, "from", "line");
    l.to = get<std::string>(jl, "to", "line");
    l.B = get<double>(jl, "B", "line");
    l.Fmax = get<double>(jl, "Fmax", "line");
    c.network.lines.push_back(std::move(l));
  }

  for (const auto& jg : get_or<json>(j, "sgs", json::array())) {
    SgUnit g;
    g.id = get<std::string>(jg, "id", "sg");
    g.bus = get<std::string>(jg, "bus", "sg " + g.id);
    g.a = get<double>(jg, "a", "sg " + g.id);
    g.b = get<double>(jg, "b", "sg " + g.id);
    g.c = get<double>(jg, "c", "sg " + g.id);
    g.s = get<double>(jg, "s", "sg " + g.id);
    g.Pmin = get<double>(jg, "Pmin", "sg " + g.id);
    g.Pmax = get<double>(jg, "Pmax", "sg " + g.id);
    g.RU = get<double>(jg, "RU", "sg " + g.id);
    g.RD = get<double>(jg, "RD", "sg " + g.id);
    g.TU = get<int>(jg, "TU", "sg " + g.id);
    g.TD = get<int>(jg, "TD", "sg " + g.id);
    g.Hg = get<double>(jg, "Hg", "sg " + g.id);
    g.eps_g = get_or<double>(jg, "eps_g", 0.05);
    g.u0 = get_or<int>(jg, "u0", 0);
    g.p0 = get_or<double>(jg, "p0", 0.0);
    c.sgs.push_back(std::move(g));
  }
  for (const auto& je : get_or<json>(j, "ess", json::array())) {
    EsUnit e;
    e.id = get<std::string>(je, "id", "es");
    e.bus = get<std::string>(je, "bus", "es " + e.id);
    e.Pe_max = get<double>(je, "Pe_max", "es " + e.id);
    e.Pc_max = get<double>(je, "Pc_max", "es " + e.id);
    e.Emin = get<double>(je, "Emin", "es " + e.id);
    e.Emax = get<double>(je, "Emax", "es " + e.id);
    e.k = get<double>(je, "k", "es " + e.id);
    e.He_max = get<double>(je, "He_max", "es " + e.id);
    e.e0 = get<double>(je, "e0", "es " + e.id);
    e.eps_d = get_or<double>(je, "eps_d", 0.05);
    e.eps_c = get_or<double>(je, "eps_c", 0.05);
    c.ess.push_back(std::move(e));
  }
  for (const auto& jr : get_or<json>(j, "ress", json::array())) {
    ResUnit r;
    r.id = get<std::string>(jr, "id", "res");
    r.bus = get<std::string>(jr, "bus", "res " + r.id);
    std::string kind = get<std::string>(jr, "kind", "res " + r.id);
    if (kind == "PV")
      r.kind = ResKind::PV;
    else if (kind == "WT")
      r.kind = ResKind::WT;
    else
      throw ParseError("res " + r.id + ": kind must be PV or WT");
    r.Pmax = get<double>(jr, "Pmax", "res " + r.id);
    r.forecast = get<std::vector<double>>(jr, "forecast", "res " + r.id);
    r.err_mean = get<std::vector<double>>(jr, "err_mean", "res " + r.id);
    r.err_std = get<std::vector<double>>(jr, "err_std", "res " + r.id);
    r.inertia_forecast =
        get<std::vector<double>>(jr, "inertia_forecast", "res " + r.id);
    r.inertia_err_mean =
        get<std::vector<double>>(jr, "inertia_err_mean", "res " + r.id);
    r.inertia_err_std =
        get<std::vector<double>>(jr, "inertia_err_std", "res " + r.id);
    r.eps_h = get_or<double>(jr, "eps_h", 0.05);
    r.mppt = get<std::vector<double>>(jr, "mppt", "res " + r.id);
    c.ress.push_back(std::move(r));
  }
  if (j.contains("load"))
    for (const auto& [bus, series] : j.at("load").items())
      c.load[bus] = series.get<std::vector<double>>();
  return c;
}

inline json case_to_json(const SystemCase& c) {
  json j;
  j["schema_version"] = kCaseSchemaVersion;
  json jp;
  jp["f0"] = c.params.f0;
  jp["fmax_prime"] = c.params.fmax_prime;
  jp["dfmax"] = c.params.dfmax;
  jp["Hmin"] = c.params.Hmin;
  jp["Psys"] = c.params.Psys;
  jp["T"] = c.params.T;
  jp["mva_base"] = c.params.mva_base;
  if (c.params.agg_err_mean) jp["agg_err_mean"] = *c.params.agg_err_mean;
  if (c.params.agg_err_std) jp["agg_err_std"] = *c.params.agg_err_std;
  j["params"] = jp;

  json jn;
  jn["buses"] = c.network.buses;
  jn["slack_bus"] = c.network.slack_bus;
  jn["lines"] = json::array();
  for (const auto& l : c.network.lines)
    jn["lines"].push_back(
        {{"from", l.from}, {"to", l.to}, {"B", l.B}, {"Fmax", l.Fmax}});
  j["network"] = jn;

  j["sgs"] = json::array();
  for (const auto& g : c.sgs)
    j["sgs"].push_back({{"id", g.id}, {"bus", g.bus}, {"a", g.a}, {"b", g.b},
                        {"c", g.c}, {"s", g.s}, {"Pmin", g.Pmin},
                        {"Pmax", g.Pmax}, {"RU", g.RU}, {"RD", g.RD},
                        {"TU", g.TU}, {"TD", g.TD}, {"Hg", g.Hg},
                        {"eps_g", g.eps_g}, {"u0", g.u0}, {"p0", g.p0}});
  j["ess"] = json::array();
  for (const auto& e : c.ess)
    j["ess"].push_back({{"id", e.id}, {"bus", e.bus}, {"Pe_max", e.Pe_max},
                        {"Pc_max", e.Pc_max}, {"Emin", e.Emin},
                        {"Emax", e.Emax}, {"k", e.k}, {"He_max", e.He_max},
                        {"e0", e.e0}, {"eps_d", e.eps_d}, {"eps_c", e.eps_c}});
  j["ress"] = json::array();
  for (const auto& r : c.ress)
    j["ress"].push_back(
        {{"id", r.id}, {"bus", r.bus},
         {"kind", r.kind == ResKind::PV ? "PV" : "WT"}, {"Pmax", r.Pmax},
         {"forecast", r.forecast}, {"err_mean", r.err_mean},
         {"err_std", r.err_std}, {"inertia_forecast", r.inertia_forecast},
         {"inertia_err_mean", r.inertia_err_mean},
         {"inertia_err_std", r.inertia_err_std}, {"eps_h", r.eps_h},
         {"mppt", r.mppt}});
  json jl = json::object();
  for (const auto& [bus, series] : c.load) jl[bus] = series;
  j["load"] = jl;
  return j;
}

inline SystemCase load_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open case file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  SystemCase c = case_from_json(j);
  validate(c);
  return c;
}

inline void save_case(const SystemCase& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write case file: " + path);
  out << case_to_json(c).dump(2) << "\n";
}

// Scales every RES unit's forecast, mppt, and error parameters by one
// system-wide factor so that total RES forecast energy equals eta times
// total demand.  Network, SG, ES, and load data are untouched.
inline SystemCase scale_penetration(const SystemCase& c, double eta) {
  if (eta < 0 || eta >= 1)
    throw ValidationError("eta", "must be in [0, 1)");
  double demand = 0.0;
  for (int t = 0; t < c.params.T; ++t) demand += c.total_demand(t);
  if (demand <= 0) throw ValidationError("load", "total demand must be > 0");

  double res_energy = 0.0, mppt_energy = 0.0;
  for (const auto& r : c.ress)
    for (int t = 0; t < c.params.T; ++t) {
      res_energy += r.forecast[t];
      mppt_energy += r.mppt[t];
    }
  SystemCase out = c;
  if (eta == 0.0) {
    for (auto& r : out.ress)
      for (int t = 0; t < c.params.T; ++t) {
        r.forecast[t] = 0.0;
        r.mppt[t] = 0.0;
        r.err_mean[t] = 0.0;
        r.err_std[t] = 0.0;
      }
    return out;
  }
  if (res_energy <= 0)
    throw ValidationError("ress", "no RES forecast energy to scale");
  const double target = eta * demand;
  const double factor = target / res_energy;
  if (std::abs(factor - 1.0) < 1e-12) return out;  // exact fixed point
  // mppt must stay within rated capacity after scaling.
  for (const auto& r : c.ress)
    for (int t = 0; t < c.params.T; ++t)
      if (r.mppt[t] * factor > r.Pmax * (1 + 1e-9))
        throw ValidationError(
            "ress", "infeasible scaling: eta=" + std::to_string(eta) +
                        " pushes mppt of unit " + r.id + " above Pmax");
  for (auto& r : out.ress)
    for (int t = 0; t < c.params.T; ++t) {
      r.forecast[t] *= factor;
      r.mppt[t] *= factor;
      r.err_mean[t] *= factor;
      r.err_std[t] *= factor;
    }
  return out;
}

inline bool operator==(const SystemCase& a, const SystemCase& b) {
  return case_to_json(a) == case_to_json(b);
}

}  // namespace iuc

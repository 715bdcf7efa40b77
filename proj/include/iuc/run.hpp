#pragma once

// Scenario-matrix orchestration: build, solve, price, settle, check, and
// simulate each (penetration, scenario) cell, emitting reproducible
// artifacts plus a hashed manifest.

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "iuc/io.hpp"

namespace iuc {

inline constexpr int kManifestSchemaVersion = 1;

struct ScenarioSpec {
  std::string case_path;
  std::vector<double> etas;          // empty: run the case as-is
  std::vector<std::string> scenarios;  // subset of {base,rmr,mp,achp,aip}
  double gap = 1e-4;
  long max_nodes = 200000;
  AllocationRule allocation = AllocationRule::Uniform;
  std::string out_dir = "out";
  unsigned seed = 1234;
  int mc_samples = 100000;
  SfrParams sfr;
};

inline void validate(const ScenarioSpec& s) {
  static const std::set<std::string> known{"base", "rmr", "mp", "achp", "aip"};
  if (s.scenarios.empty())
    throw std::invalid_argument("scenario set must be nonempty");
  for (const auto& sc : s.scenarios)
    if (!known.count(sc))
      throw std::invalid_argument("unknown scenario '" + sc + "'");
  for (double eta : s.etas)
    if (eta < 0 || eta >= 1)
      throw std::invalid_argument("eta values must be in [0, 1)");
}

namespace detail {

struct CellArtifacts {
  json manifest_entry = json::object();
};

inline std::string eta_tag(double eta) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "eta%03d", int(std::lround(eta * 100)));
  return buf;
}

inline std::pair<int, int> extreme_inertia_hours(const SystemCase& c,
                                                 const ChanceMargins& m,
                                                 const DecisionSchedule& s) {
  int tmin = 0, tmax = 0;
  double emin = 1e300, emax = -1e300;
  for (int t = 0; t < c.params.T; ++t) {
    double e = inertia_supply(c, m, s, t);
    if (e < emin) emin = e, tmin = t;
    if (e > emax) emax = e, tmax = t;
  }
  return {tmin, tmax};
}

}  // namespace detail

// Runs the full matrix; returns the manifest (also written to
// <out>/manifest.json).  Stage failures are recorded per cell and the
// remaining cells continue.
inline json run(const ScenarioSpec& spec) {
  validate(spec);
  SystemCase base_case = load_case(spec.case_path);

  json manifest;
  manifest["schema_version"] = kManifestSchemaVersion;
  manifest["case"] = spec.case_path;
  manifest["cells"] = json::array();

  std::vector<double> etas = spec.etas;
  if (etas.empty()) etas.push_back(-1.0);  // sentinel: unscaled

  for (double eta : etas) {
    SystemCase c = eta < 0 ? base_case : scale_penetration(base_case, eta);
    AggregateError agg = aggregate_errors(c);
    ChanceMargins margins = compute_margins(c, agg);
    SolveOptions sopt;
    sopt.rel_gap = spec.gap;
    sopt.max_nodes = spec.max_nodes;

    // Shared solves within one eta cell group.
    std::optional<DecisionSchedule> base_sched, aware_sched;
    std::optional<DualRecord> aware_duals;

    auto solve_base = [&]() -> DecisionSchedule& {
      if (!base_sched) {
        ModelOptions mo;
        mo.inertia_constraint = false;
        UcModel m(c, margins, mo);
        base_sched = solve_ccuc(m, sopt);
      }
      return *base_sched;
    };
    auto solve_aware = [&]() -> DecisionSchedule& {
      if (!aware_sched) {
        UcModel m(c, margins);
        aware_sched = solve_ccuc(m, sopt);
        auto [s2, d] = solve_fixed_qp(m, aware_sched->u, sopt.qp);
        aware_duals = d;
        s2.gap = aware_sched->gap;
        s2.node_count = aware_sched->node_count;
        s2.optimal = aware_sched->optimal;
        aware_sched = s2;
      }
      return *aware_sched;
    };

    for (const auto& scen : spec.scenarios) {
      const std::string tag = eta < 0 ? "asis" : detail::eta_tag(eta);
      const std::string dir = spec.out_dir + "/" + tag + "/" + scen;
      json cell;
      cell["eta"] = eta < 0 ? json(nullptr) : json(eta);
      cell["scenario"] = scen;
      cell["artifacts"] = json::object();
      auto emit = [&](const std::string& name, const std::string& data) {
        const std::string path = dir + "/" + name;
        write_file(path, data);
        cell["artifacts"][name] = content_hash(data);
      };
      try {
        DecisionSchedule sched;
        std::optional<DualRecord> duals;
        PriceSeries prices;
        if (scen == "base") {
          sched = solve_base();
          ModelOptions mo;
          mo.inertia_constraint = false;
          UcModel m(c, margins, mo);
          auto [s2, d] = solve_fixed_qp(m, sched.u, sopt.qp);
          s2.gap = sched.gap;
          s2.node_count = sched.node_count;
          sched = s2;
          duals = d;
          prices = mp_prices(d);
        } else if (scen == "rmr") {
          auto overlay = rmr_select(c, margins, solve_base());
          UcModel m(c, margins);
          auto [s2, d] = solve_fixed_qp(m, overlay, sopt.qp);
          sched = s2;
          duals = d;
          prices = mp_prices(d);
        } else {
          sched = solve_aware();
          duals = aware_duals;
          if (scen == "mp") {
            prices = mp_prices(*aware_duals);
          } else if (scen == "achp") {
            auto alloc = allocate_startup(c, sched, spec.allocation);
            prices = achp_prices(c, margins, sched, alloc, nullptr, sopt.qp);
          } else {
            prices = aip_prices(c, margins, sched, nullptr, sopt.qp);
          }
        }

        SettlementReport rep = settle(c, sched, prices);
        ChanceCheckResult mc =
            monte_carlo_chance_check(c, sched, spec.mc_samples, spec.seed);

        // Inertia adequacy profile (one row per hour).
        std::string inertia_csv = "hour,supply,requirement,deficit\n";
        int deficit_hours = 0;
        const double req = c.params.Psys * c.params.Hmin;
        for (int t = 0; t < c.params.T; ++t) {
          double sup = inertia_supply(c, margins, sched, t);
          bool deficit = sup < req - 1e-6;
          deficit_hours += deficit;
          inertia_csv += std::to_string(t) + "," + fmt(sup) + "," + fmt(req) +
                         "," + (deficit ? "1" : "0") + "\n";
        }
        cell["inertia_deficit_hours"] = deficit_hours;

        auto [tmin, tmax] = detail::extreme_inertia_hours(c, margins, sched);
        double dP = 0.0;
        for (const auto& g : c.sgs) dP = std::max(dP, g.Pmax);
        std::vector<FrequencyMetricsRow> rows;
        for (int t : {tmin, tmax}) {
          double load = c.total_demand(t);
          double dp_eff = std::min(dP, 0.9 * load);
          FrequencyMetricsRow r;
          r.scenario = scen;
          r.hour = t;
          r.E = kinetic_energy(c, margins, sched, t);
          auto traj = simulate_outage(r.E, load, dp_eff, spec.sfr, c.params.f0);
          r.rocof = traj.rocof_initial;
          r.nadir = traj.nadir;
          rows.push_back(r);
        }

        emit("solution.json",
             solution_to_json(c, sched, duals ? &*duals : nullptr, {})
                 .dump(2) + "\n");
        emit("prices_nodal.csv", prices_to_csv(c, prices));
        emit("prices_system.csv", system_prices_to_csv(c, prices));
        emit("prices_meta.json", prices_metadata(prices, 1e-8).dump(2) + "\n");
        emit("settlement.csv", settlement_to_csv(rep));
        emit("settlement.json", settlement_summary(rep).dump(2) + "\n");
        emit("chance.csv", chance_check_to_csv(mc));
        emit("inertia.csv", inertia_csv);
        emit("metrics.csv", metrics_to_csv(rows));
        cell["status"] = "ok";
      } catch (const std::exception& e) {
        cell["status"] = "failed";
        cell["error"] = e.what();
      }
      manifest["cells"].push_back(cell);
    }
  }
  write_file(spec.out_dir + "/manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace iuc

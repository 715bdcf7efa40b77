// Command-line front end: validate | solve | price | settle | simulate |
// run-matrix.  Exit codes: 0 ok, 1 parse/validation error, 2 infeasible,
// 3 tolerance/budget not met.

#include <CLI11.hpp>

#include <iostream>

#include "iuc/run.hpp"

namespace {

using namespace iuc;

struct CommonOpts {
  std::string case_path;
  double gap = 1e-4;
  long max_nodes = 200000;
  bool no_inertia = false;
};

void add_common(CLI::App* app, CommonOpts& o) {
  app->add_option("--case", o.case_path, "case JSON file")
      ->required()
      ->envname("IUC_CASE");
  app->add_option("--gap", o.gap, "relative MIP gap")->envname("IUC_GAP");
  app->add_option("--nodes", o.max_nodes, "branch-and-bound node budget")
      ->envname("IUC_NODES");
  app->add_flag("--no-inertia", o.no_inertia,
                "drop the system inertia constraint");
}

struct Solved {
  SystemCase c;
  ChanceMargins margins;
  UcModel* model = nullptr;  // owned below
  DecisionSchedule sched;
  DualRecord duals;
};

int solve_common(const CommonOpts& o, SystemCase& c, ChanceMargins& margins,
                 DecisionSchedule& sched, DualRecord& duals,
                 std::map<std::string, int>& census) {
  c = load_case(o.case_path);
  AggregateError agg = aggregate_errors(c);
  margins = compute_margins(c, agg);
  ModelOptions mo;
  mo.inertia_constraint = !o.no_inertia;
  UcModel m(c, margins, mo);
  census = m.census();
  SolveOptions sopt;
  sopt.rel_gap = o.gap;
  sopt.max_nodes = o.max_nodes;
  DecisionSchedule s = solve_ccuc(m, sopt);
  auto [s2, d] = solve_fixed_qp(m, s.u, sopt.qp);
  s2.gap = s.gap;
  s2.node_count = s.node_count;
  s2.optimal = s.optimal;
  sched = s2;
  duals = d;
  return sched.optimal ? 0 : 3;
}

void write_or_print(const std::string& out, const std::string& data) {
  if (out.empty() || out == "-")
    std::cout << data;
  else
    write_file(out, data);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inertia-aware chance-constrained unit commitment"};
  app.require_subcommand(1);
  app.set_config("--config", "", "JSON/INI config file; flags override it");

  CommonOpts common;

  // validate
  std::string validate_case;
  auto* sv = app.add_subcommand("validate", "parse and validate a case file");
  sv->add_option("--case", validate_case, "case JSON file")->required();

  // solve
  auto* ss = app.add_subcommand("solve", "solve the unit commitment problem");
  CommonOpts so;
  add_common(ss, so);
  std::string solve_out;
  ss->add_option("--out", solve_out, "output JSON path ('-' for stdout)");

  // price
  auto* sp = app.add_subcommand("price", "solve and compute prices");
  CommonOpts po;
  add_common(sp, po);
  std::string price_scheme = "mp", price_alloc = "uniform", price_out;
  sp->add_option("--scheme", price_scheme, "mp | achp | aip")
      ->check(CLI::IsMember({"mp", "achp", "aip"}));
  sp->add_option("--allocation", price_alloc,
                 "start-up allocation: uniform | first-hour | energy-weighted");
  sp->add_option("--out", price_out, "output directory (default: print CSV)");

  // settle
  auto* st = app.add_subcommand("settle", "solve, price, and settle");
  CommonOpts to;
  add_common(st, to);
  std::string settle_scheme = "mp", settle_alloc = "uniform", settle_out;
  st->add_option("--scheme", settle_scheme, "mp | achp | aip")
      ->check(CLI::IsMember({"mp", "achp", "aip"}));
  st->add_option("--allocation", settle_alloc, "start-up allocation rule");
  st->add_option("--out", settle_out, "output directory (default: print CSV)");

  // simulate
  auto* si = app.add_subcommand("simulate",
                                "frequency response after an outage");
  double sim_E = 0, sim_load = 0, sim_dp = 0, sim_f0 = 60.0;
  SfrParams sfr;
  std::string sim_out;
  si->add_option("--energy", sim_E, "committed kinetic energy [MW*s]")
      ->required();
  si->add_option("--load", sim_load, "system load [MW]")->required();
  si->add_option("--outage", sim_dp, "lost generation [MW]")->required();
  si->add_option("--f0", sim_f0, "nominal frequency [Hz]");
  si->add_option("--dt", sfr.dt, "integration step [s]");
  si->add_option("--horizon", sfr.horizon, "simulation horizon [s]");
  si->add_option("--out", sim_out, "trajectory CSV path ('-' for stdout)");

  // run-matrix
  auto* rm = app.add_subcommand("run-matrix",
                                "full scenario/penetration matrix");
  ScenarioSpec spec;
  spec.scenarios = {"base", "rmr", "mp", "achp", "aip"};
  std::string rm_alloc = "uniform";
  rm->add_option("--case", spec.case_path, "case JSON file")
      ->required()
      ->envname("IUC_CASE");
  rm->add_option("--eta", spec.etas,
                 "penetration levels in [0,1); empty runs the case as-is");
  rm->add_option("--scenarios", spec.scenarios,
                 "subset of base rmr mp achp aip");
  rm->add_option("--gap", spec.gap, "relative MIP gap")->envname("IUC_GAP");
  rm->add_option("--nodes", spec.max_nodes, "node budget")
      ->envname("IUC_NODES");
  rm->add_option("--allocation", rm_alloc, "start-up allocation rule");
  rm->add_option("--out", spec.out_dir, "output directory")
      ->envname("IUC_OUT");
  rm->add_option("--seed", spec.seed, "Monte-Carlo seed")->envname("IUC_SEED");
  rm->add_option("--mc-samples", spec.mc_samples,
                 "Monte-Carlo samples for the chance check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sv->parsed()) {
      SystemCase c = load_case(validate_case);
      std::cout << "ok: " << c.sgs.size() << " sg, " << c.ess.size()
                << " es, " << c.ress.size() << " res, "
                << c.network.buses.size() << " buses, T=" << c.params.T
                << "\n";
      return 0;
    }

    if (ss->parsed()) {
      SystemCase c;
      ChanceMargins m;
      DecisionSchedule s;
      DualRecord d;
      std::map<std::string, int> census;
      int rc = solve_common(so, c, m, s, d, census);
      write_or_print(solve_out,
                     solution_to_json(c, s, &d, census).dump(2) + "\n");
      return rc;
    }

    auto run_pricing = [&](const CommonOpts& o, const std::string& scheme,
                           const std::string& alloc_name, PriceSeries& prices,
                           SystemCase& c, DecisionSchedule& s) -> int {
      ChanceMargins m;
      DualRecord d;
      std::map<std::string, int> census;
      int rc = solve_common(o, c, m, s, d, census);
      if (scheme == "mp") {
        prices = mp_prices(d);
      } else {
        auto rule = allocation_rule_from_string(alloc_name);
        if (!rule) throw ParseError("unknown allocation rule: " + alloc_name);
        if (scheme == "achp") {
          auto alloc = allocate_startup(c, s, *rule);
          prices = achp_prices(c, m, s, alloc);
        } else {
          prices = aip_prices(c, m, s);
        }
      }
      return rc;
    };

    if (sp->parsed()) {
      SystemCase c;
      DecisionSchedule s;
      PriceSeries prices;
      int rc = run_pricing(po, price_scheme, price_alloc, prices, c, s);
      if (price_out.empty()) {
        std::cout << prices_to_csv(c, prices)
                  << system_prices_to_csv(c, prices);
      } else {
        write_file(price_out + "/prices_nodal.csv", prices_to_csv(c, prices));
        write_file(price_out + "/prices_system.csv",
                   system_prices_to_csv(c, prices));
        write_file(price_out + "/prices_meta.json",
                   prices_metadata(prices, 1e-8).dump(2) + "\n");
      }
      return rc;
    }

    if (st->parsed()) {
      SystemCase c;
      DecisionSchedule s;
      PriceSeries prices;
      int rc = run_pricing(to, settle_scheme, settle_alloc, prices, c, s);
      SettlementReport rep = settle(c, s, prices);
      if (settle_out.empty()) {
        std::cout << settlement_to_csv(rep);
      } else {
        write_file(settle_out + "/settlement.csv", settlement_to_csv(rep));
        write_file(settle_out + "/settlement.json",
                   settlement_summary(rep).dump(2) + "\n");
      }
      return rc;
    }

    if (si->parsed()) {
      auto traj = simulate_outage(sim_E, sim_load, sim_dp, sfr, sim_f0);
      std::string csv = trajectory_to_csv(traj);
      write_or_print(sim_out, csv);
      std::cerr << "rocof_initial=" << fmt(traj.rocof_initial)
                << " Hz/s, nadir=" << fmt(traj.nadir) << " Hz at t="
                << fmt(traj.nadir_time) << " s\n";
      return 0;
    }

    if (rm->parsed()) {
      auto rule = allocation_rule_from_string(rm_alloc);
      if (!rule) throw ParseError("unknown allocation rule: " + rm_alloc);
      spec.allocation = *rule;
      json manifest = iuc::run(spec);
      int rc = 0;
      for (const auto& cell : manifest["cells"])
        if (cell["status"] != "ok") rc = 2;
      std::cout << manifest.dump(2) << "\n";
      return rc;
    }
  } catch (const iuc::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const iuc::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const iuc::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

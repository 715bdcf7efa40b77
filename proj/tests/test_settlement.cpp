#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace iuc;

namespace {

struct Solved {
  SystemCase c;
  ChanceMargins m;
  DecisionSchedule s;
  DualRecord d;
};

Solved solve_case(const std::string& file) {
  Solved out;
  out.c = load_case(iuc::testing::data_file(file));
  out.m = compute_margins(out.c, aggregate_errors(out.c));
  UcModel model(out.c, out.m);
  DecisionSchedule s = solve_ccuc(model);
  auto [s2, d] = solve_fixed_qp(model, s.u);
  out.s = s2;
  out.d = d;
  return out;
}

// Linear-cost single unit: cost = P, revenue = lambda * P.
SystemCase linear_unit_case() {
  SystemCase c = iuc::testing::single_sg_case(1, 100.0);
  c.sgs[0].a = 0.0;
  c.sgs[0].b = 1.0;
  c.sgs[0].c = 0.0;
  c.sgs[0].s = 0.0;
  return c;
}

DecisionSchedule unit_schedule(double P) {
  DecisionSchedule s;
  s.u = {{1}};
  s.v = {{0}};
  s.w = {{0}};
  s.P = {{P}};
  s.alpha = {{0.0}};
  return s;
}

PriceSeries flat_prices(int buses, int T, double lambda, double gamma = 0.0,
                        double chi = 0.0) {
  PriceSeries p;
  p.lambda.assign(buses, std::vector<double>(T, lambda));
  p.gamma.assign(T, gamma);
  p.chi.assign(T, chi);
  return p;
}

double total_uplift(const SettlementReport& r) { return r.total_uplift; }

}  // namespace

TEST_CASE("make-whole uplift clamps at zero") {
  SystemCase c = linear_unit_case();
  DecisionSchedule s = unit_schedule(100.0);  // cost = 100
  SECTION("profitable unit gets no uplift") {
    auto rep = settle(c, s, flat_prices(1, 1, 1.2));
    REQUIRE(rep.units.size() == 1);
    CHECK(rep.units[0].cost == Catch::Approx(100.0));
    CHECK(rep.units[0].energy_revenue == Catch::Approx(120.0));
    CHECK(rep.units[0].uplift == 0.0);
    CHECK(rep.units[0].profit == Catch::Approx(20.0));
  }
  SECTION("short unit is made whole to zero profit") {
    auto rep = settle(c, s, flat_prices(1, 1, 0.8));
    CHECK(rep.units[0].uplift == Catch::Approx(20.0));
    CHECK(rep.units[0].profit == Catch::Approx(0.0).margin(1e-12));
    CHECK(rep.total_uplift == Catch::Approx(20.0));
  }
}

TEST_CASE("consumer payment = load energy + reserve + settled inertia") {
  SystemCase c = linear_unit_case();
  DecisionSchedule s = unit_schedule(100.0);
  auto rep = settle(c, s, flat_prices(1, 1, 2.0, 3.0, 0.25));
  // 2*100 load + 3 reserve + 0.25 * Hg(4) * Pmax(100) inertia.
  CHECK(rep.consumer_payment == Catch::Approx(200.0 + 3.0 + 100.0));
}

TEST_CASE("RES opportunity pays curtailment at the nodal price") {
  SystemCase c = iuc::testing::single_sg_case(2);
  ResUnit r;
  r.id = "R1";
  r.bus = "B1";
  r.Pmax = 50.0;
  r.forecast = {10.0, 20.0};
  r.mppt = {15.0, 20.0};  // curtailed by 5 in hour 0 only
  r.err_mean = {0.0, 0.0};
  r.err_std = {0.5, 0.5};
  r.inertia_forecast = {0.4, 0.4};
  r.inertia_err_mean = {0.0, 0.0};
  r.inertia_err_std = {0.01, 0.01};
  c.ress.push_back(r);
  PriceSeries p = flat_prices(1, 2, 0.0);
  p.lambda[0] = {10.0, 20.0};
  SECTION("direct computation") {
    CHECK(res_opportunity(c, c.ress[0], p) == Catch::Approx(50.0));
  }
  SECTION("zero when dispatched at MPPT") {
    SystemCase c2 = c;
    c2.ress[0].forecast = c2.ress[0].mppt;
    CHECK(res_opportunity(c2, c2.ress[0], p) == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("double payment flagged when inertia is also remunerated") {
    DecisionSchedule s = unit_schedule(0.0);
    s.u = {{1, 1}};
    s.v = {{0, 0}};
    s.w = {{0, 0}};
    s.P = {{10.0, 10.0}};
    s.alpha = {{1.0, 1.0}};
    PriceSeries pc = p;
    pc.chi = {0.5, 0.5};
    auto rep = settle(c, s, pc);
    CHECK(rep.res_double_payment);
    PriceSeries p0 = p;  // chi = 0: no overlap
    auto rep0 = settle(c, s, p0);
    CHECK_FALSE(rep0.res_double_payment);
  }
}

TEST_CASE("inertia supply accounting") {
  SystemCase c = iuc::testing::single_sg_case(1);
  c.sgs[0].Hg = 5.0;
  ChanceMargins m = compute_margins(c, aggregate_errors(c));
  DecisionSchedule s = unit_schedule(50.0);
  CHECK(inertia_supply(c, m, s, 0) == Catch::Approx(500.0));
  s.u = {{0}};
  CHECK(inertia_supply(c, m, s, 0) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("RMR overlay") {
  SystemCase c = iuc::testing::single_sg_case(3);
  c.params.Psys = 100.0;
  c.params.Hmin = 2.0;  // requirement 200 MW*s; one unit (400) suffices
  c.sgs[0].id = "G1";
  c.sgs[0].b = 50.0;  // expensive
  SgUnit g2 = c.sgs[0];
  g2.id = "G2";
  g2.a = 0.0;
  g2.b = 5.0;  // cheapest at minimum output
  g2.c = 0.0;
  g2.TU = 2;
  c.sgs.push_back(g2);
  ChanceMargins m = compute_margins(c, aggregate_errors(c));
  DecisionSchedule base;
  base.u = {{0, 0, 0}, {0, 0, 0}};

  SECTION("no-op when the requirement already holds") {
    DecisionSchedule ok;
    ok.u = {{1, 1, 1}, {0, 0, 0}};
    auto u = rmr_select(c, m, ok);
    CHECK(u == ok.u);
  }
  SECTION("turns on the cheapest unit and stretches to TU") {
    DecisionSchedule b1;
    b1.u = {{0, 0, 1}, {0, 0, 0}};  // deficit at t = 0, 1
    auto u = rmr_select(c, m, b1);
    // G2 (cheapest) covers t = 0 and 1; block [0,2) already >= TU = 2.
    CHECK(u[1] == std::vector<int>{1, 1, 0});
    CHECK(u[0] == std::vector<int>{0, 0, 1});
  }
  SECTION("a one-hour block is stretched to the minimum up time") {
    DecisionSchedule b2;
    b2.u = {{1, 1, 0}, {0, 0, 0}};  // deficit only at t = 2
    auto u = rmr_select(c, m, b2);
    // G2 is needed only at t = 2; TU = 2 cannot extend past T, so it stays.
    CHECK(u[1][2] == 1);
    CHECK(u[1][0] == 0);
    CHECK(u[1][1] == 0);
  }
  SECTION("deterministic") {
    auto u1 = rmr_select(c, m, base);
    auto u2 = rmr_select(c, m, base);
    CHECK(u1 == u2);
  }
  SECTION("throws when all SGs cannot cover the requirement") {
    SystemCase c2 = c;
    c2.params.Hmin = 100.0;
    CHECK_THROWS_AS(rmr_select(c2, m, base), InfeasibleError);
  }
}

TEST_CASE("scheme uplift and price orderings on the curated cases") {
  for (const std::string file : {"peaker.json", "binding.json"}) {
    DYNAMIC_SECTION("case " << file) {
      Solved v = solve_case(file);
      PriceSeries mp = mp_prices(v.d);
      auto alloc = allocate_startup(v.c, v.s, AllocationRule::Uniform);
      PriceSeries achp = achp_prices(v.c, v.m, v.s, alloc);
      PriceSeries aip = aip_prices(v.c, v.m, v.s);
      auto r_mp = settle(v.c, v.s, mp);
      auto r_achp = settle(v.c, v.s, achp);
      auto r_aip = settle(v.c, v.s, aip);
      CHECK(total_uplift(r_achp) <= total_uplift(r_aip) + 1e-6);
      CHECK(total_uplift(r_aip) <= total_uplift(r_mp) + 1e-6);
      // Every report is internally consistent: profit >= 0 after uplift.
      for (const auto& rep : {r_mp, r_achp, r_aip})
        for (const auto& u : rep.units)
          if (u.kind == "sg") CHECK(u.profit >= -1e-6);
    }
  }
}

TEST_CASE("fixed costs drive MP uplift on the inertia peaker") {
  Solved v = solve_case("peaker.json");
  PriceSeries mp = mp_prices(v.d);
  auto rep = settle(v.c, v.s, mp);
  CHECK(rep.total_uplift > 1e-6);  // the high-inertia unit is not made whole
  auto alloc = allocate_startup(v.c, v.s, AllocationRule::Uniform);
  auto r_achp = settle(v.c, v.s, achp_prices(v.c, v.m, v.s, alloc));
  CHECK(r_achp.total_uplift < rep.total_uplift + 1e-9);
}

TEST_CASE("compare_schemes aggregates per-kind profits") {
  Solved v = solve_case("desk.json");
  PriceSeries mp = mp_prices(v.d);
  auto rep = settle(v.c, v.s, mp);
  auto cmp = compare_schemes({rep, rep});
  REQUIRE(cmp.rows.size() == 2);
  CHECK(cmp.rows[0].total_uplift == cmp.rows[1].total_uplift);
  CHECK(cmp.rows[0].consumer_payment == cmp.rows[1].consumer_payment);
  CHECK(cmp.rows[0].sg_profit == cmp.rows[1].sg_profit);
  double sg = 0.0;
  for (const auto& u : rep.units)
    if (u.kind == "sg") sg += u.profit;
  CHECK(cmp.rows[0].sg_profit == Catch::Approx(sg));
  CHECK_THROWS_AS(compare_schemes({rep}), std::invalid_argument);
}

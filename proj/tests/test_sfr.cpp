#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace iuc;

TEST_CASE("initial RoCoF matches the swing-equation closed form") {
  SfrParams p;
  SECTION("reference points") {
    // rocof = -dP * f0 / (2 E)
    auto t1 = simulate_outage(45000.0, 9000.0, 1500.0, p, 60.0);
    CHECK(t1.rocof_initial == Catch::Approx(-1.000).epsilon(0.005));
    auto t2 = simulate_outage(37220.0, 9000.0, 1500.0, p, 60.0);
    CHECK(t2.rocof_initial == Catch::Approx(-1.209).epsilon(0.005));
    auto t3 = simulate_outage(54600.0, 9000.0, 1500.0, p, 60.0);
    CHECK(t3.rocof_initial == Catch::Approx(-0.824).epsilon(0.005));
  }
  SECTION("numerical initial slope agrees within 1% over a grid") {
    for (double dP : {200.0, 800.0, 1500.0, 2500.0})
      for (double E : {20000.0, 45000.0, 80000.0}) {
        auto tr = simulate_outage(E, 9000.0, dP, p, 60.0);
        const double slope = (tr.delta_f[1] - tr.delta_f[0]) / p.dt;
        INFO("dP=" << dP << " E=" << E);
        CHECK(slope == Catch::Approx(tr.rocof_initial).epsilon(0.01));
      }
  }
}

TEST_CASE("zero outage leaves the frequency flat") {
  auto tr = simulate_outage(45000.0, 9000.0, 0.0, SfrParams{}, 60.0);
  CHECK(tr.rocof_initial == 0.0);
  CHECK(tr.nadir == Catch::Approx(60.0));
  for (double df : tr.delta_f) CHECK(std::abs(df) < 1e-12);
}

TEST_CASE("frequency settles at the droop-governed steady state") {
  SfrParams p;
  p.horizon = 60.0;
  const double dP = 1000.0, load = 9000.0, f0 = 60.0;
  auto tr = simulate_outage(45000.0, load, dP, p, f0);
  const double expect = -(dP / load) / (p.D + p.Km / p.R) * f0;
  CHECK(tr.delta_f.back() == Catch::Approx(expect).epsilon(0.02));
}

TEST_CASE("step-size convergence") {
  SfrParams p1, p2;
  p2.dt = 5e-4;
  auto a = simulate_outage(45000.0, 9000.0, 1500.0, p1, 60.0);
  auto b = simulate_outage(45000.0, 9000.0, 1500.0, p2, 60.0);
  CHECK(a.nadir == Catch::Approx(b.nadir).margin(1e-6));
  CHECK(a.nadir_time == Catch::Approx(b.nadir_time).margin(0.01));
}

TEST_CASE("more kinetic energy means gentler RoCoF and higher nadir") {
  SfrParams p;
  double prev_rocof = -1e9, prev_nadir = -1e9;
  for (double E : {20000.0, 30000.0, 45000.0, 70000.0}) {
    auto tr = simulate_outage(E, 9000.0, 1500.0, p, 60.0);
    CHECK(tr.rocof_initial > prev_rocof);
    CHECK(tr.nadir > prev_nadir);
    CHECK(tr.nadir < 60.0);
    prev_rocof = tr.rocof_initial;
    prev_nadir = tr.nadir;
  }
}

TEST_CASE("parameter validation") {
  SfrParams p;
  SECTION("Tr") {
    p.Tr = 0.0;
    CHECK_THROWS_AS(simulate_outage(1e4, 9e3, 1e3, p, 60.0),
                    std::invalid_argument);
  }
  SECTION("dt") {
    p.dt = 0.02;
    CHECK_THROWS_AS(simulate_outage(1e4, 9e3, 1e3, p, 60.0),
                    std::invalid_argument);
  }
  SECTION("horizon") {
    p.horizon = 10.0;
    CHECK_THROWS_AS(simulate_outage(1e4, 9e3, 1e3, p, 60.0),
                    std::invalid_argument);
  }
  SECTION("energy and outage size") {
    CHECK_THROWS_AS(simulate_outage(0.0, 9e3, 1e3, p, 60.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_outage(1e4, 9e3, 9e3, p, 60.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_outage(1e4, 9e3, -1.0, p, 60.0),
                    std::invalid_argument);
  }
}

TEST_CASE("kinetic energy equals the constraint-side inertia supply") {
  SystemCase c = iuc::testing::single_sg_case(2);
  ChanceMargins m = compute_margins(c, aggregate_errors(c));
  DecisionSchedule s;
  s.u = {{1, 0}};
  s.P = {{50.0, 0.0}};
  CHECK(kinetic_energy(c, m, s, 0) == inertia_supply(c, m, s, 0));
  CHECK(kinetic_energy(c, m, s, 0) == Catch::Approx(400.0));
  CHECK(kinetic_energy(c, m, s, 1) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("scenario metrics cover every scenario-hour pair") {
  SystemCase c = load_case(iuc::testing::data_file("desk.json"));
  ChanceMargins m = compute_margins(c, aggregate_errors(c));
  UcModel model(c, m);
  DecisionSchedule s = solve_ccuc(model);
  SfrParams p;
  const double dP = 20.0;
  auto rows = scenario_frequency_metrics(c, m, {{"aware", &s}}, {0, 1}, dP, p);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.scenario == "aware");
    CHECK(r.E > 0.0);
    CHECK(r.rocof == Catch::Approx(-dP * c.params.f0 / (2 * r.E)));
    CHECK(r.nadir < c.params.f0);
    CHECK(r.nadir > 0.0);
  }
}

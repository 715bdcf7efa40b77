#pragma once

// Shared fixtures for the test suites: data directory lookup and small
// programmatic cases.

#include <cstdlib>
#include <random>
#include <string>

#include "iuc/run.hpp"

namespace iuc::testing {

inline std::string data_dir() {
  const char* p = std::getenv("IUC_DATA");
  return p ? p : "data";
}

inline std::string data_file(const std::string& name) {
  return data_dir() + "/" + name;
}

// One bus, one SG, T hours of flat load; no uncertainty.
inline SystemCase single_sg_case(int T = 1, double load = 50.0) {
  SystemCase c;
  c.params.T = T;
  c.params.Psys = 100.0;
  c.params.Hmin = 3.5;
  c.network.buses = {"B1"};
  c.network.slack_bus = "B1";
  SgUnit g;
  g.id = "G1";
  g.bus = "B1";
  g.a = 0.01;
  g.b = 20.0;
  g.c = 5.0;
  g.s = 10.0;
  g.Pmin = 10.0;
  g.Pmax = 100.0;
  g.RU = g.RD = 100.0;
  g.TU = g.TD = 1;
  g.Hg = 4.0;
  c.sgs.push_back(g);
  c.load["B1"] = std::vector<double>(T, load);
  return c;
}

// Randomized desk-scale case for brute-force comparisons: up to 3 SGs on up
// to 3 buses, T <= 4, optional ES/RES.  Deterministic in `seed`.
inline SystemCase random_desk_case(unsigned seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  SystemCase c;
  const int T = pick(2, 4);
  const int nB = pick(1, 3);
  const int nG = pick(2, 3);
  c.params.T = T;
  for (int b = 0; b < nB; ++b) c.network.buses.push_back("B" + std::to_string(b + 1));
  c.network.slack_bus = "B1";
  for (int b = 1; b < nB; ++b) {
    Line l;
    l.from = "B1";
    l.to = c.network.buses[b];
    l.B = uni(5.0, 15.0);
    l.Fmax = uni(150.0, 400.0);
    c.network.lines.push_back(l);
  }
  double cap = 0.0, hsum = 0.0;
  for (int i = 0; i < nG; ++i) {
    SgUnit g;
    g.id = "G" + std::to_string(i + 1);
    g.bus = c.network.buses[i % nB];
    g.a = uni(0.005, 0.06);
    g.b = uni(8.0, 45.0);
    g.c = uni(0.0, 30.0);
    g.s = uni(0.0, 80.0);
    g.Pmax = uni(60.0, 150.0);
    g.Pmin = uni(0.05, 0.3) * g.Pmax;
    g.RU = g.RD = uni(0.5, 1.0) * g.Pmax;
    g.TU = pick(1, 2);
    g.TD = pick(1, 2);
    g.Hg = uni(2.0, 6.0);
    g.u0 = pick(0, 1);
    g.p0 = g.u0 ? uni(g.Pmin, g.Pmax) : 0.0;
    cap += g.Pmax;
    hsum += g.Hg * g.Pmax;
    c.sgs.push_back(g);
  }
  if (pick(0, 1)) {
    EsUnit e;
    e.id = "E1";
    e.bus = c.network.buses[0];
    e.Pe_max = e.Pc_max = uni(10.0, 30.0);
    e.Emin = 0.0;
    e.Emax = uni(40.0, 80.0);
    e.e0 = 0.5 * e.Emax;
    e.k = uni(0.85, 1.0);
    e.He_max = uni(2.0, 6.0);
    c.ess.push_back(e);
  }
  if (pick(0, 1)) {
    ResUnit r;
    r.id = "R1";
    r.bus = c.network.buses[nB - 1];
    r.kind = pick(0, 1) ? ResKind::WT : ResKind::PV;
    r.Pmax = uni(30.0, 60.0);
    for (int t = 0; t < T; ++t) {
      double f = uni(0.2, 0.7) * r.Pmax;
      r.forecast.push_back(f);
      r.mppt.push_back(std::min(r.Pmax, f * uni(1.0, 1.2)));
      r.err_mean.push_back(uni(-0.05, 0.05) * f);
      r.err_std.push_back(uni(0.02, 0.1) * f + 0.1);
      r.inertia_forecast.push_back(uni(0.3, 1.0));
      r.inertia_err_mean.push_back(0.0);
      r.inertia_err_std.push_back(uni(0.01, 0.1));
    }
    c.ress.push_back(r);
  }
  // Load comfortably below SG capacity so most commitments are feasible.
  for (int b = 0; b < nB; ++b) {
    std::vector<double> series;
    for (int t = 0; t < T; ++t) series.push_back(uni(0.15, 0.5) * cap / nB);
    c.load["B" + std::to_string(b + 1)] = series;
  }
  // Inertia requirement satisfiable but not trivially slack.
  c.params.Psys = 100.0;
  c.params.Hmin = uni(0.3, 0.7) * hsum / c.params.Psys;
  validate(c);
  return c;
}

}  // namespace iuc::testing

#pragma once

// Aggregate system-frequency-response simulation after a generation outage.
// Single-machine equivalent with a reheat governor-turbine loop, integrated
// with fixed-step RK4; reports initial RoCoF and nadir per scenario hour.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "iuc/settlement.hpp"

namespace iuc {

struct SfrParams {
  double D = 1.0;    // load damping [pu/pu-Hz]
  double R = 0.05;   // droop [pu]
  double Fh = 0.3;   // high-pressure turbine fraction
  double Tr = 8.0;   // reheat time constant [s]
  double Km = 0.95;  // mechanical gain
  double dt = 1e-3;  // integration step [s]
  double horizon = 30.0;  // [s]
};

inline void validate(const SfrParams& p) {
  if (!(p.Tr > 0)) throw std::invalid_argument("SfrParams.Tr must be > 0");
  if (!(p.dt > 0 && p.dt <= 0.01))
    throw std::invalid_argument("SfrParams.dt must be in (0, 0.01] s");
  if (!(p.horizon >= 30.0))
    throw std::invalid_argument("SfrParams.horizon must be >= 30 s");
}

struct FrequencyTrajectory {
  std::vector<double> time;     // [s]
  std::vector<double> delta_f;  // [Hz]
  double rocof_initial = 0.0;   // [Hz/s]
  double nadir = 0.0;           // [Hz] absolute frequency
  double nadir_time = 0.0;      // [s]
};

// Committed kinetic energy of one schedule hour [MW*s], matching the
// constraint evaluator term for term.
inline double kinetic_energy(const SystemCase& c, const ChanceMargins& m,
                             const DecisionSchedule& s, int t) {
  return inertia_supply(c, m, s, t);
}

// Integrates the swing equation 2H d(df)/dt = dPm - dPL - D*df (per unit)
// with reheat governor-turbine feedback dPm = -(Km/R) Fh df + z,
// Tr dz/dt = -(Km/R)(1-Fh) df - z, where H = E / Psys_load.
inline FrequencyTrajectory simulate_outage(double E, double Psys_load,
                                           double dP, const SfrParams& p,
                                           double f0) {
  validate(p);
  if (!(E > 0)) throw std::invalid_argument("simulate_outage: E must be > 0");
  if (!(dP >= 0 && dP < Psys_load))
    throw std::invalid_argument("simulate_outage: need 0 <= dP < load");

  const double H = E / Psys_load;
  const double dPL = dP / Psys_load;  // pu step
  const int steps = static_cast<int>(std::llround(p.horizon / p.dt));

  FrequencyTrajectory traj;
  traj.time.reserve(steps + 1);
  traj.delta_f.reserve(steps + 1);

  double f = 0.0;  // delta f, pu
  double z = 0.0;  // reheat state
  auto deriv = [&](double fv, double zv, double& dfv, double& dzv) {
    const double pm = -(p.Km / p.R) * p.Fh * fv + zv;
    dfv = (pm - dPL - p.D * fv) / (2.0 * H);
    dzv = (-(p.Km / p.R) * (1.0 - p.Fh) * fv - zv) / p.Tr;
  };

  traj.time.push_back(0.0);
  traj.delta_f.push_back(0.0);
  double fmin = 0.0, tmin = 0.0;
  for (int k = 0; k < steps; ++k) {
    double k1f, k1z, k2f, k2z, k3f, k3z, k4f, k4z;
    deriv(f, z, k1f, k1z);
    deriv(f + 0.5 * p.dt * k1f, z + 0.5 * p.dt * k1z, k2f, k2z);
    deriv(f + 0.5 * p.dt * k2f, z + 0.5 * p.dt * k2z, k3f, k3z);
    deriv(f + p.dt * k3f, z + p.dt * k3z, k4f, k4z);
    f += p.dt / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f);
    z += p.dt / 6.0 * (k1z + 2 * k2z + 2 * k3z + k4z);
    const double t = (k + 1) * p.dt;
    traj.time.push_back(t);
    traj.delta_f.push_back(f * f0);
    if (f < fmin) fmin = f, tmin = t;
  }
  traj.rocof_initial = -dP * f0 / (2.0 * E);
  traj.nadir = f0 + fmin * f0;
  traj.nadir_time = tmin;
  return traj;
}

struct FrequencyMetricsRow {
  std::string scenario;
  int hour = 0;
  double E = 0.0;      // [MW*s]
  double rocof = 0.0;  // [Hz/s]
  double nadir = 0.0;  // [Hz]
};

// Frequency metrics for a set of scenario schedules at selected hours.
inline std::vector<FrequencyMetricsRow> scenario_frequency_metrics(
    const SystemCase& c, const ChanceMargins& m,
    const std::vector<std::pair<std::string, const DecisionSchedule*>>&
        scenarios,
    const std::vector<int>& hours, double dP, const SfrParams& p) {
  std::vector<FrequencyMetricsRow> rows;
  for (const auto& [name, sched] : scenarios)
    for (int t : hours) {
      FrequencyMetricsRow r;
      r.scenario = name;
      r.hour = t;
      r.E = kinetic_energy(c, m, *sched, t);
      const double load = c.total_demand(t);
      auto traj = simulate_outage(r.E, load, dP, p, c.params.f0);
      r.rocof = traj.rocof_initial;
      r.nadir = traj.nadir;
      rows.push_back(r);
    }
  return rows;
}

}  // namespace iuc

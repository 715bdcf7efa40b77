#pragma once

// Deterministic inertia-aware unit-commitment model assembly.  Produces the
// convex-QP data for branch-and-bound relaxations and for the
// fixed-commitment pricing run, along with row bookkeeping so duals can be
// read back per constraint family.

#include <map>
#include <string>
#include <vector>

#include "iuc/case.hpp"
#include "iuc/qp.hpp"
#include "iuc/stats.hpp"

namespace iuc {

struct ModelOptions {
  bool inertia_constraint = true;
  // Piecewise-linear cost path: replace the quadratic objective by epigraph
  // tangent cuts (cross-check for the exact MIQP route).
  bool linearize_cost = false;
  int linear_segments = 8;
};

struct RowIndex {
  // Equality row ids, -1 when absent.
  std::vector<std::vector<int>> logic;    // [sg][t]
  std::vector<std::vector<int>> soc;      // [es][t]
  std::vector<std::vector<int>> balance;  // [bus][t]
  std::vector<int> reserve;               // [t]
  std::vector<int> slack;                 // [t]
  std::vector<std::vector<int>> fix_u;    // [sg][t], fixed-commitment only
  // Inequality row ids.
  std::vector<std::vector<int>> cap_hi, cap_lo;      // [sg][t]
  std::vector<std::vector<int>> ramp_hi, ramp_lo;    // [sg][t]
  std::vector<std::vector<int>> alpha_hi, alpha_lo;  // [sg][t]
  std::vector<std::vector<int>> u_hi, u_lo;          // [sg][t], relaxed only
  std::vector<int> inertia;                          // [t]
};

// Variable indexing over the flat vector handed to the QP solver.
struct VarIndex {
  int nG = 0, nE = 0, nB = 0, T = 0;
  int sg_stride = 5, es_stride = 6;
  int es_offset = 0, theta_offset = 0, epi_offset = 0, n = 0;

  int u(int i, int t) const { return (i * T + t) * sg_stride + 0; }
  int v(int i, int t) const { return (i * T + t) * sg_stride + 1; }
  int w(int i, int t) const { return (i * T + t) * sg_stride + 2; }
  int P(int i, int t) const { return (i * T + t) * sg_stride + 3; }
  int ag(int i, int t) const { return (i * T + t) * sg_stride + 4; }
  int Pd(int j, int t) const { return es_offset + (j * T + t) * es_stride + 0; }
  int Pc(int j, int t) const { return es_offset + (j * T + t) * es_stride + 1; }
  int ad(int j, int t) const { return es_offset + (j * T + t) * es_stride + 2; }
  int ac(int j, int t) const { return es_offset + (j * T + t) * es_stride + 3; }
  int He(int j, int t) const { return es_offset + (j * T + t) * es_stride + 4; }
  int e(int j, int t) const { return es_offset + (j * T + t) * es_stride + 5; }
  int theta(int b, int t) const { return theta_offset + b * T + t; }
  int epi(int i, int t) const { return epi_offset + i * T + t; }
};

namespace detail {

// Incremental triplet-style assembly into dense matrices.
struct RowBuffer {
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> rhs;
  int add(double r) {
    rows.emplace_back();
    rhs.push_back(r);
    return static_cast<int>(rows.size()) - 1;
  }
  void coef(int row, int col, double v) { rows[row].push_back({col, v}); }
  void to_dense(Eigen::MatrixXd& M, Eigen::VectorXd& v, int n) const {
    M = Eigen::MatrixXd::Zero(static_cast<int>(rows.size()), n);
    v = Eigen::VectorXd::Zero(static_cast<int>(rows.size()));
    for (size_t r = 0; r < rows.size(); ++r) {
      for (auto [c, x] : rows[r]) M(static_cast<int>(r), c) += x;
      v(static_cast<int>(r)) = rhs[r];
    }
  }
};

}  // namespace detail

class UcModel {
 public:
  UcModel(const SystemCase& c, const ChanceMargins& margins,
          const ModelOptions& opt = {})
      : case_(&c), margins_(&margins), opt_(opt) {
    agg_ = aggregate_errors(c);
    build();
  }

  const VarIndex& vars() const { return vi_; }
  const RowIndex& rows() const { return rix_; }
  const SystemCase& sys() const { return *case_; }
  const AggregateError& agg() const { return agg_; }
  const ModelOptions& options() const { return opt_; }
  const std::map<std::string, int>& census() const { return census_; }

  // QP relaxation with per-variable commitment bounds lo <= u <= hi.
  QpProblem relaxation(const std::vector<std::vector<double>>& lo,
                       const std::vector<std::vector<double>>& hi) const {
    detail::RowBuffer in = ineq_;
    const int nG = vi_.nG, T = vi_.T;
    for (int i = 0; i < nG; ++i)
      for (int t = 0; t < T; ++t) {
        int r = in.add(hi[i][t]);
        in.coef(r, vi_.u(i, t), 1.0);
        r = in.add(-lo[i][t]);
        in.coef(r, vi_.u(i, t), -1.0);
      }
    return finish(eq_, in);
  }

  // Fixed-commitment convex QP (pricing run): u pinned by equality rows whose
  // duals are the kappa multipliers.  Returns the row ids through `rix_fixed`.
  QpProblem fixed(const std::vector<std::vector<int>>& u_star,
                  RowIndex* rix_fixed = nullptr) const {
    detail::RowBuffer eq = eq_;
    RowIndex rix = rix_;
    const int nG = vi_.nG, T = vi_.T;
    rix.fix_u.assign(nG, std::vector<int>(T, -1));
    for (int i = 0; i < nG; ++i)
      for (int t = 0; t < T; ++t) {
        int r = eq.add(static_cast<double>(u_star[i][t]));
        eq.coef(r, vi_.u(i, t), 1.0);
        rix.fix_u[i][t] = r;
      }
    if (rix_fixed) *rix_fixed = rix;
    return finish(eq, ineq_);
  }

  // Objective value of a flat decision vector (matches the QP objective).
  double objective(const Eigen::VectorXd& x) const {
    QpProblem p = finish(eq_, ineq_);
    return 0.5 * x.dot(p.P * x) + p.q.dot(x);
  }

 private:
  void build() {
    const SystemCase& c = *case_;
    const int T = c.params.T;
    vi_.nG = static_cast<int>(c.sgs.size());
    vi_.nE = static_cast<int>(c.ess.size());
    vi_.nB = static_cast<int>(c.network.buses.size());
    vi_.T = T;
    vi_.es_offset = vi_.nG * T * vi_.sg_stride;
    vi_.theta_offset = vi_.es_offset + vi_.nE * T * vi_.es_stride;
    vi_.n = vi_.theta_offset + vi_.nB * T;
    if (opt_.linearize_cost) {
      vi_.epi_offset = vi_.n;
      vi_.n += vi_.nG * T;
    }

    rix_.logic.assign(vi_.nG, std::vector<int>(T, -1));
    rix_.soc.assign(vi_.nE, std::vector<int>(T, -1));
    rix_.balance.assign(vi_.nB, std::vector<int>(T, -1));
    rix_.reserve.assign(T, -1);
    rix_.slack.assign(T, -1);
    rix_.cap_hi.assign(vi_.nG, std::vector<int>(T, -1));
    rix_.cap_lo.assign(vi_.nG, std::vector<int>(T, -1));
    rix_.ramp_hi.assign(vi_.nG, std::vector<int>(T, -1));
    rix_.ramp_lo.assign(vi_.nG, std::vector<int>(T, -1));
    rix_.alpha_hi.assign(vi_.nG, std::vector<int>(T, -1));
    rix_.alpha_lo.assign(vi_.nG, std::vector<int>(T, -1));
    rix_.inertia.assign(T, -1);

    build_objective();
    build_equalities();
    build_inequalities();

    census_.clear();
    census_["logic"] = vi_.nG * T;
    census_["soc"] = vi_.nE * T;
    census_["balance"] = vi_.nB * T;
    census_["reserve"] = T;
    census_["ramp"] = vi_.nG * T;          // two-sided pairs
    census_["capacity"] = 2 * vi_.nG * T;  // upper and lower rows
    census_["inertia"] = opt_.inertia_constraint ? T : 0;
    census_["minup"] = n_minup_;
    census_["mindown"] = n_mindown_;
    census_["flow"] = static_cast<int>(c.network.lines.size()) * T;
  }

  void build_objective() {
    const SystemCase& c = *case_;
    const int T = c.params.T;
    Q_.assign(vi_.n, {});
    q_.assign(vi_.n, 0.0);
    for (int i = 0; i < vi_.nG; ++i) {
      const auto& g = c.sgs[i];
      for (int t = 0; t < T; ++t) {
        const double M = agg_.Mrt[t], S = agg_.Srt[t];
        q_[vi_.u(i, t)] += g.c;
        q_[vi_.v(i, t)] += g.s;
        if (!opt_.linearize_cost) {
          // 1/2 x'Qx convention: store full Q entries.
          addQ(vi_.P(i, t), vi_.P(i, t), 2 * g.a);
          addQ(vi_.ag(i, t), vi_.ag(i, t), 2 * g.a * (M * M + S * S));
          addQ(vi_.P(i, t), vi_.ag(i, t), 2 * g.a * M);
          addQ(vi_.ag(i, t), vi_.P(i, t), 2 * g.a * M);
          q_[vi_.P(i, t)] += g.b;
          q_[vi_.ag(i, t)] += g.b * M;
        } else {
          q_[vi_.epi(i, t)] += 1.0;
        }
      }
    }
  }

  void build_equalities() {
    const SystemCase& c = *case_;
    const int T = c.params.T;
    eq_ = {};
    for (int i = 0; i < vi_.nG; ++i)
      for (int t = 0; t < T; ++t) {
        int r = eq_.add(t == 0 ? static_cast<double>(c.sgs[i].u0) : 0.0);
        eq_.coef(r, vi_.u(i, t), 1.0);
        eq_.coef(r, vi_.v(i, t), -1.0);
        eq_.coef(r, vi_.w(i, t), 1.0);
        if (t > 0) eq_.coef(r, vi_.u(i, t - 1), -1.0);
        rix_.logic[i][t] = r;
      }
    for (int j = 0; j < vi_.nE; ++j) {
      const auto& e = c.ess[j];
      for (int t = 0; t < T; ++t) {
        const double M = agg_.Mrt[t];
        int r = eq_.add(t == 0 ? e.e0 : 0.0);
        eq_.coef(r, vi_.e(j, t), 1.0);
        if (t > 0) eq_.coef(r, vi_.e(j, t - 1), -1.0);
        eq_.coef(r, vi_.Pc(j, t), -e.k);
        eq_.coef(r, vi_.ac(j, t), -e.k * M);
        eq_.coef(r, vi_.Pd(j, t), 1.0 / e.k);
        eq_.coef(r, vi_.ad(j, t), M / e.k);
        rix_.soc[j][t] = r;
      }
    }
    const double base = c.params.mva_base;
    for (int b = 0; b < vi_.nB; ++b) {
      const std::string& bus = c.network.buses[b];
      for (int t = 0; t < T; ++t) {
        double rhs = 0.0;
        auto it = c.load.find(bus);
        if (it != c.load.end()) rhs += it->second[t];
        for (const auto& r : c.ress)
          if (r.bus == bus) rhs -= r.forecast[t];
        int row = eq_.add(rhs);
        for (int i = 0; i < vi_.nG; ++i)
          if (c.sgs[i].bus == bus) eq_.coef(row, vi_.P(i, t), 1.0);
        for (int j = 0; j < vi_.nE; ++j)
          if (c.ess[j].bus == bus) {
            eq_.coef(row, vi_.Pd(j, t), 1.0);
            eq_.coef(row, vi_.Pc(j, t), -1.0);
          }
        for (const auto& l : c.network.lines) {
          if (l.from != bus && l.to != bus) continue;
          int bf = c.network.bus_index(l.from), bt = c.network.bus_index(l.to);
          int other = (l.from == bus) ? bt : bf;
          eq_.coef(row, vi_.theta(b, t), -l.B * base);
          eq_.coef(row, vi_.theta(other, t), l.B * base);
        }
        rix_.balance[b][t] = row;
      }
    }
    for (int t = 0; t < T; ++t) {
      int r = eq_.add(1.0);
      for (int i = 0; i < vi_.nG; ++i) eq_.coef(r, vi_.ag(i, t), 1.0);
      for (int j = 0; j < vi_.nE; ++j) {
        eq_.coef(r, vi_.ad(j, t), 1.0);
        eq_.coef(r, vi_.ac(j, t), -1.0);
      }
      rix_.reserve[t] = r;
    }
    const int slack = c.network.bus_index(c.network.slack_bus);
    for (int t = 0; t < T; ++t) {
      int r = eq_.add(0.0);
      eq_.coef(r, vi_.theta(slack, t), 1.0);
      rix_.slack[t] = r;
    }
  }

  void build_inequalities() {
    const SystemCase& c = *case_;
    const int T = c.params.T;
    ineq_ = {};
    n_minup_ = n_mindown_ = 0;
    for (int i = 0; i < vi_.nG; ++i) {
      const auto& g = c.sgs[i];
      for (int t = 0; t < T; ++t) {
        if (t >= g.TU - 1) {
          int r = ineq_.add(0.0);
          for (int tau = t - g.TU + 1; tau <= t; ++tau)
            ineq_.coef(r, vi_.v(i, tau), 1.0);
          ineq_.coef(r, vi_.u(i, t), -1.0);
          ++n_minup_;
        }
        if (t >= g.TD - 1) {
          int r = ineq_.add(1.0);
          for (int tau = t - g.TD + 1; tau <= t; ++tau)
            ineq_.coef(r, vi_.w(i, tau), 1.0);
          ineq_.coef(r, vi_.u(i, t), 1.0);
          ++n_mindown_;
        }
        // Ramping against p0 at the horizon start.
        {
          int r = ineq_.add(g.RU + (t == 0 ? g.p0 : 0.0));
          ineq_.coef(r, vi_.P(i, t), 1.0);
          if (t > 0) ineq_.coef(r, vi_.P(i, t - 1), -1.0);
          rix_.ramp_hi[i][t] = r;
          r = ineq_.add(g.RD - (t == 0 ? g.p0 : 0.0));
          ineq_.coef(r, vi_.P(i, t), -1.0);
          if (t > 0) ineq_.coef(r, vi_.P(i, t - 1), 1.0);
          rix_.ramp_lo[i][t] = r;
        }
        // Reserve participation bounds.
        {
          int r = ineq_.add(0.0);
          ineq_.coef(r, vi_.ag(i, t), 1.0);
          ineq_.coef(r, vi_.u(i, t), -1.0);
          rix_.alpha_hi[i][t] = r;
          r = ineq_.add(0.0);
          ineq_.coef(r, vi_.ag(i, t), -1.0);
          rix_.alpha_lo[i][t] = r;
        }
        // Chance-margin capacity limits.
        {
          int r = ineq_.add(0.0);
          ineq_.coef(r, vi_.P(i, t), 1.0);
          ineq_.coef(r, vi_.ag(i, t), margins_->dg_hi[i][t]);
          ineq_.coef(r, vi_.u(i, t), -g.Pmax);
          rix_.cap_hi[i][t] = r;
          r = ineq_.add(0.0);
          ineq_.coef(r, vi_.P(i, t), -1.0);
          ineq_.coef(r, vi_.ag(i, t), margins_->dg_lo[i][t]);
          ineq_.coef(r, vi_.u(i, t), g.Pmin);
          rix_.cap_lo[i][t] = r;
        }
        // v, w in [0, 1]; u bounds are added per relaxation/fixing.
        for (int var : {vi_.v(i, t), vi_.w(i, t)}) {
          int r = ineq_.add(1.0);
          ineq_.coef(r, var, 1.0);
          r = ineq_.add(0.0);
          ineq_.coef(r, var, -1.0);
        }
        if (opt_.linearize_cost) add_cost_cuts(i, t);
      }
    }
    for (int j = 0; j < vi_.nE; ++j) {
      const auto& e = c.ess[j];
      const double kf = 2.0 * c.params.fmax_prime * e.Pe_max / c.params.f0;
      const double kn = 2.0 * c.params.dfmax * e.Pe_max / c.params.f0;
      for (int t = 0; t < T; ++t) {
        int r = ineq_.add(0.0);
        ineq_.coef(r, vi_.Pd(j, t), -1.0);
        r = ineq_.add(0.0);
        ineq_.coef(r, vi_.Pc(j, t), -1.0);
        r = ineq_.add(e.Pe_max);
        ineq_.coef(r, vi_.Pd(j, t), 1.0);
        ineq_.coef(r, vi_.He(j, t), kf);
        ineq_.coef(r, vi_.ad(j, t), margins_->dd[j][t]);
        r = ineq_.add(e.Pc_max);
        ineq_.coef(r, vi_.Pc(j, t), 1.0);
        ineq_.coef(r, vi_.He(j, t), kf);
        ineq_.coef(r, vi_.ac(j, t), margins_->dc[j][t]);
        r = ineq_.add(e.Emax);
        ineq_.coef(r, vi_.e(j, t), 1.0);
        ineq_.coef(r, vi_.He(j, t), kn);
        r = ineq_.add(-e.Emin);
        ineq_.coef(r, vi_.e(j, t), -1.0);
        ineq_.coef(r, vi_.He(j, t), kn);
        for (int var : {vi_.ad(j, t), vi_.ac(j, t)}) {
          r = ineq_.add(1.0);
          ineq_.coef(r, var, 1.0);
          r = ineq_.add(0.0);
          ineq_.coef(r, var, -1.0);
        }
        r = ineq_.add(e.He_max);
        ineq_.coef(r, vi_.He(j, t), 1.0);
        r = ineq_.add(0.0);
        ineq_.coef(r, vi_.He(j, t), -1.0);
      }
    }
    const double base = c.params.mva_base;
    for (const auto& l : c.network.lines) {
      int bf = c.network.bus_index(l.from), bt = c.network.bus_index(l.to);
      for (int t = 0; t < T; ++t) {
        int r = ineq_.add(l.Fmax);
        ineq_.coef(r, vi_.theta(bf, t), l.B * base);
        ineq_.coef(r, vi_.theta(bt, t), -l.B * base);
        r = ineq_.add(l.Fmax);
        ineq_.coef(r, vi_.theta(bf, t), -l.B * base);
        ineq_.coef(r, vi_.theta(bt, t), l.B * base);
      }
    }
    if (opt_.inertia_constraint) {
      for (int t = 0; t < T; ++t) {
        double rhs = -c.params.Psys * c.params.Hmin;
        for (size_t k = 0; k < c.ress.size(); ++k)
          rhs += (c.ress[k].inertia_forecast[t] + margins_->dh[k][t]) *
                 c.ress[k].Pmax;
        int r = ineq_.add(rhs);
        for (int i = 0; i < vi_.nG; ++i)
          ineq_.coef(r, vi_.u(i, t), -c.sgs[i].Hg * c.sgs[i].Pmax);
        for (int j = 0; j < vi_.nE; ++j)
          ineq_.coef(r, vi_.He(j, t), -c.ess[j].Pe_max);
        rix_.inertia[t] = r;
      }
    }
  }

  // Epigraph tangent cuts of the convex expected-cost surface in (P, alpha).
  void add_cost_cuts(int i, int t) {
    const auto& g = case_->sgs[i];
    const double M = agg_.Mrt[t], S = agg_.Srt[t];
    const int K = std::max(2, opt_.linear_segments);
    for (int k = 0; k < K; ++k) {
      double Pk = g.Pmax * k / (K - 1);
      for (double am : {0.0, 0.5, 1.0}) {
        double mean = Pk + M * am;
        double f = g.a * (mean * mean + S * S * am * am) + g.b * mean;
        double gP = 2 * g.a * mean + g.b;
        double ga = 2 * g.a * mean * M + 2 * g.a * S * S * am + g.b * M;
        int r = ineq_.add(gP * Pk + ga * am - f);
        ineq_.coef(r, vi_.P(i, t), gP);
        ineq_.coef(r, vi_.ag(i, t), ga);
        ineq_.coef(r, vi_.epi(i, t), -1.0);
      }
    }
    // Epigraph variable stays bounded below.
    int r = ineq_.add(0.0);
    ineq_.coef(r, vi_.epi(i, t), -1.0);
  }

  QpProblem finish(const detail::RowBuffer& eq,
                   const detail::RowBuffer& in) const {
    QpProblem p;
    p.P = Eigen::MatrixXd::Zero(vi_.n, vi_.n);
    for (int col = 0; col < vi_.n; ++col)
      for (auto [row, v] : Q_[col]) p.P(row, col) += v;
    p.q = Eigen::Map<const Eigen::VectorXd>(q_.data(), vi_.n);
    eq.to_dense(p.A, p.b, vi_.n);
    in.to_dense(p.G, p.h, vi_.n);
    return p;
  }

  void addQ(int r, int ccol, double v) { Q_[ccol].push_back({r, v}); }

  const SystemCase* case_;
  const ChanceMargins* margins_;
  ModelOptions opt_;
  AggregateError agg_;
  VarIndex vi_;
  RowIndex rix_;
  detail::RowBuffer eq_, ineq_;
  std::vector<std::vector<std::pair<int, double>>> Q_;  // column -> (row, val)
  std::vector<double> q_;
  std::map<std::string, int> census_;
  int n_minup_ = 0, n_mindown_ = 0;
};

}  // namespace iuc

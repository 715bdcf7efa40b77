#pragma once

// Gaussian machinery for the chance-constrained reformulation: aggregate
// forecast errors, inverse-CDF margins, and the expected quadratic SG cost.
// All functions are pure and stateless.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "iuc/case.hpp"

namespace iuc {

// Standard normal CDF.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Standard normal pdf.
inline double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// Standard normal quantile.  Rational approximation (Acklam) refined by one
// Halley step on the CDF; absolute error well below 1e-10 on (0, 1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal_quantile: p must be in (0, 1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= phigh) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
          c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  // Halley refinement.
  double e = normal_cdf(x) - p;
  double u = e * std::sqrt(2 * M_PI) * std::exp(0.5 * x * x);
  x = x - u / (1 + 0.5 * x * u);
  return x;
}

// Margin for P[y + alpha*w <= limit] >= 1 - eps with w ~ N(mean, sigma^2):
// returns Phi^{-1}(1-eps)*sigma - mean.  The caller supplies the sign of
// `mean` matching the recourse direction of the constrained quantity.
inline double chance_margin(double eps, double sigma, double mean) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("chance_margin: eps must be in (0, 1)");
  if (sigma < 0) throw std::domain_error("chance_margin: sigma must be >= 0");
  return normal_quantile(1.0 - eps) * sigma - mean;
}

// Per-hour moments of the system-wide generation and inertia errors.
struct AggregateError {
  std::vector<double> Mrt;  // mean of summed generation errors [MW]
  std::vector<double> Srt;  // std of summed generation errors [MW]
  std::vector<double> Mht;  // mean of summed inertia errors [s]
  std::vector<double> Sht;  // std of summed inertia errors [s]
};

inline AggregateError aggregate_errors(const SystemCase& c) {
  const int T = c.params.T;
  AggregateError a;
  a.Mrt.assign(T, 0.0);
  a.Srt.assign(T, 0.0);
  a.Mht.assign(T, 0.0);
  a.Sht.assign(T, 0.0);
  for (int t = 0; t < T; ++t) {
    double var_r = 0.0, var_h = 0.0;
    for (const auto& r : c.ress) {
      a.Mrt[t] += r.err_mean[t];
      var_r += r.err_std[t] * r.err_std[t];
      a.Mht[t] += r.inertia_err_mean[t];
      var_h += r.inertia_err_std[t] * r.inertia_err_std[t];
    }
    a.Srt[t] = std::sqrt(var_r);
    a.Sht[t] = std::sqrt(var_h);
    // Case-file override of the system-wide generation error moments.
    if (c.params.agg_err_mean) a.Mrt[t] = *c.params.agg_err_mean;
    if (c.params.agg_err_std) a.Srt[t] = *c.params.agg_err_std;
  }
  return a;
}

// Deterministic margins for every chance-constraint family.  Recourse
// convention: each dispatchable quantity deviates by +alpha * Omega_rt with
// Omega_rt ~ N(Mrt, Srt^2), so upper bounds carry quantile*sigma + mean and
// the SG lower bound carries quantile*sigma - mean.
struct ChanceMargins {
  // [unit][hour]
  std::vector<std::vector<double>> dg_hi;  // SG upper capacity margin
  std::vector<std::vector<double>> dg_lo;  // SG lower capacity margin
  std::vector<std::vector<double>> dd;     // ES discharge upper margin
  std::vector<std::vector<double>> dc;     // ES charge upper margin
  // Per-RES-unit inertia margin applied inside the capacity-weighted sum of
  // the inertia requirement; negative (tightening).  The per-unit values
  // allocate the exact aggregate quantile so that
  //   sum_i dh[i][t] * Pmax_i = -dh_sys[t].
  std::vector<std::vector<double>> dh;
  std::vector<double> dh_sys;  // aggregate inertia tightening [MW*s]
};

inline ChanceMargins compute_margins(const SystemCase& c,
                                     const AggregateError& agg) {
  const int T = c.params.T;
  ChanceMargins m;
  m.dg_hi.assign(c.sgs.size(), std::vector<double>(T));
  m.dg_lo.assign(c.sgs.size(), std::vector<double>(T));
  for (size_t i = 0; i < c.sgs.size(); ++i)
    for (int t = 0; t < T; ++t) {
      m.dg_hi[i][t] = chance_margin(c.sgs[i].eps_g, agg.Srt[t], -agg.Mrt[t]);
      m.dg_lo[i][t] = chance_margin(c.sgs[i].eps_g, agg.Srt[t], agg.Mrt[t]);
    }
  m.dd.assign(c.ess.size(), std::vector<double>(T));
  m.dc.assign(c.ess.size(), std::vector<double>(T));
  for (size_t i = 0; i < c.ess.size(); ++i)
    for (int t = 0; t < T; ++t) {
      m.dd[i][t] = chance_margin(c.ess[i].eps_d, agg.Srt[t], -agg.Mrt[t]);
      m.dc[i][t] = chance_margin(c.ess[i].eps_c, agg.Srt[t], -agg.Mrt[t]);
    }
  // Inertia: realized contribution per RES unit is (H - w_h) * Pmax with
  // independent per-unit errors.  The aggregate quantile of the weighted
  // error sum is allocated back to units proportionally to their share of
  // the weighted variance, keeping the constraint exact under one eps.
  m.dh.assign(c.ress.size(), std::vector<double>(T, 0.0));
  m.dh_sys.assign(T, 0.0);
  double eps_h = 0.5;
  for (const auto& r : c.ress) eps_h = std::min(eps_h, r.eps_h);
  const double q = c.ress.empty() ? 0.0 : normal_quantile(1.0 - eps_h);
  for (int t = 0; t < T; ++t) {
    double wvar = 0.0, wmean = 0.0;
    for (const auto& r : c.ress) {
      wvar += r.inertia_err_std[t] * r.inertia_err_std[t] * r.Pmax * r.Pmax;
      wmean += r.inertia_err_mean[t] * r.Pmax;
    }
    const double wstd = std::sqrt(wvar);
    m.dh_sys[t] = q * wstd + wmean;
    for (size_t i = 0; i < c.ress.size(); ++i) {
      const auto& r = c.ress[i];
      double quant_share =
          wstd > 0 ? q * r.inertia_err_std[t] * r.inertia_err_std[t] * r.Pmax /
                         wstd
                   : 0.0;
      m.dh[i][t] = -(r.inertia_err_mean[t] + quant_share);
    }
  }
  return m;
}

// Expected one-hour SG cost under affine recourse P + alpha * Omega,
// Omega ~ N(M, S^2):
//   a[(P + M a)^2 + S^2 a^2] + b (P + M a) + u c + v s.
inline double expected_sg_cost(const SgUnit& g, double P, double alpha,
                               double u, double v, double M, double S) {
  const double mean_out = P + M * alpha;
  return g.a * (mean_out * mean_out + S * S * alpha * alpha) +
         g.b * mean_out + u * g.c + v * g.s;
}

}  // namespace iuc

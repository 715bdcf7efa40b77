#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"

using namespace iuc;

namespace {

// Independent quantile oracle: bisection on the erf-based normal CDF.
double quantile_oracle(double p) {
  double lo = -12.0, hi = 12.0;
  for (int k = 0; k < 200; ++k) {
    double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("normal quantile matches the bisection oracle") {
  for (double p : {0.95, 0.975, 0.99, 0.999, 0.3, 0.05, 1e-6, 0.6, 0.5}) {
    INFO("p=" << p);
    CHECK(normal_quantile(p) == Catch::Approx(quantile_oracle(p)).margin(1e-10));
  }
  // Frozen reference values from the oracle.
  CHECK(normal_quantile(0.95) ==
        Catch::Approx(1.6448536269514722).margin(1e-10));
  CHECK(normal_quantile(0.99) ==
        Catch::Approx(2.3263478740408408).margin(1e-10));
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
}

TEST_CASE("normal cdf/quantile round trip") {
  for (double x : {-3.0, -1.0, -0.1, 0.0, 0.5, 2.0, 4.0})
    CHECK(normal_quantile(normal_cdf(x)) == Catch::Approx(x).margin(1e-9));
}

TEST_CASE("chance margin reference values") {
  CHECK(chance_margin(0.5, 1.0, 0.0) == Catch::Approx(0.0).margin(1e-12));
  CHECK(chance_margin(0.05, 1.0, 0.5) == Catch::Approx(1.14485).margin(1e-5));
  CHECK(chance_margin(0.05, 2.0, 0.0) == Catch::Approx(3.28971).margin(1e-5));
}

TEST_CASE("chance margin properties") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ueps(0.01, 0.49), usig(0.0, 5.0),
      um(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    double eps = ueps(rng), sig = usig(rng), m = um(rng);
    // Linear in sigma.
    CHECK(chance_margin(eps, 2 * sig, m) + chance_margin(eps, 0.0, m) ==
          Catch::Approx(2 * chance_margin(eps, sig, m)).margin(1e-9));
    // Monotone decreasing in eps.
    CHECK(chance_margin(eps, sig, m) >=
          chance_margin(std::min(0.499, eps + 0.01), sig, m) - 1e-12);
    // Shift by mean.
    CHECK(chance_margin(eps, sig, m) ==
          Catch::Approx(chance_margin(eps, sig, 0.0) - m).margin(1e-9));
  }
}

TEST_CASE("chance margin achieves the target probability empirically") {
  // P[alpha * w <= alpha * margin] with w ~ N(mean, sigma^2) should be
  // 1 - eps when margin = chance_margin(eps, sigma, -mean) - ... exercised
  // directly: P[w <= quantile(1-eps)*sigma + mean] = 1 - eps.
  std::mt19937_64 rng(11);
  std::normal_distribution<double> unit(0.0, 1.0);
  const int N = 1000000;
  const double eps = 0.05, sigma = 2.0, mean = 0.7;
  const double lim = chance_margin(eps, sigma, -mean);  // quantile*sig + mean
  long ok = 0;
  for (int i = 0; i < N; ++i)
    if (mean + sigma * unit(rng) <= lim) ++ok;
  const double rate = double(ok) / N;
  const double sig_bin = std::sqrt(0.95 * 0.05 / N);
  CHECK(std::abs(rate - 0.95) <= 4 * sig_bin);
}

TEST_CASE("aggregate errors: closed forms") {
  SystemCase c = testing::single_sg_case(2);
  auto mkres = [&](double m, double s) {
    ResUnit r;
    r.id = "R" + std::to_string(c.ress.size() + 1);
    r.bus = "B1";
    r.Pmax = 10.0;
    r.forecast = {1.0, 1.0};
    r.mppt = {2.0, 2.0};
    r.err_mean = {m, m};
    r.err_std = {s, s};
    r.inertia_forecast = {0.5, 0.5};
    r.inertia_err_mean = {0.0, 0.0};
    r.inertia_err_std = {0.1, 0.1};
    c.ress.push_back(r);
  };
  SECTION("no RES units") {
    auto a = aggregate_errors(c);
    CHECK(a.Mrt[0] == 0.0);
    CHECK(a.Srt[0] == 0.0);
    CHECK(a.Mht[0] == 0.0);
    CHECK(a.Sht[0] == 0.0);
  }
  SECTION("3-4-5 variance sum") {
    mkres(0.1, 0.3);
    mkres(0.2, 0.4);
    auto a = aggregate_errors(c);
    CHECK(a.Mrt[0] == Catch::Approx(0.3).margin(1e-12));
    CHECK(a.Srt[0] == Catch::Approx(0.5).margin(1e-12));
  }
  SECTION("permutation invariance") {
    mkres(0.1, 0.3);
    mkres(-0.2, 0.4);
    mkres(0.05, 0.9);
    auto a1 = aggregate_errors(c);
    std::swap(c.ress[0], c.ress[2]);
    auto a2 = aggregate_errors(c);
    CHECK(a1.Mrt[0] == Catch::Approx(a2.Mrt[0]).margin(1e-12));
    CHECK(a1.Srt[0] == Catch::Approx(a2.Srt[0]).margin(1e-12));
  }
  SECTION("Monte-Carlo moments of the summed error") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> um(-0.5, 0.5), us(0.1, 1.5);
    std::vector<std::pair<double, double>> ms;
    for (int i = 0; i < 5; ++i) {
      ms.emplace_back(um(rng), us(rng));
      mkres(ms.back().first, ms.back().second);
    }
    auto a = aggregate_errors(c);
    const int N = 1000000;
    std::normal_distribution<double> unit(0.0, 1.0);
    double sum = 0.0, sq = 0.0;
    for (int n = 0; n < N; ++n) {
      double w = 0.0;
      for (auto [m, s] : ms) w += m + s * unit(rng);
      sum += w;
      sq += w * w;
    }
    double mc_mean = sum / N;
    double mc_std = std::sqrt(sq / N - mc_mean * mc_mean);
    CHECK(std::abs(mc_mean - a.Mrt[0]) <= 4 * a.Srt[0] / std::sqrt(double(N)));
    CHECK(mc_std == Catch::Approx(a.Srt[0]).epsilon(0.01));
  }
  SECTION("params override replaces generation moments only") {
    mkres(0.1, 0.3);
    c.params.agg_err_mean = 0.5;
    c.params.agg_err_std = 1.0;
    auto a = aggregate_errors(c);
    CHECK(a.Mrt[0] == 0.5);
    CHECK(a.Srt[0] == 1.0);
    CHECK(a.Sht[0] == Catch::Approx(0.1).margin(1e-12));
  }
}

TEST_CASE("expected SG cost") {
  SgUnit g;
  SECTION("pure quadratic") {
    g.a = 1.0;
    CHECK(expected_sg_cost(g, 2.0, 0.0, 1, 0, 0.0, 0.0) ==
          Catch::Approx(4.0).margin(1e-12));
  }
  SECTION("offline unit") {
    g.a = 1.0;
    g.b = 2.0;
    g.c = 5.0;
    g.s = 10.0;
    CHECK(expected_sg_cost(g, 0.0, 0.0, 0, 0, 0.5, 1.0) == 0.0);
  }
  SECTION("frozen reference and Monte-Carlo oracle") {
    g.a = 1.0;
    g.b = 1.0;
    g.c = 5.0;
    g.s = 10.0;
    const double v = expected_sg_cost(g, 1.0, 0.5, 1, 1, 0.5, 1.0);
    CHECK(v == Catch::Approx(18.0625).margin(1e-12));
    std::mt19937_64 rng(5);
    std::normal_distribution<double> w(0.5, 1.0);
    const int N = 1000000;
    double sum = 0.0, sq = 0.0;
    for (int n = 0; n < N; ++n) {
      double x = 1.0 + 0.5 * w(rng);
      double cst = g.a * x * x + g.b * x + g.c + g.s;
      sum += cst;
      sq += cst * cst;
    }
    double mean = sum / N;
    double sd = std::sqrt(sq / N - mean * mean);
    CHECK(std::abs(mean - v) <= 3 * sd / std::sqrt(double(N)));
  }
  SECTION("symbolic identity E[x^2] = E[x]^2 + Var[x]") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 3.0), um(-1.0, 1.0);
    for (int k = 0; k < 500; ++k) {
      g.a = u(rng);
      g.b = u(rng);
      g.c = u(rng);
      g.s = u(rng);
      double P = 10 * u(rng), al = u(rng) / 3, M = um(rng), S = u(rng);
      double mean_x = P + al * M, var_x = al * al * S * S;
      double expect = g.a * (mean_x * mean_x + var_x) + g.b * mean_x + g.c +
                      g.s;
      CHECK(expected_sg_cost(g, P, al, 1, 1, M, S) ==
            Catch::Approx(expect).margin(1e-9));
    }
  }
}

TEST_CASE("margins tighten the right side") {
  SystemCase c = testing::single_sg_case(1);
  ResUnit r;
  r.id = "R1";
  r.bus = "B1";
  r.Pmax = 20.0;
  r.forecast = {5.0};
  r.mppt = {10.0};
  r.err_mean = {0.5};
  r.err_std = {2.0};
  r.inertia_forecast = {0.5};
  r.inertia_err_mean = {0.1};
  r.inertia_err_std = {0.05};
  c.ress.push_back(r);
  auto agg = aggregate_errors(c);
  auto m = compute_margins(c, agg);
  const double q = normal_quantile(0.95);
  // Upper bounds: quantile*sigma + mean; lower bound: quantile*sigma - mean.
  CHECK(m.dg_hi[0][0] == Catch::Approx(q * 2.0 + 0.5).margin(1e-9));
  CHECK(m.dg_lo[0][0] == Catch::Approx(q * 2.0 - 0.5).margin(1e-9));
  // Inertia margin is a tightening (negative) and sums to the aggregate.
  CHECK(m.dh[0][0] < 0.0);
  CHECK(m.dh[0][0] * r.Pmax == Catch::Approx(-m.dh_sys[0]).margin(1e-9));
  CHECK(m.dh_sys[0] ==
        Catch::Approx(q * 0.05 * r.Pmax + 0.1 * r.Pmax).margin(1e-9));
}

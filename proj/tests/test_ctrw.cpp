#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cimclg/ctrw.hpp"
#include "cimclg/errors.hpp"

using namespace cimclg;

namespace {

JeffreysParams make(double al, double be, double ga, double a, double b) {
  JeffreysParams p;
  p.alpha = al;
  p.beta = be;
  p.gamma = ga;
  p.a = a;
  p.b = b;
  return p;
}

const WaitingTimeTable& heavy_table() {
  static const WaitingTimeTable tab = [] {
    const auto grid = default_waiting_grid();
    return invert_waiting_time(make(0.3, 0.25, 0.3, 1, 100), grid);
  }();
  return tab;
}

// Unit-rate exponential waits written out directly.
WaitingTimeTable exponential_table() {
  WaitingTimeTable tab;
  tab.t_grid = geometric_grid(1e-8, 60, 4000);
  for (double t : tab.t_grid) {
    tab.pdf.push_back(std::exp(-t));
    tab.cdf.push_back(-std::expm1(-t));
  }
  return tab;
}

}  // namespace

TEST_CASE("waiting-time grid") {
  const auto g = default_waiting_grid();
  CHECK(g.size() == 600);
  CHECK(g.front() == doctest::Approx(1e-6).epsilon(1e-14));
  CHECK(g.back() == doctest::Approx(1e8).epsilon(1e-14));
  for (std::size_t i = 2; i < g.size(); ++i)
    CHECK(std::log(g[i] / g[i - 1]) == doctest::Approx(std::log(g[1] / g[0])).epsilon(1e-10));
}

TEST_CASE("talbot inversion of simple transforms") {
  using C = std::complex<long double>;
  // 64 nodes scale round-off by about exp(2*64/5), so in long double the
  // absolute error bound is near 1e-8.
  const double tol = std::numeric_limits<long double>::epsilon() * std::exp(2.0 * 64 / 5) * 10;
  for (double t : {0.1, 1.0, 7.0}) {
    CHECK(std::abs(talbot_invert([](C s) { return 1.0L / (s + 1.0L); }, t) - std::exp(-t)) < tol);
    CHECK(std::abs(talbot_invert_log([](C s) { return -2.0L * std::log(s); }, t) - t) < tol * t);
  }
  // fewer nodes, less amplification
  CHECK(std::abs(talbot_invert([](C s) { return 1.0L / (s + 1.0L); }, 1.0, 32) - std::exp(-1.0)) < 1e-11);
}

TEST_CASE("heavy-tailed table: mass, positivity, monotone cdf") {
  const auto& tab = heavy_table();
  REQUIRE(tab.pdf.size() == tab.t_grid.size());
  for (double v : tab.pdf) CHECK(v >= 0.0);
  for (std::size_t i = 1; i < tab.cdf.size(); ++i) CHECK(tab.cdf[i] >= tab.cdf[i - 1]);
  CHECK(tab.cdf.back() <= 1.0 + 1e-3);
  CHECK(tab.negative_mass < 1e-3);
  // cdf at the first node plus a log-spaced trapezoid of t psi(t) plus the power-law tail
  double mass = tab.cdf.front();
  for (std::size_t i = 1; i < tab.t_grid.size(); ++i) {
    const double h = std::log(tab.t_grid[i] / tab.t_grid[i - 1]);
    mass += 0.5 * h * (tab.t_grid[i] * tab.pdf[i] + tab.t_grid[i - 1] * tab.pdf[i - 1]);
  }
  REQUIRE(tab.tail_exponent > 0.0);
  mass += tab.pdf.back() * tab.t_grid.back() / tab.tail_exponent;
  CHECK(std::abs(mass - 1.0) < 1e-3);
  const auto tc = trapezoid_cdf(tab);
  CHECK(std::abs(tc.back() - tab.cdf.back()) < 1e-3);
  // heavy tail: the survival exponent sits near gamma
  CHECK(tab.tail_exponent == doctest::Approx(0.3).epsilon(0.1));
}

TEST_CASE("inadmissible parameters are rejected") {
  const auto grid = default_waiting_grid();
  CHECK_THROWS_AS(invert_waiting_time(make(1, 1, 1, 2, 2), grid), ConfigError);
}

TEST_CASE("degenerate eta = z places a unit point mass at t = 1" * doctest::may_fail()) {
  const auto grid = geometric_grid(0.5, 2.0, 200);
  WaitingTimeOptions opt;
  opt.bypass_validation = true;
  const auto tab = invert_waiting_time(make(0.5, 0.5, 1, 1, 1), grid, opt);
  auto cdf_at = [&](double t) {
    const auto it = std::lower_bound(tab.t_grid.begin(), tab.t_grid.end(), t);
    return tab.cdf[static_cast<std::size_t>(it - tab.t_grid.begin())];
  };
  CHECK(cdf_at(0.9) < 0.05);
  CHECK(cdf_at(1.1) > 0.95);
}

TEST_CASE("inverse-cdf sampling: reproducible, in range, KS below 0.01") {
  const auto& tab = heavy_table();
  Rng r1 = particle_rng(42, 0), r2 = particle_rng(42, 0);
  const auto a = sample_waiting_times(tab, 100000, r1);
  CHECK(a == sample_waiting_times(tab, 100000, r2));
  std::size_t beyond = 0;
  for (double v : a) {
    CHECK(v >= tab.t_grid.front());
    if (v > tab.t_grid.back()) ++beyond;
  }
  // tail-patch draws past the grid occur with probability 1 - cdf[last]
  const double p_beyond = 1.0 - tab.cdf.back();
  CHECK(static_cast<double>(beyond) / a.size() <= p_beyond + 5 * std::sqrt(p_beyond / a.size()) + 1e-5);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < tab.t_grid.size(); ++i) {
    const auto n = std::upper_bound(sorted.begin(), sorted.end(), tab.t_grid[i]) - sorted.begin();
    ks = std::max(ks, std::abs(static_cast<double>(n) / sorted.size() - tab.cdf[i]));
  }
  CHECK(ks < 0.01);
  CHECK_THROWS(sample_waiting_times(tab, 0, r1));
}

TEST_CASE("uniform01 stays inside the open interval") {
  Rng r = particle_rng(3, 9);
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(r);
    CHECK((u > 0.0 && u < 1.0));
  }
}

TEST_CASE("simulate: zero steps keeps every particle at the origin") {
  const auto ens = simulate(heavy_table(), 2, 50, 0, 7);
  for (const auto& tr : ens.trajectories) {
    CHECK(tr.times.empty());
    CHECK(tr.positions.empty());
  }
  const double tq[] = {1.0, 100.0};
  for (const auto& m : msd_empirical(ens, tq)) CHECK(m.msd == 0.0);
}

TEST_CASE("simulate: step variance is 2 per coordinate") {
  const auto ens = simulate(heavy_table(), 2, 1000, 500, 11, 4);
  double s[2] = {0, 0}, ss[2] = {0, 0};
  std::size_t n = 0;
  for (const auto& tr : ens.trajectories) {
    std::vector<double> prev(2, 0.0);
    for (std::size_t k = 0; k < tr.positions.size(); ++k) {
      for (int d = 0; d < 2; ++d) {
        const double dx = tr.positions[k][d] - prev[d];
        s[d] += dx;
        ss[d] += dx * dx;
      }
      prev = tr.positions[k];
      ++n;
    }
    for (std::size_t k = 1; k < tr.times.size(); ++k) CHECK(tr.times[k] > tr.times[k - 1]);
  }
  REQUIRE(n == 500000);
  for (int d = 0; d < 2; ++d) {
    const double mean = s[d] / n;
    CHECK(ss[d] / n - mean * mean == doctest::Approx(2.0).epsilon(0.005));
  }
}

TEST_CASE("simulate: same seed gives identical ensembles regardless of workers") {
  const auto a = simulate(heavy_table(), 2, 200, 50, 99, 1);
  const auto b = simulate(heavy_table(), 2, 200, 50, 99, 5);
  for (std::size_t i = 0; i < a.trajectories.size(); ++i) {
    CHECK(a.trajectories[i].times == b.trajectories[i].times);
    CHECK(a.trajectories[i].positions == b.trajectories[i].positions);
  }
  CHECK(simulate(heavy_table(), 1, 10, 5, 100).trajectories[0].times != a.trajectories[0].times);
}

TEST_CASE("msd before the first event is zero") {
  const auto ens = simulate(heavy_table(), 1, 300, 20, 5);
  double first = INFINITY;
  for (const auto& tr : ens.trajectories) first = std::min(first, tr.times.front());
  const double tq[] = {first * 0.5};
  CHECK(msd_empirical(ens, tq)[0].msd == 0.0);
}

TEST_CASE("streaming msd equals the trajectory estimator") {
  const auto& tab = heavy_table();
  const double tq[] = {1e-4, 1e-2, 1.0, 1e2};
  // enough steps that every particle passes the last query time
  const auto ens = simulate(tab, 2, 200, 4000, 17);
  for (const auto& tr : ens.trajectories) REQUIRE(tr.times.back() > tq[3]);
  const auto a = msd_empirical(ens, tq);
  const auto b = msd_monte_carlo(tab, 2, 200, tq, 17, 3);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(b[i].msd == doctest::Approx(a[i].msd).epsilon(1e-12));
    CHECK(b[i].std_error == doctest::Approx(a[i].std_error).epsilon(1e-9));
  }
  const auto c = msd_monte_carlo(tab, 2, 200, tq, 17, 1);
  for (std::size_t i = 0; i < 4; ++i) CHECK(c[i].msd == b[i].msd);
}

TEST_CASE("exponential waits give normal diffusion") {
  const auto tab = exponential_table();
  const auto tq = geometric_grid(10, 1000, 9);
  const auto m = msd_monte_carlo(tab, 1, 20000, tq, 3, 4);
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : m) pts.emplace_back(p.t, p.msd);
  CHECK(fit_loglog_slope(pts, 10, 1000) == doctest::Approx(1.0).epsilon(0.02));
  for (const auto& p : m) CHECK(std::abs(p.msd - kStepVariance * p.t) < 4 * p.std_error + 1e-9);
}

TEST_CASE("msd_analytic: inverse of z^-2 for eta = z") {
  MsdAnalyticOptions opt;
  opt.bypass_validation = true;
  const double tq[] = {0.1, 1.0, 10.0, 1e3};
  for (const auto& [t, v] : msd_analytic(make(0.5, 0.5, 1, 1, 1), tq, opt)) CHECK(std::abs(v - t) < 1e-10 * t);
}

TEST_CASE("msd_analytic: asymptotic branches") {
  const auto p = make(0.4, 0.3, 0.4, 1, 1);
  const double tq[] = {1e-8, 1e8};
  const auto v = msd_analytic(p, tq);
  const double nu = p.alpha + p.gamma - p.beta;
  CHECK(v[0].second * std::tgamma(1 + nu) * (p.a / p.b) / std::pow(1e-8, nu) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(v[1].second * std::tgamma(1 + p.gamma) / std::pow(1e8, p.gamma) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("msd_analytic: crossover ordering follows the sign of alpha - beta") {
  const auto short_t = geometric_grid(1e-8, 1e-6, 9), long_t = geometric_grid(1e6, 1e8, 9);
  auto slopes = [&](const JeffreysParams& p) {
    const auto s = msd_analytic(p, short_t), l = msd_analytic(p, long_t);
    return std::pair{fit_loglog_slope(s, 1e-8, 1e-6), fit_loglog_slope(l, 1e6, 1e8)};
  };
  const auto [s1, l1] = slopes(make(0.4, 0.3, 0.4, 1, 1));
  CHECK(s1 > l1);
  const auto [s2, l2] = slopes(make(0.2, 0.3, 0.5, 1, 1));
  CHECK(s2 < l2);
}

TEST_CASE("fit_loglog_slope") {
  std::vector<std::pair<double, double>> pts;
  for (double t : geometric_grid(1e-3, 1e5, 17)) pts.emplace_back(t, 3.0 * std::pow(t, 0.7));
  CHECK(std::abs(fit_loglog_slope(pts, 1e-3, 1e5) - 0.7) < 1e-12);
  CHECK(std::abs(fit_loglog_slope(pts, 1e-1, 1e2) - 0.7) < 1e-12);
  pts[3].second = -1.0;
  CHECK_THROWS(fit_loglog_slope(pts, 1e-3, 1e5));
  CHECK_THROWS(fit_loglog_slope(pts, 1e6, 1e7));
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cimclg/contour.hpp"
#include "cimclg/errors.hpp"

using namespace cimclg;
constexpr double kPi = std::numbers::pi;

namespace {

ContourConfig cfg_of(double Lambda, std::size_t N, double t0 = 0.01) {
  ContourConfig c;
  c.Lambda = Lambda;
  c.N = N;
  c.t0 = t0;
  return c;
}

// Algorithm-1 objective written out from the formulas, independent of the library.
double objective_ref(const ContourConfig& c, double rho) {
  const double d = std::min(c.alpha_tilde, kPi / 2 - c.alpha_tilde - c.delta_prime);
  const double a = std::acosh(c.Lambda / ((1 - rho) * std::sin(c.alpha_tilde - d)));
  const double en = std::exp(-2 * kPi * d * static_cast<double>(c.N) / a);
  return (1 - rho) * c.eps_machine + rho * en / (1 - en);
}

}  // namespace

TEST_CASE("strip half-width") {
  ContourConfig c;
  CHECK(strip_half_width(c) == doctest::Approx(kPi / 8).epsilon(1e-15));
  c.alpha_tilde = kPi / 6;
  c.delta_prime = kPi / 6;
  CHECK(strip_half_width(c) == doctest::Approx(kPi / 6).epsilon(1e-15));
  c.alpha_tilde = 0.4;
  c.delta_prime = 1.0;
  CHECK(strip_half_width(c) == doctest::Approx(kPi / 2 - 1.4).epsilon(1e-14));
  CHECK(strip_half_width(c) == doctest::Approx(0.1708).epsilon(1e-3));
  c.delta_prime = kPi / 2 - 0.4;
  CHECK_THROWS_AS(strip_half_width(c), ConfigError);
}

TEST_CASE("a(rho) closed form and monotonicity") {
  const auto c = cfg_of(150, 50);
  const double expect = std::acosh(150.0 / (0.5 * std::sin(kPi / 8)));
  CHECK(a_of_rho(c, 0.5) == doctest::Approx(expect).epsilon(1e-15));
  CHECK(a_of_rho(c, 0.5) == doctest::Approx(7.357).epsilon(1e-3));
  double prev = 0.0;
  for (int j = 1; j < 1000; ++j) {
    const double r = j / 1000.0;
    const double a = a_of_rho(c, r);
    CHECK(a > prev);
    CHECK(eps_N(c, r) >= (j > 1 ? eps_N(c, (j - 1) / 1000.0) : 0.0));
    prev = a;
  }
}

TEST_CASE("optimal rho is the grid argmin of the objective") {
  const auto c = cfg_of(10, 30);
  const double rs = optimal_rho(c);
  const double best = objective_ref(c, rs);
  for (std::size_t j = 1; j < c.rho_grid; ++j) {
    const double r = static_cast<double>(j) / static_cast<double>(c.rho_grid);
    CHECK(best <= objective_ref(c, r) * (1 + 1e-12));
  }
  const auto plan = build_plan(c);
  CHECK(plan.rho_star == rs);
  CHECK(plan.predicted_error == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("prose objective selects a different minimiser") {
  auto c = cfg_of(10, 30);
  c.objective = RhoObjective::Prose;
  const double rs = optimal_rho(c);
  for (std::size_t j = 1; j < c.rho_grid; j += 7) {
    const double r = static_cast<double>(j) / static_cast<double>(c.rho_grid);
    CHECK(rho_objective_value(c, rs) <= rho_objective_value(c, r));
  }
}

TEST_CASE("plan scalars, node geometry and determinism") {
  const auto c = cfg_of(150, 50);
  const auto p = build_plan(c);
  CHECK(p.d == doctest::Approx(kPi / 8).epsilon(1e-15));
  CHECK(p.tau == doctest::Approx(p.a_rho / 50).epsilon(1e-15));
  CHECK(p.mu == doctest::Approx(2 * kPi * p.d * 50 * (1 - p.rho_star) / (0.01 * 150 * p.a_rho)).epsilon(1e-14));
  REQUIRE(p.nodes.size() == 50);
  CHECK(p.nodes[0].z.imag() == doctest::Approx(p.mu * std::cos(c.alpha_tilde) * std::sinh(p.tau / 2)).epsilon(1e-14));
  const double s = std::sin(c.alpha_tilde), co = std::cos(c.alpha_tilde);
  for (std::size_t k = 0; k < p.nodes.size(); ++k) {
    const cplx z = p.nodes[k].z;
    CHECK(z.imag() > 0.0);
    const double x = (z.real() / p.mu - 1) / s, y = z.imag() / p.mu / co;
    CHECK(std::abs(x * x - y * y - 1) < 1e-12 * (1 + x * x));
    const double phi = (static_cast<double>(k) + 0.5) * p.tau;
    const cplx zp = cplx(0, p.mu) * (co * std::cosh(phi) + cplx(0, 1) * s * std::sinh(phi));
    CHECK(std::abs(p.nodes[k].dz - zp) < 1e-12 * std::abs(zp));
    if (k > 0) CHECK(z.real() < p.nodes[k - 1].z.real());
  }
  const auto q = build_plan(c);
  for (std::size_t k = 0; k < p.nodes.size(); ++k) CHECK(q.nodes[k].z == p.nodes[k].z);
}

TEST_CASE("doubling N squares the quadrature term at fixed rho") {
  const auto c1 = cfg_of(150, 20), c2 = cfg_of(150, 40);
  const auto p1 = build_plan(c1);
  const double e1 = eps_N(c1, p1.rho_star);
  CHECK(eps_N(c2, p1.rho_star) == doctest::Approx(e1 * e1).epsilon(1e-12));
  const auto p2 = build_plan(c2);
  CHECK(p2.predicted_error <= objective_ref(c2, p1.rho_star) * (1 + 1e-12));
  CHECK(p2.predicted_error < p1.predicted_error);
}

TEST_CASE("manual rho override and invalid configs") {
  auto c = cfg_of(150, 50);
  c.rho = 0.3;
  CHECK(build_plan(c).rho_star == 0.3);
  auto bad = cfg_of(0.5, 50);
  CHECK_THROWS_AS(build_plan(bad), ConfigError);
  auto small = cfg_of(150, 1);
  CHECK_THROWS_AS(build_plan(small), ConfigError);
}

TEST_CASE("scalar inversion reaches machine precision at N=50") {
  const auto p = build_plan(cfg_of(150, 50));
  auto F = [](cplx z) { return 1.0 / (z + 1.0); };
  CHECK(std::abs(invert_scalar(p, F, 0.5) - std::exp(-0.5)) < 1e-14);
  // Across the whole window the error still decays geometrically in N.
  double prev = 1.0;
  for (std::size_t N : {30u, 40u, 50u, 60u}) {
    const auto q = build_plan(cfg_of(150, N));
    double worst = 0.0;
    for (double t = 0.01; t <= 1.5; t *= 1.1) worst = std::max(worst, std::abs(invert_scalar(q, F, t) - std::exp(-t)));
    CHECK(worst < prev / 10);
    prev = worst;
  }
  CHECK(prev < 1e-10);
}

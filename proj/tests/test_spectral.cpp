#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cimclg/spectral.hpp"

using namespace cimclg;
constexpr double kPi = std::numbers::pi;

namespace {

// Independent Legendre evaluation (Bonnet) with derivatives.
void legendre_ref(std::size_t n, double x, std::vector<double>& P, std::vector<double>& dP) {
  P.assign(n + 1, 0.0);
  dP.assign(n + 1, 0.0);
  P[0] = 1.0;
  if (n >= 1) {
    P[1] = x;
    dP[1] = 1.0;
  }
  for (std::size_t k = 1; k < n; ++k) {
    P[k + 1] = ((2.0 * k + 1) * x * P[k] - k * P[k - 1]) / (k + 1.0);
    dP[k + 1] = dP[k - 1] + (2.0 * k + 1) * P[k];
  }
}

double phi(std::size_t l, double x, bool derivative = false) {
  std::vector<double> P, dP;
  legendre_ref(l + 2, x, P, dP);
  const double c = 1.0 / std::sqrt(4.0 * l + 6.0);
  return derivative ? c * (dP[l] - dP[l + 2]) : c * (P[l] - P[l + 2]);
}

double cheb_T(std::size_t n, double x) { return std::cos(n * std::acos(std::clamp(x, -1.0, 1.0))); }

std::vector<double> random_vec(std::size_t n, unsigned seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = u(g);
  return v;
}

}  // namespace

TEST_CASE("CGL nodes") {
  const auto x = cgl_nodes(4);
  const double r = std::sqrt(2.0) / 2;
  const double expect[] = {1, r, 0, -r, -1};
  for (int j = 0; j < 5; ++j) CHECK(x[j] == doctest::Approx(expect[j]).epsilon(1e-15));
  CHECK(x[2] == 0.0);
  for (std::size_t M : {5u, 8u, 17u, 64u}) {
    const auto y = cgl_nodes(M);
    for (std::size_t j = 0; j <= M; ++j) CHECK(y[j] == -y[M - j]);
  }
  CHECK(cgl_nodes(8)[1] == doctest::Approx(0.9238795325112867).epsilon(1e-15));
}

TEST_CASE("Chebyshev coefficients of simple data") {
  for (std::size_t M : {4u, 8u, 16u, 32u}) {
    const SpectralSpace1D s(M);
    const auto c1 = s.cheb_coeffs(std::vector<double>(M + 1, 1.0));
    CHECK(c1[0] == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t k = 1; k <= M; ++k) CHECK(std::abs(c1[k]) < 1e-14);
    std::vector<double> t2;
    for (double x : s.nodes()) t2.push_back(2 * x * x - 1);
    const auto c2 = s.cheb_coeffs(t2);
    for (std::size_t k = 0; k <= M; ++k) CHECK(std::abs(c2[k] - (k == 2 ? 1.0 : 0.0)) < 1e-14);
  }
}

TEST_CASE("fast Chebyshev transform agrees with direct sums for M <= 64") {
  for (std::size_t M = 4; M <= 64; ++M) {
    const SpectralSpace1D s(M);
    CHECK(s.uses_fast_transform() == (M >= 16));
    const auto v = random_vec(M + 1, static_cast<unsigned>(M));
    const auto a = s.cheb_coeffs(v), b = s.cheb_coeffs_direct(v);
    const auto sa = s.cheb_synthesis(v), sb = s.cheb_synthesis_direct(v);
    for (std::size_t k = 0; k <= M; ++k) {
      CHECK(std::abs(a[k] - b[k]) < 1e-12);
      CHECK(std::abs(sa[k] - sb[k]) < 1e-12);
    }
    const auto back = s.cheb_synthesis(a);
    for (std::size_t k = 0; k <= M; ++k) CHECK(std::abs(back[k] - v[k]) < 1e-12);
  }
}

TEST_CASE("Chebyshev to Legendre connection") {
  const SpectralSpace1D s(8);
  std::vector<double> t0(9, 0.0), t2(9, 0.0);
  t0[0] = 1;
  t2[2] = 1;
  const auto l0 = s.cheb_to_legendre(t0);
  CHECK(l0[0] == doctest::Approx(1.0));
  for (std::size_t k = 1; k < 9; ++k) CHECK(std::abs(l0[k]) < 1e-15);
  const auto l2 = s.cheb_to_legendre(t2);
  CHECK(l2[0] == doctest::Approx(-1.0 / 3).epsilon(1e-15));
  CHECK(std::abs(l2[1]) < 1e-15);
  CHECK(l2[2] == doctest::Approx(4.0 / 3).epsilon(1e-15));
  for (std::size_t k = 3; k < 9; ++k) CHECK(std::abs(l2[k]) < 1e-15);

  for (std::size_t M : {6u, 20u, 40u}) {
    const SpectralSpace1D sp(M);
    const auto c = random_vec(M + 1, 99);
    const auto leg = sp.cheb_to_legendre(c);
    for (int i = 0; i < 50; ++i) {
      const double x = -1 + 2 * (i + 0.5) / 50;
      std::vector<double> P, dP;
      legendre_ref(M, x, P, dP);
      double vl = 0, vc = 0;
      for (std::size_t n = 0; n <= M; ++n) {
        vl += leg[n] * P[n];
        vc += c[n] * cheb_T(n, x);
      }
      CHECK(std::abs(vl - vc) < 1e-12);
    }
    const auto round = sp.legendre_to_cheb(leg);
    for (std::size_t n = 0; n <= M; ++n) CHECK(std::abs(round[n] - c[n]) < 1e-12);
  }
}

TEST_CASE("mass matrix entries and Gram oracle") {
  const auto m = mass_matrix(12);
  CHECK(m.diag[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(m.off2[0] == doctest::Approx(-0.0436436).epsilon(1e-6));
  CHECK(m.off2[0] == doctest::Approx(-(1 / std::sqrt(6.0)) * (1 / std::sqrt(14.0)) * 0.4).epsilon(1e-15));
  const SpectralSpace1D s(12);
  const auto rule = gauss_legendre(40);
  const auto Md = s.mass_dense();
  for (std::size_t i = 0; i < 11; ++i)
    for (std::size_t j = 0; j < 11; ++j) {
      double g = 0, st = 0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        g += rule.weights[q] * phi(i, rule.nodes[q]) * phi(j, rule.nodes[q]);
        st += rule.weights[q] * phi(i, rule.nodes[q], true) * phi(j, rule.nodes[q], true);
      }
      CHECK(std::abs(Md(i, j) - g) < 1e-13);
      CHECK(std::abs(st - (i == j ? 1.0 : 0.0)) < 1e-12);
      if ((i + j) % 2 == 1) CHECK(Md(i, j) == 0.0);
      if (i > j + 2 || j > i + 2) CHECK(Md(i, j) == 0.0);
    }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Md);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK((Md - Md.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stiffness is the identity up to M=16") {
  const auto rule = gauss_legendre(30);
  for (std::size_t i = 0; i < 15; ++i)
    for (std::size_t j = i; j < 15; ++j) {
      double st = 0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        st += rule.weights[q] * phi(i, rule.nodes[q], true) * phi(j, rule.nodes[q], true);
      CHECK(std::abs(st - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("load vector against quadrature") {
  const SpectralSpace1D s(16);
  const auto z = s.load_vector(std::vector<double>(17, 0.0));
  for (double v : z) CHECK(v == 0.0);

  std::vector<double> u0;
  for (double x : s.nodes()) u0.push_back(phi(0, x));
  const auto l0 = s.load_vector(u0);
  const auto m = mass_matrix(16);
  CHECK(l0[0] == doctest::Approx(m.diag[0]).epsilon(1e-13));
  CHECK(l0[2] == doctest::Approx(m.off2[0]).epsilon(1e-13));
  for (std::size_t l = 0; l < l0.size(); ++l)
    if (l != 0 && l != 2) CHECK(std::abs(l0[l]) < 1e-14);

  std::vector<double> us;
  for (double x : s.nodes()) us.push_back(std::sin(kPi * x));
  const auto ls = s.load_vector(us);
  for (std::size_t l = 0; l < ls.size(); ++l) {
    const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) { return std::sin(kPi * x) * phi(l, x); }, -1.0, 1.0, 15, 1e-14);
    CHECK(std::abs(ls[l] - ref) < 1e-10);
  }
}

TEST_CASE("basis evaluation and Galerkin round trip") {
  const SpectralSpace1D s(10);
  const auto zero = s.evaluate_basis(std::vector<double>(9, 0.0));
  for (double v : zero) CHECK(v == 0.0);
  std::vector<double> e0(9, 0.0);
  e0[0] = 1;
  const auto v0 = s.evaluate_basis(e0);
  for (std::size_t j = 0; j < v0.size(); ++j) {
    const double x = s.nodes()[j];
    CHECK(std::abs(v0[j] - (1 / std::sqrt(6.0)) * 1.5 * (1 - x * x)) < 1e-15);
  }
  // u = (1-x^2) q(x), deg u = 10: inside the space, so projection is exact.
  std::vector<double> u;
  for (double x : s.nodes()) u.push_back((1 - x * x) * (0.3 + x - 2 * std::pow(x, 5) + 0.7 * std::pow(x, 8)));
  const auto load = s.load_vector(u);
  const Eigen::VectorXd c = s.mass_dense().ldlt().solve(Eigen::Map<const Eigen::VectorXd>(load.data(), 9));
  const auto back = s.evaluate_basis(std::vector<double>(c.data(), c.data() + 9));
  for (std::size_t j = 0; j < u.size(); ++j) CHECK(std::abs(back[j] - u[j]) < 1e-12);
}

TEST_CASE("Parseval through Legendre coefficients") {
  const SpectralSpace1D s(14);
  const auto c = random_vec(13, 5);
  const auto leg = s.basis_to_legendre(c);
  double parseval = 0;
  for (std::size_t n = 0; n < leg.size(); ++n) parseval += leg[n] * leg[n] * 2.0 / (2.0 * n + 1);
  const auto rule = gauss_legendre(30);
  const auto v = s.evaluate_basis_at(c, rule.nodes);
  double quad = 0;
  for (std::size_t q = 0; q < v.size(); ++q) quad += rule.weights[q] * v[q] * v[q];
  CHECK(std::abs(parseval - quad) < 1e-10);
}

TEST_CASE("mass eigendecomposition") {
  for (std::size_t M : {4u, 8u, 12u}) {
    const SpectralSpace2D s2{SpectralSpace1D(M)};
    const auto& Q = s2.eig_vecs();
    const auto n = static_cast<Eigen::Index>(M - 1);
    CHECK((Q * Q.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s2.eig_vals().minCoeff() > 0.0);
    if (M == 8) {
      // General (non-symmetric) eigen solver as an independent route.
      Eigen::EigenSolver<Eigen::MatrixXd> es(s2.base().mass_dense());
      std::vector<double> ref;
      for (Eigen::Index i = 0; i < n; ++i) ref.push_back(es.eigenvalues()[i].real());
      std::vector<double> got(s2.eig_vals().data(), s2.eig_vals().data() + n);
      std::sort(ref.begin(), ref.end());
      std::sort(got.begin(), got.end());
      for (Eigen::Index i = 0; i < n; ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-11);
    }
  }
}

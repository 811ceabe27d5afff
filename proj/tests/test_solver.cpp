#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "cimclg/errors.hpp"
#include "cimclg/presets.hpp"
#include "cimclg/solver.hpp"

using namespace cimclg;
constexpr double kPi = std::numbers::pi;

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

ContourPlan plan_of(std::size_t N, double t0 = 0.01, double Lambda = 150) {
  ContourConfig c;
  c.N = N;
  c.t0 = t0;
  c.Lambda = Lambda;
  return build_plan(c);
}

}  // namespace

TEST_CASE("pentadiagonal solve against dense LU") {
  std::mt19937_64 g(11);
  std::normal_distribution<double> n;
  for (std::size_t M : {4u, 5u, 8u, 13u, 16u}) {
    const SpectralSpace1D s(M);
    const auto dim = static_cast<Eigen::Index>(s.dim());
    for (int trial = 0; trial < 20; ++trial) {
      const cplx k1(n(g), n(g)), k2(1.0 + std::abs(n(g)), n(g));
      std::vector<cplx> rhs(s.dim()), x(s.dim());
      for (auto& r : rhs) r = {n(g), n(g)};
      const double res = solve_pentadiagonal(s, k1, k2, rhs, x);
      CHECK(res < 1e-13);
      const Eigen::MatrixXcd A = k1 * s.mass_dense().cast<cplx>() + k2 * Eigen::MatrixXcd::Identity(dim, dim);
      const Eigen::VectorXcd ref = A.partialPivLu().solve(Eigen::Map<Eigen::VectorXcd>(rhs.data(), dim));
      for (Eigen::Index i = 0; i < dim; ++i) CHECK(std::abs(x[i] - ref[i]) < 1e-12 * (1 + std::abs(ref[i])));
    }
  }
}

TEST_CASE("zero data gives zero Laplace-domain solutions") {
  const SpectralSpace1D s(8);
  const SymbolSet sym(make(0.5, 0.35, 0.45, 1, 1));
  const LaplaceSourceSpec empty;
  for (auto v : solve_node_1d(s, sym, cplx(1, 2), empty)) CHECK(v == cplx(0.0));
  const SpectralSpace2D s2{SpectralSpace1D(6)};
  CHECK(solve_node_2d(s2, sym, cplx(1, 2), empty).cwiseAbs().maxCoeff() == 0.0);
  CHECK(solve_node_scalar(sym, cplx(1, 2), 1.5, ScalarSource{}) == cplx(0.0));
}

TEST_CASE("2D eigen route against dense Kronecker LU") {
  std::mt19937_64 g(5);
  std::normal_distribution<double> n;
  const SymbolSet sym(make(0.25, 0.1, 0.25, 10, 10));
  const auto plan = plan_of(20);
  for (std::size_t M : {4u, 6u, 8u}) {
    const SpectralSpace2D s2{SpectralSpace1D(M)};
    const std::size_t np = M + 1;
    LaplaceSourceSpec src;
    src.p0.resize(np * np);
    for (auto& v : src.p0) v = n(g);
    const auto Md = s2.base().mass_dense();
    const auto m = static_cast<Eigen::Index>(M - 1);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
    Eigen::MatrixXd F(np, np);
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t j = 0; j < np; ++j) F(i, j) = src.p0[i * np + j];
    const Eigen::MatrixXd L = s2.load_matrix(F);
    for (std::size_t k = 0; k < plan.nodes.size(); k += 3) {
      const cplx z = plan.nodes[k].z;
      const auto P = solve_node_2d(s2, sym, z, src);
      const Eigen::MatrixXcd R = sym.initial_coeff(z) * L.cast<cplx>();
      const Eigen::MatrixXcd A = sym.memory_coeff(z) * Eigen::kroneckerProduct(Md, Md).eval().cast<cplx>() +
                                 sym.denominator(z) *
                                     (Eigen::kroneckerProduct(I, Md) + Eigen::kroneckerProduct(Md, I)).eval().cast<cplx>();
      const Eigen::VectorXcd vr = Eigen::Map<const Eigen::VectorXcd>(R.data(), m * m);
      const Eigen::VectorXcd ref = A.partialPivLu().solve(vr);
      const Eigen::Map<const Eigen::VectorXcd> got(P.data(), m * m);
      CHECK((got - ref).cwiseAbs().maxCoeff() < 1e-11 * (1 + ref.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("2D solution of swap-symmetric data is symmetric") {
  const SpectralSpace2D s2{SpectralSpace1D(10)};
  const SymbolSet sym(make(0.5, 0.35, 0.45, 1, 1));
  LaplaceSourceSpec src;
  src.p0 = sample_nodes(s2.base(), [](double x, double y) { return std::exp(-(x * x + y * y)) * (1 + x * y); });
  const auto P = solve_node_2d(s2, sym, cplx(3, 7), src);
  CHECK((P - P.transpose()).cwiseAbs().maxCoeff() < 1e-11 * P.cwiseAbs().maxCoeff());
}

TEST_CASE("scalar: classical orders reduce to p' + lambda p = f") {
  const SymbolSet sym(make(1, 1, 1, 2, 2));
  const auto plan = plan_of(60, 0.1, 10);
  ScalarSource src;
  src.p0 = 1.0;
  const double lambda = 1.5;
  std::vector<double> t{0.1, 0.3, 0.7, 1.0};
  const auto v = cim_solve_scalar(plan, sym, lambda, src, t);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(v[i] - std::exp(-lambda * t[i])) < 1e-12);
  // (1 + 2D)(p' + lambda p) = (1 + 2D) 1, so p' + lambda p = 1 and
  // p = 1/lambda + (1 - 1/lambda) e^{-lambda t}
  src.f_hat = {{1.0, -1.0}, {2.0, 0.0}};
  const auto w = cim_solve_scalar(plan, sym, lambda, src, t);
  for (std::size_t i = 0; i < t.size(); ++i)
    CHECK(std::abs(w[i] - (1 / lambda + (1 - 1 / lambda) * std::exp(-lambda * t[i]))) < 1e-12);
}

TEST_CASE("scalar: manufactured solution 1 + t^{4/5}") {
  const auto p = make(0.5, 0.35, 0.45, 1, 100);
  const SymbolSet sym(p);
  ContourConfig c;
  c.t0 = 0.05;
  c.Lambda = 10;
  c.N = 60;
  c.objective = RhoObjective::Prose;
  const auto plan = build_plan(c);
  const auto t = geometric_times(0.05, 10, 20);
  const auto v = cim_solve_scalar(plan, sym, 1.5, example1_source(p, 1.5), t);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(v[i] - example1_exact(t[i])) < 1e-13);
}

TEST_CASE("1D manufactured solution with classical orders") {
  for (double ab : {1.0, 10.0}) {
    const auto p = make(1, 1, 1, ab, ab);
    const SpectralSpace1D s(20);
    const SymbolSet sym(p);
    const auto src = example2_source(s, p, 1.0);
    const double t[] = {0.5};
    const auto sol = cim_solve(plan_of(50), s, sym, src, t);
    double err = 0;
    for (std::size_t j = 0; j < s.nodes().size(); ++j)
      err = std::max(err, std::abs(sol.fields[0][j] - 0.5 * std::sin(kPi * s.nodes()[j])));
    CHECK(err < 1e-10);
  }
}

TEST_CASE("1D manufactured solution with fractional orders reaches the spectral plateau") {
  const auto p = make(0.5, 0.35, 0.45, 1, 1000);
  const SpectralSpace1D s(20);
  const SymbolSet sym(p);
  const auto src = example2_source(s, p, 0.8);
  const double t[] = {0.5};
  for (std::size_t N : {40u, 60u}) {
    const auto sol = cim_solve(plan_of(N), s, sym, src, t);
    const double e = l2_error_1d(s, sol.coeffs[0], [](double x) { return example2_exact(0.8, 0.5, x); });
    CHECK(e < 1e-10);
  }
}

TEST_CASE("solution invariants: real, finite, zero on the boundary, small residuals") {
  const auto p = make(0.25, 0.1, 0.25, 10, 10);
  const SpectralSpace1D s(16);
  const SymbolSet sym(p);
  const auto src = example3_source(s);
  const auto t = geometric_times(0.01, 150, 7);
  const auto sol = cim_solve(plan_of(30), s, sym, src, t);
  for (const auto& f : sol.fields) {
    for (double v : f) CHECK(std::isfinite(v));
    CHECK(std::abs(f.front()) < 1e-12);
    CHECK(std::abs(f.back()) < 1e-12);
  }
  for (double r : sol.residuals) CHECK(r < 1e-11);

  const SpectralSpace2D s2{SpectralSpace1D(8)};
  const auto sol2 = cim_solve(plan_of(30), s2, sym, example4_source(s2.base()), t);
  const std::size_t np = 9;
  for (const auto& f : sol2.fields)
    for (std::size_t i = 0; i < np; ++i) {
      CHECK(std::abs(f[i * np]) < 1e-12);
      CHECK(std::abs(f[i * np + np - 1]) < 1e-12);
      CHECK(std::abs(f[i]) < 1e-12);
      CHECK(std::abs(f[(np - 1) * np + i]) < 1e-12);
    }
}

TEST_CASE("2D solve equals the tensor product of 1D solves for the heat case") {
  const auto p = make(1, 1, 1, 3, 3);
  const SymbolSet sym(p);
  const std::size_t M = 16;
  const SpectralSpace1D s(M);
  const SpectralSpace2D s2{SpectralSpace1D(M)};
  auto g = [](double x) { return (1 - x * x) * std::exp(x); };
  LaplaceSourceSpec src1;
  src1.p0 = sample_nodes(s, std::function<double(double)>(g));
  LaplaceSourceSpec src2;
  src2.p0 = sample_nodes(s, std::function<double(double, double)>([&](double x, double y) { return g(x) * g(y); }));
  const double t[] = {0.05, 0.2, 0.5};
  const auto plan = plan_of(60, 0.01, 50);
  const auto a = cim_solve(plan, s, sym, src1, t);
  const auto b = cim_solve(plan, s2, sym, src2, t);
  const std::size_t np = M + 1;
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t j = 0; j < np; ++j)
        CHECK(std::abs(b.fields[k][i * np + j] - a.fields[k][i] * a.fields[k][j]) < 1e-9);
}

TEST_CASE("worker count does not change results") {
  const auto p = make(0.5, 0.35, 0.45, 10, 10);
  const SymbolSet sym(p);
  const SpectralSpace1D s(24);
  const auto src = example3_source(s);
  const auto t = geometric_times(0.01, 150, 5);
  const auto plan = plan_of(50);
  const auto one = cim_solve(plan, s, sym, src, t, 1);
  for (std::size_t w : {2u, 3u, 7u}) {
    const auto many = cim_solve(plan, s, sym, src, t, w);
    CHECK(many.fields == one.fields);
    CHECK(many.coeffs == one.coeffs);
  }
  const SpectralSpace2D s2{SpectralSpace1D(8)};
  const auto src2 = example4_source(s2.base());
  CHECK(cim_solve(plan, s2, sym, src2, t, 1).fields == cim_solve(plan, s2, sym, src2, t, 4).fields);
}

TEST_CASE("time window checks") {
  const auto plan = plan_of(20);
  const SpectralSpace1D s(8);
  const SymbolSet sym(make(0.5, 0.35, 0.45, 1, 1));
  const double bad[] = {2.0};
  CHECK_THROWS_AS(cim_solve(plan, s, sym, LaplaceSourceSpec{}, bad), ConfigError);
  const auto tt = geometric_times(0.01, 150, 4);
  CHECK(tt.front() == 0.01);
  CHECK(tt.back() == doctest::Approx(1.5).epsilon(1e-15));
}

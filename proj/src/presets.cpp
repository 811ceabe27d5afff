#include "cimclg/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cimclg/errors.hpp"

namespace cimclg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kQuadExtra = 8;
constexpr std::size_t kLinfPoints1D = 512;
constexpr std::size_t kLinfPoints2D = 512;

std::vector<double> uniform_grid(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

Eigen::Map<const Eigen::MatrixXd> as_matrix(std::span<const double> c, const SpectralSpace2D& s) {
  const auto m = static_cast<Eigen::Index>(s.dim());
  if (c.size() != s.dim() * s.dim()) throw ShapeError("2D coefficients have the wrong size");
  return {c.data(), m, m};
}

}  // namespace

double monomials_in_time(std::span<const LaplaceMonomial> terms, double t) {
  double s = 0.0;
  for (const auto& m : terms) {
    if (!(m.power < 0.0)) throw DomainError("monomials_in_time needs negative powers");
    s += m.coeff * std::pow(t, -m.power - 1.0) / gamma_fn(-m.power);
  }
  return s;
}

ScalarSource example1_source(const JeffreysParams& p, double lambda) {
  if (!p.minor_alpha.empty() || !p.minor_beta.empty())
    throw ConfigError("example1 preset supports K = J = 0 only");
  // P(z) = 1/z + G z^{-9/5}; f = z^{gamma-1} N (z P - 1) + lambda D P.
  const double G = gamma_fn(1.8);
  ScalarSource s;
  s.p0 = 1.0;
  s.f_hat = {
      {G, p.gamma - 1.8},
      {G * p.a, p.alpha + p.gamma - 1.8},
      {lambda, -1.0},
      {lambda * G, -1.8},
      {lambda * p.b, p.beta - 1.0},
      {lambda * p.b * G, p.beta - 1.8},
  };
  return s;
}

double example1_exact(double t) { return 1.0 + std::pow(t, 0.8); }

double example1_forcing(const JeffreysParams& p, double lambda, double t) {
  const double G = gamma_fn(1.8);
  const double al = p.alpha, be = p.beta, ga = p.gamma;
  return lambda * (1.0 + std::pow(t, 0.8) + p.b * std::pow(t, -be) / gamma_fn(1.0 - be) +
                   p.b * G * std::pow(t, 0.8 - be) / gamma_fn(1.8 - be)) +
         G * (std::pow(t, 0.8 - ga) / gamma_fn(1.8 - ga) + p.a * std::pow(t, 0.8 - al - ga) / gamma_fn(1.8 - al - ga));
}

LaplaceSourceSpec example2_source(const SpectralSpace1D& space, const JeffreysParams& p, double kappa) {
  if (!(kappa > 0.0)) throw ConfigError("example2 needs kappa > 0");
  // P(z) = G z^{-kappa-1}, p0 = 0:  f = (z^gamma N + pi^2 D) P.
  const double G = gamma_fn(kappa + 1.0);
  const double s = -kappa - 1.0;
  SeparableTerm term;
  term.time = {{G, p.gamma + s}, {G * p.a, p.alpha + p.gamma + s}};
  for (const auto& m : p.minor_alpha) term.time.push_back({G * m.coeff, m.order + p.gamma + s});
  term.time.push_back({kPi * kPi * G, s});
  term.time.push_back({kPi * kPi * G * p.b, p.beta + s});
  for (const auto& m : p.minor_beta) term.time.push_back({kPi * kPi * G * m.coeff, m.order + s});
  term.spatial = sample_nodes(space, [](double x) { return std::sin(kPi * x); });
  LaplaceSourceSpec spec;
  spec.terms.push_back(std::move(term));
  return spec;
}

double example2_exact(double kappa, double t, double x) { return std::pow(t, kappa) * std::sin(kPi * x); }

double example2_forcing(const JeffreysParams& p, double kappa, double t, double x) {
  const double G = gamma_fn(kappa + 1.0);
  const double al = p.alpha, be = p.beta, ga = p.gamma;
  auto rl = [&](double order) {
    // I^{...} / D^{...} of t^kappa landing on t^{kappa - order}.
    const double e = kappa - order;
    if (e + 1.0 <= 0.0) return 0.0;  // Gamma pole: the term vanishes identically
    return G * std::pow(t, e) / gamma_fn(e + 1.0);
  };
  return std::sin(kPi * x) * (rl(ga) + p.a * rl(al + ga) + kPi * kPi * (std::pow(t, kappa) + p.b * rl(be)));
}

double example3_initial(double x) { return std::exp(-30.0 * x * x); }

double example4_initial(double x, double y) {
  return -1.0 / (kPi * kPi * kPi) / (0.75 + 0.3 * std::cos(kPi * x)) / (0.75 + 0.3 * std::sin(kPi * y)) *
         std::exp(-10.0 * x * y);
}

LaplaceSourceSpec example3_source(const SpectralSpace1D& space) {
  LaplaceSourceSpec s;
  s.p0 = sample_nodes(space, std::function<double(double)>(example3_initial));
  return s;
}

LaplaceSourceSpec example4_source(const SpectralSpace1D& space) {
  LaplaceSourceSpec s;
  s.p0 = sample_nodes(space, std::function<double(double, double)>(example4_initial));
  return s;
}

std::vector<double> sample_nodes(const SpectralSpace1D& space, const std::function<double(double)>& f) {
  std::vector<double> v;
  v.reserve(space.nodes().size());
  for (double x : space.nodes()) v.push_back(f(x));
  return v;
}

std::vector<double> sample_nodes(const SpectralSpace1D& space, const std::function<double(double, double)>& f) {
  const auto& x = space.nodes();
  std::vector<double> v;
  v.reserve(x.size() * x.size());
  for (double xi : x)
    for (double yj : x) v.push_back(f(xi, yj));
  return v;
}

double l2_error_1d(const SpectralSpace1D& space, std::span<const double> coeffs,
                   const std::function<double(double)>& exact) {
  const auto rule = gauss_legendre(space.degree() + kQuadExtra);
  const auto u = space.evaluate_basis_at(coeffs, rule.nodes);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double e = u[i] - exact(rule.nodes[i]);
    s += rule.weights[i] * e * e;
  }
  return std::sqrt(s);
}

double linf_error_1d(const SpectralSpace1D& space, std::span<const double> coeffs,
                     const std::function<double(double)>& exact) {
  const auto x = uniform_grid(kLinfPoints1D);
  const auto u = space.evaluate_basis_at(coeffs, x);
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(u[i] - exact(x[i])));
  return m;
}

double l2_error_2d(const SpectralSpace2D& space, std::span<const double> coeffs,
                   const std::function<double(double, double)>& exact) {
  const auto rule = gauss_legendre(space.base().degree() + kQuadExtra);
  const Eigen::MatrixXd U = space.evaluate_basis_at(as_matrix(coeffs, space), rule.nodes, rule.nodes);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double e = U(i, j) - exact(rule.nodes[i], rule.nodes[j]);
      s += rule.weights[i] * rule.weights[j] * e * e;
    }
  return std::sqrt(s);
}

double linf_error_2d(const SpectralSpace2D& space, std::span<const double> coeffs,
                     const std::function<double(double, double)>& exact) {
  const auto x = uniform_grid(kLinfPoints2D);
  const Eigen::MatrixXd U = space.evaluate_basis_at(as_matrix(coeffs, space), x, x);
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) m = std::max(m, std::abs(U(i, j) - exact(x[i], x[j])));
  return m;
}

double l2_distance_1d(const SpectralSpace1D& a, std::span<const double> ca, const SpectralSpace1D& b,
                      std::span<const double> cb) {
  if (a.degree() == b.degree()) {
    if (ca.size() != a.dim() || cb.size() != b.dim()) throw ShapeError("l2_distance_1d: size mismatch");
    const Eigen::Map<const Eigen::VectorXd> x(ca.data(), ca.size()), y(cb.data(), cb.size());
    const Eigen::VectorXd d = x - y;
    return std::sqrt(std::max(0.0, d.dot(a.mass_dense() * d)));
  }
  const auto rule = gauss_legendre(std::max(a.degree(), b.degree()) + kQuadExtra);
  const auto u = a.evaluate_basis_at(ca, rule.nodes);
  const auto v = b.evaluate_basis_at(cb, rule.nodes);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += rule.weights[i] * (u[i] - v[i]) * (u[i] - v[i]);
  return std::sqrt(s);
}

double linf_distance_1d(const SpectralSpace1D& a, std::span<const double> ca, const SpectralSpace1D& b,
                        std::span<const double> cb) {
  const auto x = uniform_grid(kLinfPoints1D);
  const auto u = a.evaluate_basis_at(ca, x);
  const auto v = b.evaluate_basis_at(cb, x);
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(u[i] - v[i]));
  return m;
}

double l2_distance_2d(const SpectralSpace2D& a, std::span<const double> ca, const SpectralSpace2D& b,
                      std::span<const double> cb) {
  if (a.dim() == b.dim()) {
    const Eigen::MatrixXd D = as_matrix(ca, a) - as_matrix(cb, b);
    const Eigen::MatrixXd Md = a.base().mass_dense();
    return std::sqrt(std::max(0.0, (D.cwiseProduct(Md * D * Md)).sum()));
  }
  const auto rule = gauss_legendre(std::max(a.base().degree(), b.base().degree()) + kQuadExtra);
  const Eigen::MatrixXd U = a.evaluate_basis_at(as_matrix(ca, a), rule.nodes, rule.nodes);
  const Eigen::MatrixXd V = b.evaluate_basis_at(as_matrix(cb, b), rule.nodes, rule.nodes);
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), rule.weights.size());
  const Eigen::MatrixXd E = (U - V).cwiseAbs2();
  return std::sqrt(w.dot(E * w));
}

double linf_distance_2d(const SpectralSpace2D& a, std::span<const double> ca, const SpectralSpace2D& b,
                        std::span<const double> cb) {
  const auto x = uniform_grid(kLinfPoints2D);
  const Eigen::MatrixXd U = a.evaluate_basis_at(as_matrix(ca, a), x, x);
  const Eigen::MatrixXd V = b.evaluate_basis_at(as_matrix(cb, b), x, x);
  return (U - V).cwiseAbs().maxCoeff();
}

}  // namespace cimclg

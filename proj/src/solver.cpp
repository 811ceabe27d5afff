#include "cimclg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cimclg/errors.hpp"
#include "parallel.hpp"

namespace cimclg {

namespace {

constexpr double kResidualTol = 1e-11;

double inf_norm(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

Eigen::MatrixXd samples_as_matrix(const std::vector<double>& flat, std::size_t n) {
  if (flat.size() != n * n)
    throw ShapeError("2D samples: expected " + std::to_string(n * n) + " values, got " +
                     std::to_string(flat.size()));
  return RowMajorMap(flat.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

void check_finite(cplx v, std::size_t node, const char* what) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NodeFailure(node, std::string(what) + " is not finite");
}

}  // namespace

cplx eval_monomials(std::span<const LaplaceMonomial> terms, cplx z) {
  cplx s = 0.0;
  for (const auto& m : terms) s += m.coeff * principal_pow(z, m.power);
  return s;
}

LaplaceMonomial power_law(double kappa, double scale) {
  if (!(kappa > -1.0)) throw DomainError("power_law needs kappa > -1");
  return {scale * gamma_fn(kappa + 1.0), -kappa - 1.0};
}

void require_times_in_window(const ContourPlan& plan, std::span<const double> times) {
  const double lo = plan.t0 * (1.0 - 1e-12), hi = plan.Lambda * plan.t0 * (1.0 + 1e-12);
  for (double t : times)
    if (!(t >= lo && t <= hi))
      throw ConfigError("query time " + std::to_string(t) + " outside [t0, Lambda t0] = [" +
                        std::to_string(plan.t0) + ", " + std::to_string(plan.Lambda * plan.t0) + "]");
}

std::vector<double> geometric_times(double t0, double Lambda, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {t0};
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i)
    t[i] = t0 * std::pow(Lambda, static_cast<double>(i) / static_cast<double>(n - 1));
  t.back() = t0 * Lambda;
  return t;
}

AssembledSource1D assemble_source(const SpectralSpace1D& space, const LaplaceSourceSpec& source) {
  AssembledSource1D a;
  a.spec = &source;
  if (source.p0.empty())
    a.p0_load.assign(space.dim(), 0.0);
  else
    a.p0_load = space.load_vector(std::span<const double>(source.p0));
  for (const auto& term : source.terms) a.term_loads.push_back(space.load_vector(std::span<const double>(term.spatial)));
  return a;
}

AssembledSource2D assemble_source(const SpectralSpace2D& space, const LaplaceSourceSpec& source) {
  const std::size_t n = space.base().degree() + 1;
  const auto m = static_cast<Eigen::Index>(space.dim());
  AssembledSource2D a;
  a.spec = &source;
  a.p0_load = source.p0.empty() ? Eigen::MatrixXd::Zero(m, m) : space.load_matrix(samples_as_matrix(source.p0, n));
  for (const auto& term : source.terms) a.term_loads.push_back(space.load_matrix(samples_as_matrix(term.spatial, n)));
  return a;
}

double solve_pentadiagonal(const SpectralSpace1D& space, cplx k1, cplx k2, std::span<const cplx> rhs,
                           std::span<cplx> x) {
  const std::size_t n = space.dim();
  if (rhs.size() != n || x.size() != n) throw ShapeError("solve_pentadiagonal: length mismatch");
  const auto& md = space.mass_diag();
  const auto& mo = space.mass_off2();

  std::vector<cplx> c(n), d(n);
  for (std::size_t parity = 0; parity < 2 && parity < n; ++parity) {
    // Forward sweep over l = parity, parity+2, ...
    std::size_t prev = n;
    for (std::size_t l = parity; l < n; l += 2) {
      const cplx diag = k1 * md[l] + k2;
      const cplx upper = (l + 2 < n) ? k1 * mo[l] : cplx(0.0);
      if (prev == n) {
        if (diag == cplx(0.0)) throw SingularityError("zero pivot in pentadiagonal solve");
        c[l] = upper / diag;
        d[l] = rhs[l] / diag;
      } else {
        const cplx lower = k1 * mo[prev];
        const cplx den = diag - lower * c[prev];
        if (den == cplx(0.0)) throw SingularityError("zero pivot in pentadiagonal solve");
        c[l] = upper / den;
        d[l] = (rhs[l] - lower * d[prev]) / den;
      }
      prev = l;
    }
    // Back substitution.
    for (std::size_t l = prev + 2;;) {
      l -= 2;
      x[l] = d[l] - ((l + 2 < n) ? c[l] * x[l + 2] : cplx(0.0));
      if (l < 2) break;
    }
  }

  double res = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    cplx ax = (k1 * md[l] + k2) * x[l];
    if (l + 2 < n) ax += k1 * mo[l] * x[l + 2];
    if (l >= 2) ax += k1 * mo[l - 2] * x[l - 2];
    res = std::max(res, std::abs(ax - rhs[l]));
  }
  const double scale = inf_norm(rhs);
  return scale > 0.0 ? res / scale : res;
}

std::vector<cplx> solve_node_1d(const SpectralSpace1D& space, const SymbolSet& symbols, cplx z,
                                const AssembledSource1D& source, double* residual) {
  const std::size_t n = space.dim();
  const cplx k1 = symbols.memory_coeff(z);
  const cplx k2 = symbols.denominator(z);
  const cplx ic = symbols.initial_coeff(z);

  std::vector<cplx> rhs(n);
  for (std::size_t l = 0; l < n; ++l) rhs[l] = ic * source.p0_load[l];
  const auto& spec = *source.spec;
  for (std::size_t i = 0; i < spec.terms.size(); ++i) {
    const cplx T = eval_monomials(spec.terms[i].time, z);
    const auto& L = source.term_loads[i];
    for (std::size_t l = 0; l < n; ++l) rhs[l] += T * L[l];
  }
  if (spec.callback) {
    const auto samples = spec.callback(z);
    const auto L = space.load_vector(std::span<const cplx>(samples));
    for (std::size_t l = 0; l < n; ++l) rhs[l] += L[l];
  }

  std::vector<cplx> x(n);
  const double res = solve_pentadiagonal(space, k1, k2, rhs, x);
  if (residual) *residual = res;
  if (!(res < kResidualTol)) throw SingularityError("pentadiagonal residual " + std::to_string(res) + " too large");
  return x;
}

std::vector<cplx> solve_node_1d(const SpectralSpace1D& space, const SymbolSet& symbols, cplx z,
                                const LaplaceSourceSpec& source) {
  return solve_node_1d(space, symbols, z, assemble_source(space, source));
}

namespace {

Eigen::MatrixXcd solve_node_2d_impl(const SpectralSpace2D& space, const SymbolSet& symbols, cplx z,
                                    const AssembledSource2D& source, double* residual) {
  const auto m = static_cast<Eigen::Index>(space.dim());
  const cplx k1 = symbols.memory_coeff(z);
  const cplx k2 = symbols.denominator(z);
  const cplx ic = symbols.initial_coeff(z);

  Eigen::MatrixXcd R = ic * source.p0_load.cast<cplx>();
  const auto& spec = *source.spec;
  for (std::size_t i = 0; i < spec.terms.size(); ++i)
    R += eval_monomials(spec.terms[i].time, z) * source.term_loads[i].cast<cplx>();
  if (spec.callback) {
    const auto samples = spec.callback(z);
    const std::size_t n = space.base().degree() + 1;
    if (samples.size() != n * n) throw ShapeError("2D source callback returned the wrong number of samples");
    Eigen::MatrixXd re(n, n), im(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        re(i, j) = samples[i * n + j].real();
        im(i, j) = samples[i * n + j].imag();
      }
    R += space.load_matrix(re).cast<cplx>() + cplx(0.0, 1.0) * space.load_matrix(im).cast<cplx>();
  }

  const Eigen::MatrixXd& Q = space.eig_vecs();
  const Eigen::VectorXd& lam = space.eig_vals();
  Eigen::MatrixXcd Rt = Q.transpose() * R * Q;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const cplx s = k1 * lam(i) * lam(j) + k2 * (lam(i) + lam(j));
      if (s == cplx(0.0)) throw SingularityError("zero coefficient in the diagonalised 2D system");
      Rt(i, j) /= s;
    }
  Eigen::MatrixXcd P = Q * Rt * Q.transpose();

  if (residual) {
    const Eigen::MatrixXd Md = space.base().mass_dense();
    const Eigen::MatrixXcd MP = Md * P, PM = P * Md;
    const Eigen::MatrixXcd r = k1 * (MP * Md) + k2 * (MP + PM) - R;
    const double scale = R.cwiseAbs().maxCoeff();
    const double res = r.cwiseAbs().maxCoeff();
    *residual = scale > 0.0 ? res / scale : res;
  }
  return P;
}

}  // namespace

Eigen::MatrixXcd solve_node_2d(const SpectralSpace2D& space, const SymbolSet& symbols, cplx z,
                               const AssembledSource2D& source) {
  return solve_node_2d_impl(space, symbols, z, source, nullptr);
}

Eigen::MatrixXcd solve_node_2d(const SpectralSpace2D& space, const SymbolSet& symbols, cplx z,
                               const LaplaceSourceSpec& source) {
  return solve_node_2d_impl(space, symbols, z, assemble_source(space, source), nullptr);
}

cplx solve_node_scalar(const SymbolSet& symbols, cplx z, double lambda, const ScalarSource& source) {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  cplx num = symbols.initial_coeff(z) * source.p0 + eval_monomials(source.f_hat, z);
  if (source.callback) num += source.callback(z);
  const cplx den = symbols.memory_coeff(z) + lambda * symbols.denominator(z);
  if (den == cplx(0.0)) throw SingularityError("zero denominator in the scalar Laplace solve");
  return num / den;
}

namespace {

// (tau/pi) Im sum_k e^{z_k t} z'_k c_k for every component, accumulated in k order.
std::vector<double> accumulate(const ContourPlan& plan, const std::vector<std::vector<cplx>>& node_values, double t) {
  const std::size_t n = node_values.front().size();
  std::vector<double> acc(n, 0.0);
  for (std::size_t k = 0; k < plan.nodes.size(); ++k) {
    const cplx w = std::exp(plan.nodes[k].z * t) * plan.nodes[k].dz;
    const auto& v = node_values[k];
    for (std::size_t i = 0; i < n; ++i) acc[i] += (w * v[i]).imag();
  }
  const double scale = plan.tau / std::numbers::pi;
  for (auto& a : acc) a *= scale;
  return acc;
}

void check_node_values(const std::vector<cplx>& v, std::size_t node) {
  for (const auto& x : v) check_finite(x, node, "Laplace-domain solution");
}

}  // namespace

CimSolution cim_solve(const ContourPlan& plan, const SpectralSpace1D& space, const SymbolSet& symbols,
                      const LaplaceSourceSpec& source, std::span<const double> times, std::size_t workers) {
  require_times_in_window(plan, times);
  const auto assembled = assemble_source(space, source);
  const std::size_t K = plan.nodes.size();
  std::vector<std::vector<cplx>> hat(K);
  std::vector<double> residuals(K, 0.0);

  detail::parallel_for(K, workers, [&](std::size_t k) {
    try {
      hat[k] = solve_node_1d(space, symbols, plan.nodes[k].z, assembled, &residuals[k]);
    } catch (const NodeFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw NodeFailure(k, e.what());
    }
    check_node_values(hat[k], k);
  });

  CimSolution sol;
  sol.times.assign(times.begin(), times.end());
  sol.residuals = std::move(residuals);
  sol.plan = plan;
  for (double t : times) {
    auto c = accumulate(plan, hat, t);
    sol.fields.push_back(space.evaluate_basis(std::span<const double>(c)));
    sol.coeffs.push_back(std::move(c));
  }
  return sol;
}

CimSolution cim_solve(const ContourPlan& plan, const SpectralSpace2D& space, const SymbolSet& symbols,
                      const LaplaceSourceSpec& source, std::span<const double> times, std::size_t workers) {
  require_times_in_window(plan, times);
  const auto assembled = assemble_source(space, source);
  const std::size_t K = plan.nodes.size();
  const auto m = static_cast<Eigen::Index>(space.dim());
  std::vector<std::vector<cplx>> hat(K);
  std::vector<double> residuals(K, 0.0);

  detail::parallel_for(K, workers, [&](std::size_t k) {
    Eigen::MatrixXcd P;
    try {
      P = solve_node_2d_impl(space, symbols, plan.nodes[k].z, assembled, &residuals[k]);
    } catch (const std::exception& e) {
      throw NodeFailure(k, e.what());
    }
    if (!(residuals[k] < kResidualTol))
      throw NodeFailure(k, "2D residual " + std::to_string(residuals[k]) + " too large");
    hat[k].assign(P.data(), P.data() + P.size());
    check_node_values(hat[k], k);
  });

  CimSolution sol;
  sol.times.assign(times.begin(), times.end());
  sol.residuals = std::move(residuals);
  sol.plan = plan;
  const std::size_t n = space.base().degree() + 1;
  for (double t : times) {
    auto c = accumulate(plan, hat, t);
    const Eigen::Map<const Eigen::MatrixXd> C(c.data(), m, m);
    const Eigen::MatrixXd F = space.evaluate_basis(C);
    std::vector<double> field(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) field[i * n + j] = F(i, j);
    // Homogeneous Dirichlet data: the basis vanishes on the boundary.
    for (std::size_t i = 0; i < n; ++i) {
      field[i] = field[(n - 1) * n + i] = 0.0;
      field[i * n] = field[i * n + n - 1] = 0.0;
    }
    sol.fields.push_back(std::move(field));
    sol.coeffs.push_back(std::move(c));
  }
  return sol;
}

std::vector<double> cim_solve_scalar(const ContourPlan& plan, const SymbolSet& symbols, double lambda,
                                     const ScalarSource& source, std::span<const double> times) {
  require_times_in_window(plan, times);
  std::vector<std::vector<cplx>> hat(plan.nodes.size());
  for (std::size_t k = 0; k < plan.nodes.size(); ++k) {
    cplx v;
    try {
      v = solve_node_scalar(symbols, plan.nodes[k].z, lambda, source);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw NodeFailure(k, e.what());
    }
    check_finite(v, k, "Laplace-domain solution");
    hat[k] = {v};
  }
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(accumulate(plan, hat, t)[0]);
  return out;
}

}  // namespace cimclg

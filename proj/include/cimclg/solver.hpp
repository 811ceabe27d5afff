#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cimclg/contour.hpp"
#include "cimclg/spectral.hpp"
#include "cimclg/symbols.hpp"

namespace cimclg {

// coeff * z^power. Real coefficients keep f_hat(conj z) = conj f_hat(z).
struct LaplaceMonomial {
  double coeff = 0.0;
  double power = 0.0;
};

cplx eval_monomials(std::span<const LaplaceMonomial> terms, cplx z);

// The time-power t^kappa as a single monomial Gamma(kappa+1) z^{-kappa-1}.
LaplaceMonomial power_law(double kappa, double scale = 1.0);

// One separable source term T(z) S(r): a monomial sum times a spatial profile
// sampled at the CGL nodes (2D: flattened with index i*(M+1)+j, i along x).
struct SeparableTerm {
  std::vector<LaplaceMonomial> time;
  std::vector<double> spatial;
};

// Laplace-domain data of the problem:
//   p0: initial data at the CGL nodes (empty means zero);
//   terms: separable f_hat;
//   callback: optional extra f_hat samples at the CGL nodes for a given z.
struct LaplaceSourceSpec {
  std::vector<double> p0;
  std::vector<SeparableTerm> terms;
  std::function<std::vector<cplx>(cplx)> callback;
};

// Scalar problem  I^{1-gamma}(1 + a D^alpha) p' + lambda (1 + b D^beta) p = f.
struct ScalarSource {
  double p0 = 0.0;
  std::vector<LaplaceMonomial> f_hat;
  std::function<cplx(cplx)> callback;
};

struct CimSolution {
  std::vector<double> times;
  // Nodal values at the CGL nodes per time (2D: flattened as in SeparableTerm).
  std::vector<std::vector<double>> fields;
  // Real basis coefficients per time (2D: flattened column-major (M-1)x(M-1)).
  std::vector<std::vector<double>> coeffs;
  // Relative residual of the Laplace-domain solve at each contour node.
  std::vector<double> residuals;
  ContourPlan plan;
};

// Loads of the data that do not depend on z, computed once per run.
struct AssembledSource1D {
  std::vector<double> p0_load;
  std::vector<std::vector<double>> term_loads;
  const LaplaceSourceSpec* spec = nullptr;
};
struct AssembledSource2D {
  Eigen::MatrixXd p0_load;
  std::vector<Eigen::MatrixXd> term_loads;
  const LaplaceSourceSpec* spec = nullptr;
};

AssembledSource1D assemble_source(const SpectralSpace1D& space, const LaplaceSourceSpec& source);
AssembledSource2D assemble_source(const SpectralSpace2D& space, const LaplaceSourceSpec& source);

// Solves (k1 Mass + k2 I) x = rhs using the even/odd split of the mass
// matrix into two complex tridiagonal systems. Returns the relative residual.
double solve_pentadiagonal(const SpectralSpace1D& space, cplx k1, cplx k2, std::span<const cplx> rhs,
                           std::span<cplx> x);

// [z^gamma N(z) Mass + D(z) I] p = z^{gamma-1} N(z) load(p0) + load(f_hat(z)).
std::vector<cplx> solve_node_1d(const SpectralSpace1D& space, const SymbolSet& symbols, cplx z,
                                const AssembledSource1D& source, double* residual = nullptr);
std::vector<cplx> solve_node_1d(const SpectralSpace1D& space, const SymbolSet& symbols, cplx z,
                                const LaplaceSourceSpec& source);

// k1 Mass P Mass + k2 (Mass P + P Mass) = R via Mass = Q diag(lambda) Q^T.
Eigen::MatrixXcd solve_node_2d(const SpectralSpace2D& space, const SymbolSet& symbols, cplx z,
                               const AssembledSource2D& source);
Eigen::MatrixXcd solve_node_2d(const SpectralSpace2D& space, const SymbolSet& symbols, cplx z,
                               const LaplaceSourceSpec& source);

cplx solve_node_scalar(const SymbolSet& symbols, cplx z, double lambda, const ScalarSource& source);

// Every t must lie in [t0, Lambda t0]. workers = 0 picks the hardware count.
CimSolution cim_solve(const ContourPlan& plan, const SpectralSpace1D& space, const SymbolSet& symbols,
                      const LaplaceSourceSpec& source, std::span<const double> times,
                      std::size_t workers = 1);
CimSolution cim_solve(const ContourPlan& plan, const SpectralSpace2D& space, const SymbolSet& symbols,
                      const LaplaceSourceSpec& source, std::span<const double> times,
                      std::size_t workers = 1);
std::vector<double> cim_solve_scalar(const ContourPlan& plan, const SymbolSet& symbols, double lambda,
                                     const ScalarSource& source, std::span<const double> times);

// Checks t0 <= t <= Lambda t0 (with a relative slack of 1e-12).
void require_times_in_window(const ContourPlan& plan, std::span<const double> times);

// n geometrically spaced times over [t0, Lambda t0], endpoints included.
std::vector<double> geometric_times(double t0, double Lambda, std::size_t n);

}  // namespace cimclg

#pragma once

#include <complex>

#include "cimclg/params.hpp"

namespace cimclg {

using cplx = std::complex<double>;

// z^s on the principal branch, arg z in (-pi, pi]. A signed-zero imaginary
// part is normalised so the negative real axis is always approached from above.
cplx principal_pow(cplx z, double s);

// Gamma function for real x > -1 (x != 0 is not required; Gamma(0) is a pole
// and raises DomainError).
double gamma_fn(double x);

// Laplace transform of t^kappa: Gamma(kappa+1) z^{-kappa-1}. kappa > -1.
cplx laplace_power(double kappa, cplx z);

// Laplace-domain symbols of the Jeffreys-type operator.
//   N(z) = 1 + a z^alpha + sum a_k z^{alpha_k}
//   D(z) = 1 + b z^beta  + sum b_j z^{beta_j}
//   eta(z) = z^gamma N(z) / D(z)
// Every function satisfies F(conj z) = conj F(z) away from the cut.
class SymbolSet {
 public:
  explicit SymbolSet(JeffreysParams params, Strictness mode = Strictness::Solver);

  // Skips validation; used by oracles that deliberately leave the admissible set.
  static SymbolSet unchecked(JeffreysParams params);

  const JeffreysParams& params() const { return params_; }

  cplx numerator(cplx z) const;
  cplx denominator(cplx z) const;
  // z^gamma N(z): coefficient of the mass term in the Laplace-domain system.
  cplx memory_coeff(cplx z) const;
  // z^{gamma-1} N(z): coefficient of the initial data; equals 1/g(z).
  cplx initial_coeff(cplx z) const;

  cplx eta(cplx z) const;
  cplx g(cplx z) const;
  // exp(-eta(z)); psi_hat(0) = 1 by continuity.
  cplx psi_hat(cplx z) const;
  // 1/(z eta(z)): Laplace transform of the leading-order MSD.
  cplx msd_laplace(cplx z) const;

 private:
  struct Unchecked {};
  SymbolSet(JeffreysParams params, Unchecked);

  JeffreysParams params_;
};

}  // namespace cimclg

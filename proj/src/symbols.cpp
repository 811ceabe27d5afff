#include "cimclg/symbols.hpp"

#include <cmath>

#include "cimclg/errors.hpp"

namespace cimclg {

namespace {

void require_off_cut(cplx z) {
  if (z == cplx(0.0, 0.0)) throw DomainError("symbol evaluated at z = 0");
  if (z.imag() == 0.0 && z.real() < 0.0)
    throw DomainError("symbol evaluated on the branch cut (negative real axis)");
}

void require_nonzero(cplx v, const char* what) {
  if (v == cplx(0.0, 0.0) || !std::isfinite(std::abs(v)))
    throw SingularityError(std::string(what) + " vanishes or is not finite");
}

}  // namespace

cplx principal_pow(cplx z, double s) {
  if (s == 0.0) return {1.0, 0.0};
  if (z.imag() == 0.0) {
    if (z.real() > 0.0) return {std::pow(z.real(), s), 0.0};
    z = cplx(z.real(), 0.0);  // drops a possible -0.0
  }
  return std::exp(s * std::log(z));
}

double gamma_fn(double x) {
  if (!std::isfinite(x)) throw DomainError("gamma_fn: non-finite argument");
  if (x <= 0.0 && x == std::floor(x)) throw DomainError("gamma_fn: pole at non-positive integer");
  return std::tgamma(x);
}

cplx laplace_power(double kappa, cplx z) {
  if (!(kappa > -1.0)) throw DomainError("laplace_power requires kappa > -1");
  require_off_cut(z);
  return gamma_fn(kappa + 1.0) * principal_pow(z, -kappa - 1.0);
}

SymbolSet::SymbolSet(JeffreysParams params, Strictness mode) : params_(std::move(params)) {
  require_admissible(params_, mode);
}

SymbolSet::SymbolSet(JeffreysParams params, Unchecked) : params_(std::move(params)) {}

SymbolSet SymbolSet::unchecked(JeffreysParams params) {
  return SymbolSet(std::move(params), Unchecked{});
}

cplx SymbolSet::numerator(cplx z) const {
  cplx n = 1.0 + params_.a * principal_pow(z, params_.alpha);
  for (const auto& t : params_.minor_alpha) n += t.coeff * principal_pow(z, t.order);
  return n;
}

cplx SymbolSet::denominator(cplx z) const {
  cplx d = 1.0 + params_.b * principal_pow(z, params_.beta);
  for (const auto& t : params_.minor_beta) d += t.coeff * principal_pow(z, t.order);
  return d;
}

cplx SymbolSet::memory_coeff(cplx z) const {
  require_off_cut(z);
  return principal_pow(z, params_.gamma) * numerator(z);
}

cplx SymbolSet::initial_coeff(cplx z) const {
  require_off_cut(z);
  // Summed term by term so gamma = 1 yields exact z^0 = 1 factors.
  cplx c = principal_pow(z, params_.gamma - 1.0) +
           params_.a * principal_pow(z, params_.alpha + params_.gamma - 1.0);
  for (const auto& t : params_.minor_alpha)
    c += t.coeff * principal_pow(z, t.order + params_.gamma - 1.0);
  return c;
}

cplx SymbolSet::eta(cplx z) const {
  require_off_cut(z);
  const cplx d = denominator(z);
  require_nonzero(d, "D(z)");
  return principal_pow(z, params_.gamma) * numerator(z) / d;
}

cplx SymbolSet::g(cplx z) const {
  const cplx c = initial_coeff(z);
  require_nonzero(c, "g(z) denominator");
  return 1.0 / c;
}

cplx SymbolSet::psi_hat(cplx z) const {
  if (z == cplx(0.0, 0.0)) return {1.0, 0.0};
  return std::exp(-eta(z));
}

cplx SymbolSet::msd_laplace(cplx z) const {
  const cplx e = eta(z);
  require_nonzero(e, "eta(z)");
  return 1.0 / (z * e);
}

}  // namespace cimclg

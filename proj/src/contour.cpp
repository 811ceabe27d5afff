#include "cimclg/contour.hpp"

#include <cmath>
#include <limits>

#include "cimclg/errors.hpp"

namespace cimclg {

namespace {
constexpr double kPi = std::numbers::pi;
}

RhoObjective parse_rho_objective(const std::string& text) {
  if (text == "algorithm1") return RhoObjective::Algorithm1;
  if (text == "prose") return RhoObjective::Prose;
  throw ConfigError("rho_objective must be 'algorithm1' or 'prose', got '" + text + "'");
}

std::string to_string(RhoObjective objective) {
  return objective == RhoObjective::Algorithm1 ? "algorithm1" : "prose";
}

double strip_half_width(const ContourConfig& cfg) {
  if (!(cfg.alpha_tilde > 0.0 && cfg.alpha_tilde < kPi / 2))
    throw ConfigError("alpha_tilde must lie in (0, pi/2)");
  if (!(cfg.delta_prime > 0.0 && cfg.delta_prime < kPi / 2))
    throw ConfigError("delta_prime must lie in (0, pi/2)");
  if (!(cfg.alpha_tilde + cfg.delta_prime < kPi / 2))
    throw ConfigError("alpha_tilde + delta_prime must be < pi/2");
  return std::min(cfg.alpha_tilde, kPi / 2 - cfg.alpha_tilde - cfg.delta_prime);
}

double a_of_rho(const ContourConfig& cfg, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0, 1)");
  const double d = strip_half_width(cfg);
  const double arg = cfg.Lambda / ((1.0 - rho) * std::sin(cfg.alpha_tilde - d));
  if (!(arg >= 1.0)) throw DomainError("a(rho): arccosh argument below 1");
  return std::acosh(arg);
}

double eps_N(const ContourConfig& cfg, double rho) {
  const double d = strip_half_width(cfg);
  const double a = a_of_rho(cfg, rho);
  if (a == 0.0) return 0.0;
  return std::exp(-2.0 * kPi * d * static_cast<double>(cfg.N) / a);
}

double rho_objective_value(const ContourConfig& cfg, double rho) {
  const double e = cfg.eps_machine;
  const double en = eps_N(cfg, rho);
  if (cfg.objective == RhoObjective::Algorithm1) {
    if (!(en < 1.0)) return std::numeric_limits<double>::infinity();
    return (1.0 - rho) * e + rho * en / (1.0 - en);
  }
  if (en == 0.0) return (rho == 1.0) ? e : std::numeric_limits<double>::infinity();
  const double log_en = std::log(en);
  return e * std::exp((rho - 1.0) * log_en) + std::exp(rho * log_en);
}

double optimal_rho(const ContourConfig& cfg) {
  if (cfg.N < 2) throw ConfigError("contour needs N >= 2");
  if (cfg.rho_grid < 10) throw ConfigError("rho_grid must be >= 10");
  const double D = static_cast<double>(cfg.rho_grid);
  double best_rho = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < cfg.rho_grid; ++j) {
    const double rho = static_cast<double>(j) / D;
    double value;
    try {
      value = rho_objective_value(cfg, rho);
    } catch (const DomainError&) {
      continue;
    }
    if (std::isfinite(value) && value < best) {
      best = value;
      best_rho = rho;
    }
  }
  if (best_rho == 0.0) throw ConfigError("no feasible rho on the search grid");
  return best_rho;
}

ContourPlan build_plan(const ContourConfig& cfg) {
  if (!(cfg.t0 > 0.0)) throw ConfigError("t0 must be positive");
  if (!(cfg.Lambda >= 1.0)) throw ConfigError("Lambda must be >= 1");
  if (cfg.N < 2) throw ConfigError("contour needs N >= 2");

  ContourPlan plan;
  plan.d = strip_half_width(cfg);
  plan.rho_star = cfg.rho ? *cfg.rho : optimal_rho(cfg);
  plan.a_rho = a_of_rho(cfg, plan.rho_star);
  if (!(plan.a_rho > 0.0)) throw ConfigError("degenerate contour: a(rho) = 0");
  plan.t0 = cfg.t0;
  plan.Lambda = cfg.Lambda;

  const double n = static_cast<double>(cfg.N);
  plan.tau = plan.a_rho / n;
  plan.mu = 2.0 * kPi * plan.d * n * (1.0 - plan.rho_star) / (cfg.t0 * cfg.Lambda * plan.a_rho);

  const double en = eps_N(cfg, plan.rho_star);
  plan.predicted_error = (1.0 - plan.rho_star) * cfg.eps_machine + plan.rho_star * en / (1.0 - en);

  const cplx i(0.0, 1.0);
  plan.nodes.reserve(cfg.N);
  for (std::size_t k = 0; k < cfg.N; ++k) {
    const double phi = (static_cast<double>(k) + 0.5) * plan.tau;
    // Expanded forms of mu(1 + sin(i phi - at)) and i mu cos(i phi - at).
    const double sa = std::sin(cfg.alpha_tilde), ca = std::cos(cfg.alpha_tilde);
    const double ch = std::cosh(phi), sh = std::sinh(phi);
    const cplx z(plan.mu * (1.0 - sa * ch), plan.mu * ca * sh);
    const cplx dz = i * plan.mu * cplx(ca * ch, sa * sh);
    plan.nodes.push_back({z, dz});
  }
  return plan;
}

}  // namespace cimclg

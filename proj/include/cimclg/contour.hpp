#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cimclg/symbols.hpp"

namespace cimclg {

enum class RhoObjective {
  // (1-rho) eps + rho eps_N / (1 - eps_N), minimised on the grid j/D.
  Algorithm1,
  // eps * eps_N^{rho-1} + eps_N^rho.
  Prose,
};

RhoObjective parse_rho_objective(const std::string& text);
std::string to_string(RhoObjective objective);

// Hyperbolic contour z(phi) = mu (1 + sin(i phi - alpha_tilde)) for query
// times t in [t0, Lambda t0].
struct ContourConfig {
  double alpha_tilde = std::numbers::pi / 4;  // opening angle of the hyperbola
  double delta_prime = std::numbers::pi / 8;  // asymptote inclination
  double t0 = 0.01;
  double Lambda = 150.0;
  std::size_t N = 50;
  double eps_machine = 2.22e-16;
  std::size_t rho_grid = 10000;
  std::optional<double> rho;  // manual override of the optimised rho
  RhoObjective objective = RhoObjective::Algorithm1;
};

struct ContourNode {
  cplx z;
  cplx dz;  // z'(phi_k)
};

struct ContourPlan {
  double d = 0.0;
  double rho_star = 0.0;
  double a_rho = 0.0;
  double mu = 0.0;
  double tau = 0.0;
  double t0 = 0.0;
  double Lambda = 0.0;
  std::vector<ContourNode> nodes;

  // Algorithm-1 error model (1-rho) eps + rho eps_N/(1-eps_N) at rho_star.
  double predicted_error = 0.0;
};

// d = min(alpha_tilde, pi/2 - alpha_tilde - delta_prime). Throws ConfigError
// unless both angles lie in (0, pi/2) and alpha_tilde + delta_prime < pi/2.
double strip_half_width(const ContourConfig& cfg);

// a(rho) = arccosh(Lambda / ((1-rho) sin(alpha_tilde - d))).
double a_of_rho(const ContourConfig& cfg, double rho);

// eps_N(rho) = exp(-2 pi d N / a(rho)).
double eps_N(const ContourConfig& cfg, double rho);

double rho_objective_value(const ContourConfig& cfg, double rho);

// Grid search over rho_j = j/D, j = 1..D-1; the first minimiser wins ties.
double optimal_rho(const ContourConfig& cfg);

ContourPlan build_plan(const ContourConfig& cfg);

// Midpoint-rule inversion for a scalar transform:
//   (tau/pi) Im sum_k exp(z_k t) F(z_k) z'_k.
template <class F>
double invert_scalar(const ContourPlan& plan, F&& transform, double t) {
  double acc = 0.0;
  for (const auto& node : plan.nodes) acc += (std::exp(node.z * t) * transform(node.z) * node.dz).imag();
  return plan.tau / std::numbers::pi * acc;
}

}  // namespace cimclg

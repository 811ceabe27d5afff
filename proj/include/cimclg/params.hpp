#pragma once

#include <string>
#include <vector>

namespace cimclg {

// One minor fractional term: order and coefficient, e.g. a_k z^{alpha_k}.
struct FractionalTerm {
  double order = 0.0;
  double coeff = 0.0;
};

// Coefficients of the multi-term Jeffreys-type operator
//   I^{1-gamma} (1 + a D^alpha + sum_k a_k D^{alpha_k}) d/dt p
//     + (1 + b D^beta + sum_j b_j D^{beta_j}) A p = f.
// K and J are the lengths of minor_alpha and minor_beta.
struct JeffreysParams {
  double alpha = 0.5;
  double beta = 0.35;
  double gamma = 0.45;
  double a = 1.0;
  double b = 1.0;
  std::vector<FractionalTerm> minor_alpha;
  std::vector<FractionalTerm> minor_beta;

  double sum_minor_alpha_orders() const;
  double sum_minor_beta_orders() const;
};

// Which constraint families must hold for a parameter set to be accepted.
//  - PdfStrict: ranges, sector condition and the waiting-time PDF conditions
//    (required to sample the CTRW).
//  - Solver: ranges and sector condition only; admits e.g. alpha=beta=gamma=1.
enum class Strictness { PdfStrict, Solver };

enum class ConstraintFamily { Range, Sector, Pdf };

struct Violation {
  ConstraintFamily family;
  std::string name;     // stable identifier, e.g. "alpha+gamma+sum(alpha_k)<=1"
  std::string message;  // human-readable detail with the offending values
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool empty() const { return violations.empty(); }
  bool admissible(Strictness mode) const;
  bool violates(const std::string& name) const;
  std::string summary() const;
};

// Checks every constraint and reports all failures; never stops at the first.
// Throws NonFiniteError when any field is NaN/inf.
ValidationReport validate(const JeffreysParams& p);

// validate() followed by a ConfigError listing the violations that matter
// under `mode`.
void require_admissible(const JeffreysParams& p, Strictness mode);

Strictness parse_strictness(const std::string& text);
std::string to_string(Strictness mode);

}  // namespace cimclg

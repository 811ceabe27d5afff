#include "cimclg/params.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "cimclg/errors.hpp"

namespace cimclg {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_finite(double v, const std::string& name) {
  if (!std::isfinite(v)) throw NonFiniteError("parameter " + name + " is not finite");
}

}  // namespace

double JeffreysParams::sum_minor_alpha_orders() const {
  return std::accumulate(minor_alpha.begin(), minor_alpha.end(), 0.0,
                         [](double s, const FractionalTerm& t) { return s + t.order; });
}

double JeffreysParams::sum_minor_beta_orders() const {
  return std::accumulate(minor_beta.begin(), minor_beta.end(), 0.0,
                         [](double s, const FractionalTerm& t) { return s + t.order; });
}

bool ValidationReport::admissible(Strictness mode) const {
  for (const auto& v : violations) {
    if (v.family != ConstraintFamily::Pdf || mode == Strictness::PdfStrict) return false;
  }
  return true;
}

bool ValidationReport::violates(const std::string& name) const {
  for (const auto& v : violations)
    if (v.name == name) return true;
  return false;
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.message;
  }
  return out;
}

ValidationReport validate(const JeffreysParams& p) {
  require_finite(p.alpha, "alpha");
  require_finite(p.beta, "beta");
  require_finite(p.gamma, "gamma");
  require_finite(p.a, "a");
  require_finite(p.b, "b");
  for (std::size_t k = 0; k < p.minor_alpha.size(); ++k) {
    require_finite(p.minor_alpha[k].order, "alpha_" + std::to_string(k + 1));
    require_finite(p.minor_alpha[k].coeff, "a_" + std::to_string(k + 1));
  }
  for (std::size_t j = 0; j < p.minor_beta.size(); ++j) {
    require_finite(p.minor_beta[j].order, "beta_" + std::to_string(j + 1));
    require_finite(p.minor_beta[j].coeff, "b_" + std::to_string(j + 1));
  }

  ValidationReport report;
  auto fail = [&](ConstraintFamily family, std::string name, std::string detail) {
    report.violations.push_back({family, name, name + " violated: " + detail});
  };
  using F = ConstraintFamily;

  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) fail(F::Range, "0<alpha<=1", "alpha=" + fmt(p.alpha));
  if (!(p.beta > 0.0 && p.beta <= 1.0)) fail(F::Range, "0<beta<=1", "beta=" + fmt(p.beta));
  if (!(p.gamma > 0.0 && p.gamma <= 1.0)) fail(F::Range, "0<gamma<=1", "gamma=" + fmt(p.gamma));
  if (!(p.a > 0.0)) fail(F::Range, "a>0", "a=" + fmt(p.a));
  if (!(p.b > 0.0)) fail(F::Range, "b>0", "b=" + fmt(p.b));
  for (std::size_t k = 0; k < p.minor_alpha.size(); ++k) {
    const auto& t = p.minor_alpha[k];
    const std::string idx = std::to_string(k + 1);
    if (!(t.order > 0.0 && t.order < p.alpha))
      fail(F::Range, "0<alpha_k<alpha", "alpha_" + idx + "=" + fmt(t.order));
    if (!(t.coeff >= 0.0)) fail(F::Range, "a_k>=0", "a_" + idx + "=" + fmt(t.coeff));
  }
  for (std::size_t j = 0; j < p.minor_beta.size(); ++j) {
    const auto& t = p.minor_beta[j];
    const std::string idx = std::to_string(j + 1);
    if (!(t.order > 0.0 && t.order < p.beta))
      fail(F::Range, "0<beta_j<beta", "beta_" + idx + "=" + fmt(t.order));
    if (!(t.coeff >= 0.0)) fail(F::Range, "b_j>=0", "b_" + idx + "=" + fmt(t.coeff));
  }

  const double sum_ak = p.sum_minor_alpha_orders();
  const double sum_bj = p.sum_minor_beta_orders();
  if (!(sum_bj <= sum_ak))
    fail(F::Sector, "sum(beta_j)<=sum(alpha_k)",
         "sum(beta_j)=" + fmt(sum_bj) + " > sum(alpha_k)=" + fmt(sum_ak));

  if (!(p.beta <= p.gamma))
    fail(F::Pdf, "beta<=gamma", "beta=" + fmt(p.beta) + " > gamma=" + fmt(p.gamma));
  const double order_sum = p.alpha + p.gamma + sum_ak;
  if (!(order_sum <= 1.0))
    fail(F::Pdf, "alpha+gamma+sum(alpha_k)<=1", "sum=" + fmt(order_sum));

  // Index 0 stands for the leading pair (a, b).
  std::vector<double> as{p.a}, bs{p.b};
  for (const auto& t : p.minor_alpha) as.push_back(t.coeff);
  for (const auto& t : p.minor_beta) bs.push_back(t.coeff);
  bool sign_ok = true;
  for (double ak : as)
    for (double bj : bs)
      if (ak * bj < 0.0) sign_ok = false;
  if (!sign_ok) fail(F::Pdf, "a_k*b_j>=0", "mixed coefficient signs");

  return report;
}

void require_admissible(const JeffreysParams& p, Strictness mode) {
  const auto report = validate(p);
  if (!report.admissible(mode)) {
    std::string msg;
    for (const auto& v : report.violations) {
      if (v.family == ConstraintFamily::Pdf && mode == Strictness::Solver) continue;
      if (!msg.empty()) msg += "; ";
      msg += v.message;
    }
    throw ConfigError("parameters not admissible (" + to_string(mode) + "): " + msg);
  }
}

Strictness parse_strictness(const std::string& text) {
  if (text == "pdf-strict") return Strictness::PdfStrict;
  if (text == "solver") return Strictness::Solver;
  throw ConfigError("strictness must be 'pdf-strict' or 'solver', got '" + text + "'");
}

std::string to_string(Strictness mode) {
  return mode == Strictness::PdfStrict ? "pdf-strict" : "solver";
}

}  // namespace cimclg

#include "cimclg/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "cimclg/errors.hpp"

namespace cimclg {

namespace {

constexpr double kPi = std::numbers::pi;
// Below this degree the cosine sums are cheaper than planning a transform.
constexpr std::size_t kFastTransformMinDegree = 16;

// FFTW planning is not thread-safe; execution on new arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

void require_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw ShapeError(std::string(what) + ": expected length " + std::to_string(want) + ", got " +
                     std::to_string(got));
}

}  // namespace

// Unnormalised DCT-I of length M+1 (FFTW REDFT00):
//   Y_k = X_0 + (-1)^k X_M + 2 sum_{j=1}^{M-1} X_j cos(pi j k / M).
class ChebyshevTransform {
 public:
  explicit ChebyshevTransform(std::size_t M) : n_(static_cast<int>(M + 1)) {
    std::vector<double> in(M + 1), out(M + 1);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan_ = fftw_plan_r2r_1d(n_, in.data(), out.data(), FFTW_REDFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_) throw Error("FFTW failed to create a DCT-I plan");
  }
  ~ChebyshevTransform() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  ChebyshevTransform(const ChebyshevTransform&) = delete;
  ChebyshevTransform& operator=(const ChebyshevTransform&) = delete;

  void execute(const double* in, double* out) const {
    // FFTW takes a non-const input pointer but REDFT00 out-of-place leaves it intact.
    fftw_execute_r2r(plan_, const_cast<double*>(in), out);
  }

 private:
  int n_;
  fftw_plan plan_;
};

std::vector<double> cgl_nodes(std::size_t M) {
  if (M < 1) throw ConfigError("cgl_nodes needs M >= 1");
  std::vector<double> x(M + 1);
  for (std::size_t j = 0; j <= M; ++j) x[j] = std::cos(kPi * static_cast<double>(j) / M);
  // Exact symmetry and an exact zero for even M.
  for (std::size_t j = 0; j <= M / 2; ++j) {
    x[M - j] = -x[j];
  }
  if (M % 2 == 0) x[M / 2] = 0.0;
  return x;
}

GaussRule gauss_legendre(std::size_t n) {
  if (n < 1) throw ConfigError("gauss_legendre needs n >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = dn * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.nodes[n - 1 - i] = -x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

std::vector<double> legendre_values(std::size_t n, double x) {
  std::vector<double> L(n + 1);
  L[0] = 1.0;
  if (n >= 1) L[1] = x;
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    L[k + 1] = ((2.0 * kk + 1.0) * x * L[k] - kk * L[k - 1]) / (kk + 1.0);
  }
  return L;
}

double legendre_series(std::span<const double> coeffs, double x) {
  if (coeffs.empty()) return 0.0;
  double p0 = 1.0, p1 = x;
  double s = coeffs[0];
  if (coeffs.size() > 1) s += coeffs[1] * x;
  for (std::size_t k = 1; k + 1 < coeffs.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk + 1.0) * x * p1 - kk * p0) / (kk + 1.0);
    s += coeffs[k + 1] * p2;
    p0 = p1;
    p1 = p2;
  }
  return s;
}

double shen_scale(std::size_t l) { return 1.0 / std::sqrt(4.0 * static_cast<double>(l) + 6.0); }

BandedMass mass_matrix(std::size_t M) {
  if (M < 4) throw ConfigError("mass_matrix needs M >= 4");
  BandedMass m;
  m.diag.resize(M - 1);
  m.off2.resize(M - 3);
  for (std::size_t l = 0; l + 1 < M; ++l) {
    const double c = shen_scale(l), dl = static_cast<double>(l);
    m.diag[l] = c * c * (2.0 / (2.0 * dl + 1.0) + 2.0 / (2.0 * dl + 5.0));
  }
  for (std::size_t l = 0; l + 3 < M; ++l) {
    const double dl = static_cast<double>(l);
    m.off2[l] = -shen_scale(l) * shen_scale(l + 2) * 2.0 / (2.0 * dl + 5.0);
  }
  return m;
}

SpectralSpace1D::SpectralSpace1D(std::size_t M) : M_(M) {
  if (M < 4) throw ConfigError("SpectralSpace1D needs M >= 4");
  nodes_ = cgl_nodes(M);
  if (M >= kFastTransformMinDegree) dct_ = std::make_unique<ChebyshevTransform>(M);

  const Eigen::Index n = static_cast<Eigen::Index>(M + 1);
  // x L_k = ((k+1) L_{k+1} + k L_{k-1}) / (2k+1), T_{n+1} = 2 x T_n - T_{n-1}.
  c2l_ = Eigen::MatrixXd::Zero(n, n);
  c2l_(0, 0) = 1.0;
  if (n > 1) c2l_(1, 1) = 1.0;
  for (Eigen::Index col = 1; col + 1 < n; ++col) {
    Eigen::VectorXd xt = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k <= col; ++k) {
      const double v = c2l_(k, col);
      if (v == 0.0) continue;
      const double dk = static_cast<double>(k);
      xt(k + 1) += v * (dk + 1.0) / (2.0 * dk + 1.0);
      if (k > 0) xt(k - 1) += v * dk / (2.0 * dk + 1.0);
    }
    c2l_.col(col + 1) = 2.0 * xt - c2l_.col(col - 1);
  }
  // x T_0 = T_1, x T_k = (T_{k+1} + T_{k-1}) / 2,
  // (n+1) L_{n+1} = (2n+1) x L_n - n L_{n-1}.
  l2c_ = Eigen::MatrixXd::Zero(n, n);
  l2c_(0, 0) = 1.0;
  if (n > 1) l2c_(1, 1) = 1.0;
  for (Eigen::Index col = 1; col + 1 < n; ++col) {
    Eigen::VectorXd xl = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k <= col; ++k) {
      const double v = l2c_(k, col);
      if (v == 0.0) continue;
      if (k == 0) {
        xl(1) += v;
      } else {
        xl(k + 1) += 0.5 * v;
        xl(k - 1) += 0.5 * v;
      }
    }
    const double dc = static_cast<double>(col);
    l2c_.col(col + 1) = ((2.0 * dc + 1.0) * xl - dc * l2c_.col(col - 1)) / (dc + 1.0);
  }

  auto mass = mass_matrix(M);
  mass_diag_ = std::move(mass.diag);
  mass_off2_ = std::move(mass.off2);

  const Eigen::Index m = static_cast<Eigen::Index>(M - 1);
  load_map_.resize(m, n);
  std::vector<double> unit(M + 1, 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    unit[j] = 1.0;
    const auto col = load_vector(std::span<const double>(unit));
    for (Eigen::Index l = 0; l < m; ++l) load_map_(l, j) = col[l];
    unit[j] = 0.0;
  }
  synth_map_.resize(n, m);
  std::vector<double> e(M - 1, 0.0);
  for (Eigen::Index l = 0; l < m; ++l) {
    e[l] = 1.0;
    const auto col = evaluate_basis(std::span<const double>(e));
    for (Eigen::Index j = 0; j < n; ++j) synth_map_(j, l) = col[j];
    e[l] = 0.0;
  }
}

SpectralSpace1D::~SpectralSpace1D() = default;
SpectralSpace1D::SpectralSpace1D(SpectralSpace1D&&) noexcept = default;

SpectralSpace1D::SpectralSpace1D(const SpectralSpace1D& other)
    : M_(other.M_),
      nodes_(other.nodes_),
      dct_(other.dct_ ? std::make_unique<ChebyshevTransform>(other.M_) : nullptr),
      c2l_(other.c2l_),
      l2c_(other.l2c_),
      mass_diag_(other.mass_diag_),
      mass_off2_(other.mass_off2_),
      load_map_(other.load_map_),
      synth_map_(other.synth_map_) {}

bool SpectralSpace1D::uses_fast_transform() const { return dct_ != nullptr; }

std::vector<double> SpectralSpace1D::cheb_coeffs_direct(std::span<const double> values) const {
  require_length(values.size(), M_ + 1, "cheb_coeffs");
  const double dM = static_cast<double>(M_);
  std::vector<double> c(M_ + 1);
  for (std::size_t k = 0; k <= M_; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j <= M_; ++j) {
      const double w = (j == 0 || j == M_) ? 0.5 : 1.0;
      // cos(pi j k / M) with the product reduced mod 2M for accuracy.
      const double arg = kPi * static_cast<double>((j * k) % (2 * M_)) / dM;
      s += w * values[j] * std::cos(arg);
    }
    const double ck = (k == 0 || k == M_) ? 2.0 : 1.0;
    c[k] = 2.0 * s / (dM * ck);
  }
  return c;
}

std::vector<double> SpectralSpace1D::cheb_synthesis_direct(std::span<const double> coeffs) const {
  require_length(coeffs.size(), M_ + 1, "cheb_synthesis");
  const double dM = static_cast<double>(M_);
  std::vector<double> v(M_ + 1);
  for (std::size_t j = 0; j <= M_; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k <= M_; ++k)
      s += coeffs[k] * std::cos(kPi * static_cast<double>((j * k) % (2 * M_)) / dM);
    v[j] = s;
  }
  return v;
}

std::vector<double> SpectralSpace1D::cheb_coeffs(std::span<const double> values) const {
  require_length(values.size(), M_ + 1, "cheb_coeffs");
  if (!dct_) return cheb_coeffs_direct(values);
  std::vector<double> y(M_ + 1);
  dct_->execute(values.data(), y.data());
  const double dM = static_cast<double>(M_);
  for (std::size_t k = 0; k <= M_; ++k) y[k] /= dM * ((k == 0 || k == M_) ? 2.0 : 1.0);
  return y;
}

std::vector<double> SpectralSpace1D::cheb_synthesis(std::span<const double> coeffs) const {
  require_length(coeffs.size(), M_ + 1, "cheb_synthesis");
  if (!dct_) return cheb_synthesis_direct(coeffs);
  std::vector<double> x(coeffs.begin(), coeffs.end());
  for (std::size_t k = 1; k < M_; ++k) x[k] *= 0.5;
  std::vector<double> y(M_ + 1);
  dct_->execute(x.data(), y.data());
  return y;
}

std::vector<double> SpectralSpace1D::cheb_to_legendre(std::span<const double> cheb) const {
  require_length(cheb.size(), M_ + 1, "cheb_to_legendre");
  const Eigen::Map<const Eigen::VectorXd> c(cheb.data(), static_cast<Eigen::Index>(cheb.size()));
  const Eigen::VectorXd l = c2l_.triangularView<Eigen::Upper>() * c;
  return {l.data(), l.data() + l.size()};
}

std::vector<double> SpectralSpace1D::legendre_to_cheb(std::span<const double> leg) const {
  require_length(leg.size(), M_ + 1, "legendre_to_cheb");
  const Eigen::Map<const Eigen::VectorXd> l(leg.data(), static_cast<Eigen::Index>(leg.size()));
  const Eigen::VectorXd c = l2c_.triangularView<Eigen::Upper>() * l;
  return {c.data(), c.data() + c.size()};
}

std::vector<double> SpectralSpace1D::load_from_legendre(std::span<const double> leg) const {
  require_length(leg.size(), M_ + 1, "load_from_legendre");
  std::vector<double> out(M_ - 1);
  for (std::size_t l = 0; l + 1 < M_; ++l) {
    const double dl = static_cast<double>(l);
    out[l] = shen_scale(l) * (leg[l] * 2.0 / (2.0 * dl + 1.0) - leg[l + 2] * 2.0 / (2.0 * dl + 5.0));
  }
  return out;
}

std::vector<double> SpectralSpace1D::load_vector(std::span<const double> samples) const {
  require_length(samples.size(), M_ + 1, "load_vector");
  return load_from_legendre(cheb_to_legendre(cheb_coeffs(samples)));
}

std::vector<cplx> SpectralSpace1D::load_vector(std::span<const cplx> samples) const {
  require_length(samples.size(), M_ + 1, "load_vector");
  std::vector<double> re(M_ + 1), im(M_ + 1);
  for (std::size_t j = 0; j <= M_; ++j) {
    re[j] = samples[j].real();
    im[j] = samples[j].imag();
  }
  const auto lr = load_vector(std::span<const double>(re));
  const auto li = load_vector(std::span<const double>(im));
  std::vector<cplx> out(M_ - 1);
  for (std::size_t l = 0; l + 1 < M_; ++l) out[l] = {lr[l], li[l]};
  return out;
}

std::vector<double> SpectralSpace1D::basis_to_legendre(std::span<const double> basis) const {
  require_length(basis.size(), M_ - 1, "basis_to_legendre");
  std::vector<double> leg(M_ + 1, 0.0);
  for (std::size_t l = 0; l + 1 < M_; ++l) {
    const double v = shen_scale(l) * basis[l];
    leg[l] += v;
    leg[l + 2] -= v;
  }
  return leg;
}

std::vector<double> SpectralSpace1D::evaluate_basis(std::span<const double> basis) const {
  auto v = cheb_synthesis(legendre_to_cheb(basis_to_legendre(basis)));
  // phi_l(+-1) = 0 exactly.
  v.front() = 0.0;
  v.back() = 0.0;
  return v;
}

std::vector<double> SpectralSpace1D::evaluate_basis_at(std::span<const double> basis,
                                                       std::span<const double> points) const {
  const auto leg = basis_to_legendre(basis);
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = legendre_series(leg, points[i]);
  return out;
}

Eigen::MatrixXd SpectralSpace1D::mass_dense() const {
  const Eigen::Index m = static_cast<Eigen::Index>(M_ - 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index l = 0; l < m; ++l) A(l, l) = mass_diag_[l];
  for (Eigen::Index l = 0; l + 2 < m; ++l) A(l, l + 2) = A(l + 2, l) = mass_off2_[l];
  return A;
}

SpectralSpace2D::SpectralSpace2D(SpectralSpace1D base) : base_(std::move(base)) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(base_.mass_dense());
  if (eig.info() != Eigen::Success)
    throw Error("mass-matrix eigendecomposition did not converge");
  eig_vals_ = eig.eigenvalues();
  eig_vecs_ = eig.eigenvectors();
  if (eig_vals_.minCoeff() <= 0.0) throw Error("mass matrix is not positive definite");
}

SpectralSpace2D mass_eigendecomposition(const SpectralSpace1D& space) {
  return SpectralSpace2D(space);
}

Eigen::MatrixXd SpectralSpace2D::load_matrix(const Eigen::MatrixXd& samples) const {
  const auto n = static_cast<Eigen::Index>(base_.degree() + 1);
  if (samples.rows() != n || samples.cols() != n)
    throw ShapeError("load_matrix: samples must be (M+1) x (M+1)");
  return base_.load_map() * samples * base_.load_map().transpose();
}

Eigen::MatrixXd SpectralSpace2D::evaluate_basis(const Eigen::MatrixXd& coeffs) const {
  const auto m = static_cast<Eigen::Index>(dim());
  if (coeffs.rows() != m || coeffs.cols() != m)
    throw ShapeError("evaluate_basis: coefficients must be (M-1) x (M-1)");
  return base_.synth_map() * coeffs * base_.synth_map().transpose();
}

Eigen::MatrixXd SpectralSpace2D::evaluate_basis_at(const Eigen::MatrixXd& coeffs,
                                                   std::span<const double> xs,
                                                   std::span<const double> ys) const {
  const auto m = static_cast<Eigen::Index>(dim());
  if (coeffs.rows() != m || coeffs.cols() != m)
    throw ShapeError("evaluate_basis_at: coefficients must be (M-1) x (M-1)");
  auto basis_values = [&](std::span<const double> pts) {
    Eigen::MatrixXd V(static_cast<Eigen::Index>(pts.size()), m);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto L = legendre_values(base_.degree(), pts[i]);
      for (Eigen::Index l = 0; l < m; ++l)
        V(static_cast<Eigen::Index>(i), l) = shen_scale(static_cast<std::size_t>(l)) * (L[l] - L[l + 2]);
    }
    return V;
  };
  return basis_values(xs) * coeffs * basis_values(ys).transpose();
}

}  // namespace cimclg

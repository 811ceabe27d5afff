#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cimclg {

using cplx = std::complex<double>;

// Chebyshev-Gauss-Lobatto points cos(pi j / M), j = 0..M (descending).
std::vector<double> cgl_nodes(std::size_t M);

// Gauss-Legendre rule on [-1, 1] with n points (Newton on L_n).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(std::size_t n);

// Sum_n coeffs[n] L_n(x).
double legendre_series(std::span<const double> coeffs, double x);
// L_0..L_n at x.
std::vector<double> legendre_values(std::size_t n, double x);

// Shen basis phi_l = c_l (L_l - L_{l+2}), c_l = 1/sqrt(4l+6), l = 0..M-2.
double shen_scale(std::size_t l);

class ChebyshevTransform;

// One-dimensional Chebyshev-Legendre Galerkin workspace of degree M on (-1,1).
// Immutable after construction; every method is reentrant.
class SpectralSpace1D {
 public:
  explicit SpectralSpace1D(std::size_t M);
  ~SpectralSpace1D();
  SpectralSpace1D(const SpectralSpace1D&);
  SpectralSpace1D& operator=(const SpectralSpace1D&) = delete;
  SpectralSpace1D(SpectralSpace1D&&) noexcept;
  SpectralSpace1D& operator=(SpectralSpace1D&&) = delete;

  std::size_t degree() const { return M_; }
  std::size_t dim() const { return M_ - 1; }  // number of basis functions
  const std::vector<double>& nodes() const { return nodes_; }

  // Values at the CGL nodes -> Chebyshev interpolation coefficients 0..M.
  std::vector<double> cheb_coeffs(std::span<const double> values) const;
  // Chebyshev coefficients -> values at the CGL nodes.
  std::vector<double> cheb_synthesis(std::span<const double> coeffs) const;
  // Same transforms by O(M^2) cosine sums.
  std::vector<double> cheb_coeffs_direct(std::span<const double> values) const;
  std::vector<double> cheb_synthesis_direct(std::span<const double> coeffs) const;
  bool uses_fast_transform() const;

  std::vector<double> cheb_to_legendre(std::span<const double> cheb) const;
  std::vector<double> legendre_to_cheb(std::span<const double> leg) const;

  // Entries (I_M^c u, phi_l), l = 0..M-2, from samples of u at the CGL nodes.
  std::vector<double> load_vector(std::span<const double> samples) const;
  std::vector<cplx> load_vector(std::span<const cplx> samples) const;
  // (phi_l, g) from Legendre coefficients of g (length M+1).
  std::vector<double> load_from_legendre(std::span<const double> leg) const;

  // Basis coefficients (length M-1) -> Legendre coefficients (length M+1).
  std::vector<double> basis_to_legendre(std::span<const double> basis) const;
  // Basis coefficients -> values at the CGL nodes.
  std::vector<double> evaluate_basis(std::span<const double> basis) const;
  // Basis coefficients -> values at arbitrary points.
  std::vector<double> evaluate_basis_at(std::span<const double> basis,
                                        std::span<const double> points) const;

  // Pentadiagonal mass matrix: diagonal (M-1) and offset-2 band (M-3).
  const std::vector<double>& mass_diag() const { return mass_diag_; }
  const std::vector<double>& mass_off2() const { return mass_off2_; }
  Eigen::MatrixXd mass_dense() const;

  // Dense linear maps, used by the 2D tensor code.
  // load_map: (M-1) x (M+1), nodal samples -> load vector.
  // synth_map: (M+1) x (M-1), basis coefficients -> nodal values.
  const Eigen::MatrixXd& load_map() const { return load_map_; }
  const Eigen::MatrixXd& synth_map() const { return synth_map_; }

 private:
  std::size_t M_;
  std::vector<double> nodes_;
  std::unique_ptr<ChebyshevTransform> dct_;
  Eigen::MatrixXd c2l_;  // column n: Legendre coefficients of T_n
  Eigen::MatrixXd l2c_;  // column n: Chebyshev coefficients of L_n
  std::vector<double> mass_diag_;
  std::vector<double> mass_off2_;
  Eigen::MatrixXd load_map_;
  Eigen::MatrixXd synth_map_;
};

// Banded mass matrix of the Shen basis for degree M.
struct BandedMass {
  std::vector<double> diag;
  std::vector<double> off2;
};
BandedMass mass_matrix(std::size_t M);

// Tensor-product space on (-1,1)^2 with the mass matrix diagonalised once:
// mass = Q diag(lambda) Q^T.
class SpectralSpace2D {
 public:
  explicit SpectralSpace2D(SpectralSpace1D base);

  const SpectralSpace1D& base() const { return base_; }
  std::size_t dim() const { return base_.dim(); }
  const Eigen::VectorXd& eig_vals() const { return eig_vals_; }
  const Eigen::MatrixXd& eig_vecs() const { return eig_vecs_; }

  // Nodal samples F(i,j) = u(x_i, y_j) -> load matrix (I_M u, phi_i(x) phi_j(y)).
  Eigen::MatrixXd load_matrix(const Eigen::MatrixXd& samples) const;
  // Coefficient matrix -> nodal values on the CGL tensor grid.
  Eigen::MatrixXd evaluate_basis(const Eigen::MatrixXd& coeffs) const;
  // Coefficient matrix -> values on the tensor grid xs x ys.
  Eigen::MatrixXd evaluate_basis_at(const Eigen::MatrixXd& coeffs, std::span<const double> xs,
                                    std::span<const double> ys) const;

 private:
  SpectralSpace1D base_;
  Eigen::VectorXd eig_vals_;
  Eigen::MatrixXd eig_vecs_;
};

SpectralSpace2D mass_eigendecomposition(const SpectralSpace1D& space);

}  // namespace cimclg

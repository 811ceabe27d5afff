#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cimclg/solver.hpp"

namespace cimclg {

// Inverse transform of a monomial sum, sum c t^{-s-1}/Gamma(-s); every power
// s must be negative.
double monomials_in_time(std::span<const LaplaceMonomial> terms, double t);

// Scalar problem with exact solution p(t) = 1 + t^{4/5}, p0 = 1. The source is
// assembled from the Laplace transform of the exact solution.
ScalarSource example1_source(const JeffreysParams& p, double lambda);
double example1_exact(double t);
// Time-domain source written out term by term (for cross-checking).
double example1_forcing(const JeffreysParams& p, double lambda, double t);

// 1D problem with exact solution t^kappa sin(pi x) and zero initial data.
LaplaceSourceSpec example2_source(const SpectralSpace1D& space, const JeffreysParams& p, double kappa);
double example2_exact(double kappa, double t, double x);
double example2_forcing(const JeffreysParams& p, double kappa, double t, double x);

// Homogeneous problems.
double example3_initial(double x);
double example4_initial(double x, double y);
LaplaceSourceSpec example3_source(const SpectralSpace1D& space);
LaplaceSourceSpec example4_source(const SpectralSpace1D& space);

// Samples f at the CGL nodes; 2D samples are flattened with index i*(M+1)+j.
std::vector<double> sample_nodes(const SpectralSpace1D& space, const std::function<double(double)>& f);
std::vector<double> sample_nodes(const SpectralSpace1D& space, const std::function<double(double, double)>& f);

// Error norms. L2 against a function uses Gauss-Legendre with M+8 points per
// axis; Linf uses a uniform grid of 512 points per axis.
double l2_error_1d(const SpectralSpace1D& space, std::span<const double> coeffs,
                   const std::function<double(double)>& exact);
double linf_error_1d(const SpectralSpace1D& space, std::span<const double> coeffs,
                     const std::function<double(double)>& exact);
double l2_error_2d(const SpectralSpace2D& space, std::span<const double> coeffs,
                   const std::function<double(double, double)>& exact);
double linf_error_2d(const SpectralSpace2D& space, std::span<const double> coeffs,
                     const std::function<double(double, double)>& exact);

// Distances between two discrete solutions. Same degree: exact through the
// mass matrix. Different degrees: by quadrature on the finer rule.
double l2_distance_1d(const SpectralSpace1D& a, std::span<const double> ca, const SpectralSpace1D& b,
                      std::span<const double> cb);
double linf_distance_1d(const SpectralSpace1D& a, std::span<const double> ca, const SpectralSpace1D& b,
                        std::span<const double> cb);
double l2_distance_2d(const SpectralSpace2D& a, std::span<const double> ca, const SpectralSpace2D& b,
                      std::span<const double> cb);
double linf_distance_2d(const SpectralSpace2D& a, std::span<const double> ca, const SpectralSpace2D& b,
                        std::span<const double> cb);

}  // namespace cimclg

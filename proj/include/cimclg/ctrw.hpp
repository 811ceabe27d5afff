#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "cimclg/contour.hpp"
#include "cimclg/symbols.hpp"

namespace cimclg {

// Fixed-Talbot inversion (Abate-Valko) of F at time t > 0 with n nodes,
// carried out in extended precision. The _log variant takes log F and adds
// it to s t before exponentiating, which avoids spurious overflow.
using LaplaceFnLD = std::function<std::complex<long double>(std::complex<long double>)>;
double talbot_invert(const LaplaceFnLD& F, double t, std::size_t n = 64);
double talbot_invert_log(const LaplaceFnLD& logF, double t, std::size_t n = 64);

// log of exp(-eta(z)) and of exp(-eta(z))/z in extended precision.
LaplaceFnLD waiting_time_log_transform(const JeffreysParams& p);
LaplaceFnLD waiting_time_log_cdf_transform(const JeffreysParams& p);

struct WaitingTimeTable {
  std::vector<double> t_grid;
  std::vector<double> pdf;
  std::vector<double> cdf;
  double tail_exponent = 0.0;  // S(t) ~ t^{-tail_exponent} beyond the grid
  double negative_mass = 0.0;  // mass removed by clamping the pdf at zero
};

// 600 geometric points over [1e-6, 1e8].
std::vector<double> default_waiting_grid();
std::vector<double> geometric_grid(double lo, double hi, std::size_t n);

struct WaitingTimeOptions {
  std::size_t talbot_nodes = 64;
  // Skip the pdf-strict admissibility check (only for the degenerate oracles).
  bool bypass_validation = false;
};

WaitingTimeTable invert_waiting_time(const JeffreysParams& p, std::span<const double> t_grid,
                                     const WaitingTimeOptions& opts = {});

// Trapezoid of the pdf in log-spaced t, starting from cdf[0]; cross-check
// for the transform-based CDF.
std::vector<double> trapezoid_cdf(const WaitingTimeTable& table);

// Deterministic bit source for every stochastic routine.
using Rng = std::mt19937_64;
Rng particle_rng(std::uint64_t seed, std::uint64_t index);
double uniform01(Rng& rng);  // in (0, 1)

double sample_waiting_time(const WaitingTimeTable& table, Rng& rng);
std::vector<double> sample_waiting_times(const WaitingTimeTable& table, std::size_t count, Rng& rng);
// Inverse of the table CDF (left-continuous), including the tail patch.
double inverse_cdf(const WaitingTimeTable& table, double u);

struct Trajectory {
  std::vector<double> times;                 // event times, strictly increasing
  std::vector<std::vector<double>> positions;  // position after each event
};

struct CtrwEnsemble {
  std::size_t dim = 1;
  std::size_t n_particles = 0;
  std::size_t n_steps = 0;
  std::uint64_t seed = 0;
  std::vector<Trajectory> trajectories;
};

constexpr double kStepVariance = 2.0;  // per coordinate

CtrwEnsemble simulate(const WaitingTimeTable& table, std::size_t dim, std::size_t n_particles, std::size_t n_steps,
                      std::uint64_t seed, std::size_t workers = 1);
CtrwEnsemble simulate(const JeffreysParams& p, std::size_t dim, std::size_t n_particles, std::size_t n_steps,
                      std::uint64_t seed, std::size_t workers = 1);

struct MsdPoint {
  double t = 0.0;
  double msd = 0.0;
  double std_error = 0.0;  // standard error over particles
};

// <|X(t)|^2> with X piecewise constant between events.
std::vector<MsdPoint> msd_empirical(const CtrwEnsemble& ensemble, std::span<const double> t_query);

// Same estimator without storing trajectories: each particle runs until its
// next event passes the last query time. Particles are reduced in fixed
// blocks so the result does not depend on the worker count.
std::vector<MsdPoint> msd_monte_carlo(const WaitingTimeTable& table, std::size_t dim, std::size_t n_particles,
                                      std::span<const double> t_query, std::uint64_t seed, std::size_t workers = 1);

struct MsdAnalyticOptions {
  std::size_t N = 64;
  RhoObjective objective = RhoObjective::Prose;
  bool bypass_validation = false;
};

// Inverse Laplace transform of 1/(z eta(z)) at each t (one hyperbolic
// contour per time). The CTRW estimate per coordinate matches
// kStepVariance times this curve at long times.
std::vector<std::pair<double, double>> msd_analytic(const JeffreysParams& p, std::span<const double> t_query,
                                                    const MsdAnalyticOptions& opts = {});

// Least-squares slope of log y against log t over points with t in [lo, hi].
double fit_loglog_slope(std::span<const std::pair<double, double>> points, double lo, double hi);

}  // namespace cimclg

#include "cimclg/ctrw.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cimclg/errors.hpp"
#include "parallel.hpp"

namespace cimclg {

namespace {

using cld = std::complex<long double>;

constexpr double kMaxNegativeMass = 1e-3;
constexpr std::size_t kTailFitPoints = 20;
constexpr std::size_t kParticleBlock = 256;

cld pow_ld(cld z, long double s) {
  if (s == 0.0L) return 1.0L;
  if (z.imag() == 0.0L && z.real() > 0.0L) return std::pow(z.real(), s);
  return std::exp(s * std::log(z));
}

cld eta_ld(const JeffreysParams& p, cld z) {
  cld num = 1.0L + static_cast<long double>(p.a) * pow_ld(z, p.alpha);
  for (const auto& m : p.minor_alpha) num += static_cast<long double>(m.coeff) * pow_ld(z, m.order);
  cld den = 1.0L + static_cast<long double>(p.b) * pow_ld(z, p.beta);
  for (const auto& m : p.minor_beta) den += static_cast<long double>(m.coeff) * pow_ld(z, m.order);
  return pow_ld(z, p.gamma) * num / den;
}

}  // namespace

double talbot_invert_log(const LaplaceFnLD& logF, double t, std::size_t n) {
  if (!(t > 0.0)) throw DomainError("talbot_invert needs t > 0");
  if (n < 2) throw ConfigError("talbot_invert needs at least 2 nodes");
  const long double M = static_cast<long double>(n);
  const long double tl = t;
  const long double r = 2.0L * M / (5.0L * tl);
  const long double pi = std::numbers::pi_v<long double>;

  long double acc = 0.5L * std::exp(cld(r * tl, 0.0L) + logF(cld(r, 0.0L))).real();
  for (std::size_t k = 1; k < n; ++k) {
    const long double th = static_cast<long double>(k) * pi / M;
    const long double cot = std::cos(th) / std::sin(th);
    const cld s(r * th * cot, r * th);
    const long double sigma = th + (th * cot - 1.0L) * cot;
    acc += (std::exp(s * tl + logF(s)) * cld(1.0L, sigma)).real();
  }
  return static_cast<double>(r / M * acc);
}

double talbot_invert(const LaplaceFnLD& F, double t, std::size_t n) {
  return talbot_invert_log([&F](cld s) { return std::log(F(s)); }, t, n);
}

LaplaceFnLD waiting_time_log_transform(const JeffreysParams& p) {
  return [p](cld z) { return -eta_ld(p, z); };
}

LaplaceFnLD waiting_time_log_cdf_transform(const JeffreysParams& p) {
  return [p](cld z) { return -eta_ld(p, z) - std::log(z); };
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw ConfigError("geometric_grid needs 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double ratio = std::log(hi / lo);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> default_waiting_grid() { return geometric_grid(1e-6, 1e8, 600); }

WaitingTimeTable invert_waiting_time(const JeffreysParams& p, std::span<const double> t_grid,
                                     const WaitingTimeOptions& opts) {
  if (!opts.bypass_validation) require_admissible(p, Strictness::PdfStrict);
  if (t_grid.size() < 2) throw ConfigError("waiting-time grid needs at least 2 points");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0)) throw ConfigError("waiting-time grid must be positive");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw ConfigError("waiting-time grid must be strictly increasing");
  }

  WaitingTimeTable tab;
  tab.t_grid.assign(t_grid.begin(), t_grid.end());
  const auto pdf_hat = waiting_time_log_transform(p);
  const auto cdf_hat = waiting_time_log_cdf_transform(p);
  const std::size_t n = t_grid.size();
  tab.pdf.resize(n);
  tab.cdf.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    tab.pdf[i] = talbot_invert_log(pdf_hat, t_grid[i], opts.talbot_nodes);
    tab.cdf[i] = talbot_invert_log(cdf_hat, t_grid[i], opts.talbot_nodes);
    if (!std::isfinite(tab.pdf[i]) || !std::isfinite(tab.cdf[i]))
      throw InversionError("waiting-time inversion is not finite at t = " + std::to_string(t_grid[i]));
  }

  // Mass carried by the negative part of the pdf.
  double neg = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = std::min(0.0, tab.pdf[i]), b = std::min(0.0, tab.pdf[i + 1]);
    neg += 0.5 * (t_grid[i + 1] - t_grid[i]) * std::abs(a + b);
  }
  tab.negative_mass = neg;
  if (neg > kMaxNegativeMass)
    throw InversionError("waiting-time inversion carries negative mass " + std::to_string(neg) +
                         " (parameters are probably not pdf-admissible)");
  for (auto& v : tab.pdf)
    if (v < 0.0) v = 0.0;

  double running = 0.0;
  for (auto& c : tab.cdf) {
    c = std::clamp(c, 0.0, 1.0);
    running = std::max(running, c);
    c = running;
  }

  // Survival-function slope over the last grid points that still carry mass.
  std::vector<std::pair<double, double>> tail;
  for (std::size_t i = n; i-- > 0 && tail.size() < kTailFitPoints;) {
    const double s = 1.0 - tab.cdf[i];
    if (s > 1e-12) tail.emplace_back(t_grid[i], s);
  }
  if (tail.size() >= 5) {
    std::reverse(tail.begin(), tail.end());
    tab.tail_exponent = std::max(0.0, -fit_loglog_slope(tail, tail.front().first, tail.back().first));
  }
  return tab;
}

std::vector<double> trapezoid_cdf(const WaitingTimeTable& table) {
  const auto& t = table.t_grid;
  std::vector<double> c(t.size());
  c[0] = table.cdf[0];
  for (std::size_t i = 1; i < t.size(); ++i) c[i] = c[i - 1] + 0.5 * (t[i] - t[i - 1]) * (table.pdf[i] + table.pdf[i - 1]);
  return c;
}

Rng particle_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

double uniform01(Rng& rng) {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

namespace {

// Box-Muller on our own uniforms so the stream is library independent.
struct GaussianSource {
  bool has_spare = false;
  double spare = 0.0;
  double next(Rng& rng) {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    const double u1 = uniform01(rng), u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    spare = r * std::sin(th);
    has_spare = true;
    return r * std::cos(th);
  }
};

}  // namespace

double inverse_cdf(const WaitingTimeTable& table, double u) {
  const auto& t = table.t_grid;
  const auto& c = table.cdf;
  if (u <= c.front()) return t.front();
  if (u > c.back()) {
    const double s_last = 1.0 - c.back();
    if (table.tail_exponent > 0.0 && s_last > 0.0) return t.back() * std::pow(s_last / (1.0 - u), 1.0 / table.tail_exponent);
    return t.back();
  }
  const auto it = std::lower_bound(c.begin(), c.end(), u);
  const std::size_t i = static_cast<std::size_t>(it - c.begin());
  const double w = (u - c[i - 1]) / (c[i] - c[i - 1]);
  return std::exp(std::log(t[i - 1]) + w * (std::log(t[i]) - std::log(t[i - 1])));
}

double sample_waiting_time(const WaitingTimeTable& table, Rng& rng) { return inverse_cdf(table, uniform01(rng)); }

std::vector<double> sample_waiting_times(const WaitingTimeTable& table, std::size_t count, Rng& rng) {
  if (count < 1) throw ConfigError("sample count must be >= 1");
  std::vector<double> out(count);
  for (auto& v : out) v = sample_waiting_time(table, rng);
  return out;
}

CtrwEnsemble simulate(const WaitingTimeTable& table, std::size_t dim, std::size_t n_particles, std::size_t n_steps,
                      std::uint64_t seed, std::size_t workers) {
  if (dim != 1 && dim != 2) throw ConfigError("CTRW dimension must be 1 or 2");
  CtrwEnsemble ens;
  ens.dim = dim;
  ens.n_particles = n_particles;
  ens.n_steps = n_steps;
  ens.seed = seed;
  ens.trajectories.resize(n_particles);
  const double sd = std::sqrt(kStepVariance);
  detail::parallel_for(n_particles, workers, [&](std::size_t i) {
    Rng rng = particle_rng(seed, i);
    GaussianSource gauss;
    auto& tr = ens.trajectories[i];
    tr.times.reserve(n_steps);
    tr.positions.reserve(n_steps);
    double t = 0.0;
    std::vector<double> x(dim, 0.0);
    for (std::size_t s = 0; s < n_steps; ++s) {
      const double next = t + sample_waiting_time(table, rng);
      // Keep event times strictly increasing even if a wait underflows.
      t = next > t ? next : std::nextafter(t, INFINITY);
      for (auto& xi : x) xi += sd * gauss.next(rng);
      tr.times.push_back(t);
      tr.positions.push_back(x);
    }
  });
  return ens;
}

CtrwEnsemble simulate(const JeffreysParams& p, std::size_t dim, std::size_t n_particles, std::size_t n_steps,
                      std::uint64_t seed, std::size_t workers) {
  const auto grid = default_waiting_grid();
  const auto table = invert_waiting_time(p, grid);
  return simulate(table, dim, n_particles, n_steps, seed, workers);
}

namespace {

std::vector<MsdPoint> finish_msd(std::span<const double> t_query, const std::vector<double>& sum,
                                 const std::vector<double>& sum2, std::size_t n) {
  std::vector<MsdPoint> out(t_query.size());
  const double dn = static_cast<double>(n);
  for (std::size_t q = 0; q < t_query.size(); ++q) {
    const double mean = sum[q] / dn;
    const double var = n > 1 ? std::max(0.0, (sum2[q] - dn * mean * mean) / (dn - 1.0)) : 0.0;
    out[q] = {t_query[q], mean, std::sqrt(var / dn)};
  }
  return out;
}

double squared_norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace

std::vector<MsdPoint> msd_empirical(const CtrwEnsemble& ensemble, std::span<const double> t_query) {
  if (ensemble.trajectories.empty()) throw ConfigError("msd_empirical needs a nonempty ensemble");
  const std::size_t nq = t_query.size();
  std::vector<double> sum(nq, 0.0), sum2(nq, 0.0);
  for (const auto& tr : ensemble.trajectories) {
    for (std::size_t q = 0; q < nq; ++q) {
      const auto it = std::upper_bound(tr.times.begin(), tr.times.end(), t_query[q]);
      if (it == tr.times.begin()) continue;  // still at the origin
      const double r2 = squared_norm(tr.positions[static_cast<std::size_t>(it - tr.times.begin()) - 1]);
      sum[q] += r2;
      sum2[q] += r2 * r2;
    }
  }
  return finish_msd(t_query, sum, sum2, ensemble.trajectories.size());
}

std::vector<MsdPoint> msd_monte_carlo(const WaitingTimeTable& table, std::size_t dim, std::size_t n_particles,
                                      std::span<const double> t_query, std::uint64_t seed, std::size_t workers) {
  if (dim != 1 && dim != 2) throw ConfigError("CTRW dimension must be 1 or 2");
  if (n_particles == 0) throw ConfigError("msd_monte_carlo needs at least one particle");
  for (std::size_t q = 1; q < t_query.size(); ++q)
    if (!(t_query[q] > t_query[q - 1])) throw ConfigError("query times must be strictly increasing");
  const std::size_t nq = t_query.size();
  const std::size_t n_blocks = (n_particles + kParticleBlock - 1) / kParticleBlock;
  std::vector<std::vector<double>> bsum(n_blocks, std::vector<double>(nq, 0.0));
  std::vector<std::vector<double>> bsum2(n_blocks, std::vector<double>(nq, 0.0));
  const double sd = std::sqrt(kStepVariance);

  detail::parallel_for(n_blocks, workers, [&](std::size_t blk) {
    const std::size_t lo = blk * kParticleBlock, hi = std::min(n_particles, lo + kParticleBlock);
    auto& s1 = bsum[blk];
    auto& s2 = bsum2[blk];
    std::vector<double> x(dim);
    for (std::size_t i = lo; i < hi; ++i) {
      Rng rng = particle_rng(seed, i);
      GaussianSource gauss;
      std::fill(x.begin(), x.end(), 0.0);
      double t = 0.0;
      std::size_t q = 0;
      while (q < nq) {
        const double next = t + sample_waiting_time(table, rng);
        const double r2 = squared_norm(x);
        while (q < nq && t_query[q] < next) {
          s1[q] += r2;
          s2[q] += r2 * r2;
          ++q;
        }
        t = next;
        for (auto& xi : x) xi += sd * gauss.next(rng);
      }
    }
  });

  std::vector<double> sum(nq, 0.0), sum2(nq, 0.0);
  for (std::size_t b = 0; b < n_blocks; ++b)
    for (std::size_t q = 0; q < nq; ++q) {
      sum[q] += bsum[b][q];
      sum2[q] += bsum2[b][q];
    }
  return finish_msd(t_query, sum, sum2, n_particles);
}

std::vector<std::pair<double, double>> msd_analytic(const JeffreysParams& p, std::span<const double> t_query,
                                                    const MsdAnalyticOptions& opts) {
  const SymbolSet sym = opts.bypass_validation ? SymbolSet::unchecked(p) : SymbolSet(p, Strictness::Solver);
  // One unit-time contour; the contour for time t is the same one scaled by 1/t.
  ContourConfig cc;
  cc.t0 = 1.0;
  cc.Lambda = 1.0;
  cc.N = opts.N;
  cc.objective = opts.objective;
  const ContourPlan plan = build_plan(cc);

  std::vector<std::pair<double, double>> out;
  out.reserve(t_query.size());
  for (double t : t_query) {
    if (!(t > 0.0)) throw DomainError("msd_analytic needs t > 0");
    double acc = 0.0;
    for (std::size_t k = 0; k < plan.nodes.size(); ++k) {
      const cplx z = plan.nodes[k].z / t;
      const cplx v = std::exp(plan.nodes[k].z) * sym.msd_laplace(z) * (plan.nodes[k].dz / t);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NodeFailure(k, "MSD transform is not finite");
      acc += v.imag();
    }
    out.emplace_back(t, plan.tau / std::numbers::pi * acc);
  }
  return out;
}

double fit_loglog_slope(std::span<const std::pair<double, double>> points, double lo, double hi) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (const auto& [t, y] : points) {
    if (t < lo || t > hi) continue;
    if (!(t > 0.0) || !(y > 0.0)) throw DomainError("fit_loglog_slope needs positive values");
    const double lx = std::log(t), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 5) throw ConfigError("fit_loglog_slope needs at least 5 points in the window");
  const double dn = static_cast<double>(n);
  const double den = dn * sxx - sx * sx;
  if (den == 0.0) throw DomainError("fit_loglog_slope: degenerate window");
  return (dn * sxy - sx * sy) / den;
}

}  // namespace cimclg

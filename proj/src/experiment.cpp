#include "cimclg/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cimclg/ctrw.hpp"
#include "cimclg/errors.hpp"
#include "cimclg/presets.hpp"
#include "cimclg/solver.hpp"

namespace cimclg {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "problem.kind",        "problem.name",       "params.alpha",       "params.beta",       "params.gamma",
      "params.a",            "params.b",           "params.alpha_k",     "params.beta_j",     "params.strictness",
      "params.lambda",       "contour.alpha_tilde", "contour.delta_prime", "contour.t0",       "contour.Lambda",
      "contour.N",           "contour.rho",        "contour.rho_objective", "contour.eps_machine",
      "contour.rho_grid",    "space.M",            "time.times",         "time.count",        "data.source",
      "data.kappa",          "data.initial",       "sweep.axis",         "sweep.values",      "sweep.params",
      "sweep.reference_N",   "ctrw.dim",           "ctrw.particles",     "ctrw.steps",        "ctrw.seed",
      "ctrw.talbot_nodes",   "ctrw.t_min",         "ctrw.t_max",         "ctrw.t_count",      "ctrw.fit_lo",
      "ctrw.fit_hi",         "ctrw.short_lo",      "ctrw.short_hi",      "output.dir",        "output.fields",
  };
  return keys;
}

FractionalTerm parse_term(const std::string& key, const std::string& text) {
  const auto parts = split_list(text);
  if (parts.size() != 2) throw ConfigError("key '" + key + "': expected 'order,coeff', got '" + text + "'");
  return {parse_real(key, parts[0]), parse_real(key, parts[1])};
}

std::string params_label(const JeffreysParams& p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.4g/%.4g/%.4g", p.alpha, p.beta, p.gamma);
  return buf;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("output.dir: cannot write " + path.string());
  out << text;
}

std::string join_row(const std::vector<std::string>& cells, bool whitespace) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += whitespace ? " " : ",";
    s += cells[i];
  }
  return s + "\n";
}

// Numeric CSV with a header line; whitespace variant gets a '#' header.
class CsvWriter {
 public:
  CsvWriter(std::vector<std::string> header, bool whitespace) : whitespace_(whitespace) {
    text_ = (whitespace ? "# " : "") + join_row(header, whitespace);
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_real(v));
    text_ += join_row(cells, whitespace_);
  }
  const std::string& text() const { return text_; }

 private:
  bool whitespace_;
  std::string text_;
};

struct Outputs {
  bool enabled = false;
  bool gnuplot = false;
  std::filesystem::path dir;

  // Writes `name.csv`, plus `name.dat` in gnuplot mode.
  void numeric(const std::string& name, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) const {
    if (!enabled) return;
    for (bool ws : {false, true}) {
      if (ws && !gnuplot) continue;
      CsvWriter w(header, ws);
      for (const auto& r : rows) w.row(r);
      write_text(dir / (name + (ws ? ".dat" : ".csv")), w.text());
    }
  }
};

std::string plan_line(const ContourPlan& plan, std::size_t N) {
  std::ostringstream os;
  os << "N = " << N << "; d = " << format_real(plan.d) << "; rho_star = " << format_real(plan.rho_star)
     << "; a_rho = " << format_real(plan.a_rho) << "; mu = " << format_real(plan.mu)
     << "; tau = " << format_real(plan.tau) << "; predicted_error = " << format_real(plan.predicted_error);
  return os.str();
}

std::vector<double> resolve_times(const ExperimentConfig& cfg) {
  if (!cfg.times.empty()) return cfg.times;
  return geometric_times(cfg.contour.t0, cfg.contour.Lambda, cfg.time_count);
}

// Sweep values for one block (N or M), a single dummy value otherwise.
std::vector<std::size_t> block_values(const ExperimentConfig& cfg) {
  if (cfg.sweep == SweepAxis::N || cfg.sweep == SweepAxis::M) return cfg.sweep_values;
  return {cfg.problem == ProblemKind::Scalar ? cfg.contour.N : cfg.M};
}

std::vector<JeffreysParams> resolve_param_sets(const ExperimentConfig& cfg) {
  if (cfg.param_sets.empty()) return {cfg.params};
  return cfg.param_sets;
}

struct RunState {
  const ExperimentConfig& cfg;
  const RunOptions& opts;
  Outputs out;
  std::vector<double> times;
  std::string meta_rows;
  std::size_t row_index = 0;
};

// --- deterministic solves -------------------------------------------------

struct Solve1D {
  std::vector<std::vector<double>> coeffs;
  std::vector<std::vector<double>> fields;
  ContourPlan plan;
};

LaplaceSourceSpec make_source_1d(const ExperimentConfig& cfg, const SpectralSpace1D& space, const JeffreysParams& p) {
  LaplaceSourceSpec spec;
  if (cfg.source == "example2") spec = example2_source(space, p, cfg.kappa);
  if (cfg.initial == "example3") spec.p0 = sample_nodes(space, std::function<double(double)>(example3_initial));
  return spec;
}

LaplaceSourceSpec make_source_2d(const ExperimentConfig& cfg, const SpectralSpace1D& space) {
  if (cfg.initial == "example4") return example4_source(space);
  return {};
}

ContourPlan plan_for(const ExperimentConfig& cfg, std::size_t N) {
  ContourConfig c = cfg.contour;
  c.N = N;
  return build_plan(c);
}

Solve1D solve_1d(RunState& st, const JeffreysParams& p, std::size_t M, std::size_t N) {
  const SpectralSpace1D space(M);
  const SymbolSet symbols(p, st.cfg.strictness);
  const auto spec = make_source_1d(st.cfg, space, p);
  const auto plan = plan_for(st.cfg, N);
  auto sol = cim_solve(plan, space, symbols, spec, st.times, st.opts.workers);
  return {std::move(sol.coeffs), std::move(sol.fields), plan};
}

Solve1D solve_2d(RunState& st, const JeffreysParams& p, std::size_t M, std::size_t N) {
  const SpectralSpace2D space{SpectralSpace1D(M)};
  const SymbolSet symbols(p, st.cfg.strictness);
  const auto spec = make_source_2d(st.cfg, space.base());
  const auto plan = plan_for(st.cfg, N);
  auto sol = cim_solve(plan, space, symbols, spec, st.times, st.opts.workers);
  return {std::move(sol.coeffs), std::move(sol.fields), plan};
}

void write_fields(RunState& st, std::size_t M, const Solve1D& s, bool two_d) {
  if (!st.out.enabled || !st.cfg.write_fields) return;
  const SpectralSpace1D space(M);
  const auto& x = space.nodes();
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < st.times.size(); ++k) {
    const auto& f = s.fields[k];
    if (two_d) {
      for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) rows.push_back({st.times[k], x[i], x[j], f[i * x.size() + j]});
    } else {
      for (std::size_t i = 0; i < x.size(); ++i) rows.push_back({st.times[k], x[i], f[i]});
    }
  }
  std::filesystem::create_directories(st.out.dir / "fields");
  const std::vector<std::string> header =
      two_d ? std::vector<std::string>{"t", "x", "y", "p"} : std::vector<std::string>{"t", "x", "p"};
  st.out.numeric("fields/row" + std::to_string(st.row_index), header, rows);
}

struct NormPair {
  double l2 = 0.0;
  double linf = 0.0;
};

NormPair pde_errors(RunState& st, const JeffreysParams& p, std::size_t M, const Solve1D& s, bool two_d,
                    const Solve1D* ref, std::size_t ref_M) {
  NormPair e;
  if (two_d) {
    const SpectralSpace2D space{SpectralSpace1D(M)};
    const SpectralSpace2D rspace{SpectralSpace1D(ref_M)};
    for (std::size_t k = 0; k < st.times.size(); ++k) {
      e.l2 = std::max(e.l2, l2_distance_2d(space, s.coeffs[k], rspace, ref->coeffs[k]));
      e.linf = std::max(e.linf, linf_distance_2d(space, s.coeffs[k], rspace, ref->coeffs[k]));
    }
    return e;
  }
  const SpectralSpace1D space(M);
  if (!ref) {
    (void)p;
    const double kappa = st.cfg.kappa;
    for (std::size_t k = 0; k < st.times.size(); ++k) {
      const double t = st.times[k];
      auto exact = [kappa, t](double x) { return example2_exact(kappa, t, x); };
      e.l2 = std::max(e.l2, l2_error_1d(space, s.coeffs[k], exact));
      e.linf = std::max(e.linf, linf_error_1d(space, s.coeffs[k], exact));
    }
    return e;
  }
  const SpectralSpace1D rspace(ref_M);
  for (std::size_t k = 0; k < st.times.size(); ++k) {
    e.l2 = std::max(e.l2, l2_distance_1d(space, s.coeffs[k], rspace, ref->coeffs[k]));
    e.linf = std::max(e.linf, linf_distance_1d(space, s.coeffs[k], rspace, ref->coeffs[k]));
  }
  return e;
}

void append_block(ResultTable& table, const std::string& label, const std::vector<double>& sweep,
                  const std::vector<NormPair>& errs, bool scalar) {
  std::vector<double> l2, linf;
  for (const auto& e : errs) {
    l2.push_back(e.l2);
    linf.push_back(e.linf);
  }
  const auto o2 = convergence_orders(l2, sweep);
  const auto oi = convergence_orders(linf, sweep);
  auto order_cell = [](const OrderCell& c) {
    if (c.floor) return Cell::str("floor");
    if (!c.order) return Cell::str("");
    return Cell::num(*c.order);
  };
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    std::vector<Cell> row{Cell::str(label), Cell::num(sweep[i]), Cell::num(l2[i]), order_cell(o2[i])};
    if (!scalar) {
      row.push_back(Cell::num(linf[i]));
      row.push_back(order_cell(oi[i]));
    }
    table.rows.push_back(std::move(row));
  }
}

std::string sweep_column(const ExperimentConfig& cfg) {
  switch (cfg.sweep) {
    case SweepAxis::N: return "N";
    case SweepAxis::M: return "M";
    default: return cfg.problem == ProblemKind::Scalar ? "N" : "M";
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ResultTable run_scalar(RunState& st) {
  const auto& cfg = st.cfg;
  ResultTable table;
  table.columns = {"params", "N", "error", "order"};
  const auto Ns = block_values(cfg);
  for (const auto& p : resolve_param_sets(cfg)) {
    const SymbolSet symbols(p, cfg.strictness);
    ScalarSource src;
    if (cfg.source == "example1") {
      src = example1_source(p, cfg.lambda);
    } else {
      src.p0 = 1.0;
    }
    std::vector<double> ref;
    const bool exact = cfg.source == "example1";
    if (exact) {
      for (double t : st.times) ref.push_back(example1_exact(t));
    } else {
      ref = cim_solve_scalar(plan_for(cfg, cfg.reference_N), symbols, cfg.lambda, src, st.times);
      st.meta_rows += "reference " + params_label(p) + ": " + plan_line(plan_for(cfg, cfg.reference_N), cfg.reference_N) + "\n";
    }
    std::vector<double> sweep;
    std::vector<NormPair> errs;
    for (std::size_t N : Ns) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto plan = plan_for(cfg, N);
      const auto vals = cim_solve_scalar(plan, symbols, cfg.lambda, src, st.times);
      double e = 0.0;
      for (std::size_t k = 0; k < vals.size(); ++k) e = std::max(e, std::abs(vals[k] - ref[k]));
      if (!std::isfinite(e)) throw NonFiniteError("scalar solve produced a non-finite value at N=" + std::to_string(N));
      st.meta_rows += "row " + std::to_string(st.row_index) + " " + params_label(p) + ": " + plan_line(plan, N) + "\n";
      if (st.out.enabled && cfg.write_fields) {
        std::filesystem::create_directories(st.out.dir / "fields");
        std::vector<std::vector<double>> rows;
        for (std::size_t k = 0; k < vals.size(); ++k) rows.push_back({st.times[k], vals[k]});
        st.out.numeric("fields/row" + std::to_string(st.row_index), {"t", "p"}, rows);
      }
      table.wall_seconds.push_back(seconds_since(t0));
      ++st.row_index;
      sweep.push_back(static_cast<double>(N));
      errs.push_back({e, e});
    }
    append_block(table, params_label(p), sweep, errs, true);
  }
  return table;
}

ResultTable run_pde(RunState& st, bool two_d) {
  const auto& cfg = st.cfg;
  ResultTable table;
  table.columns = {"params", sweep_column(cfg), "L2_error", "L2_order", "Linf_error", "Linf_order"};
  const bool exact = !two_d && cfg.source == "example2" && cfg.initial == "zero";
  const auto values = block_values(cfg);
  auto solve = [&](const JeffreysParams& p, std::size_t M, std::size_t N) {
    return two_d ? solve_2d(st, p, M, N) : solve_1d(st, p, M, N);
  };
  for (const auto& p : resolve_param_sets(cfg)) {
    std::optional<Solve1D> ref_N;  // shared by every row of an N sweep
    std::vector<double> sweep;
    std::vector<NormPair> errs;
    for (std::size_t v : values) {
      const std::size_t M = cfg.sweep == SweepAxis::M ? v : cfg.M;
      const std::size_t N = cfg.sweep == SweepAxis::N ? v : cfg.contour.N;
      const auto t0 = std::chrono::steady_clock::now();
      const auto s = solve(p, M, N);
      NormPair e;
      std::string ref_note;
      if (exact) {
        e = pde_errors(st, p, M, s, false, nullptr, M);
      } else if (cfg.sweep == SweepAxis::M) {
        const auto r = solve(p, 2 * M, N);
        e = pde_errors(st, p, M, s, two_d, &r, 2 * M);
        ref_note = "; reference M = " + std::to_string(2 * M);
      } else {
        if (!ref_N) {
          ref_N = solve(p, M, cfg.reference_N);
          st.meta_rows += "reference " + params_label(p) + ": M = " + std::to_string(M) + "; " +
                          plan_line(ref_N->plan, cfg.reference_N) + "\n";
        }
        e = pde_errors(st, p, M, s, two_d, &*ref_N, M);
      }
      table.wall_seconds.push_back(seconds_since(t0));
      st.meta_rows += "row " + std::to_string(st.row_index) + " " + params_label(p) + ": M = " + std::to_string(M) +
                      "; " + plan_line(s.plan, N) + ref_note + "\n";
      write_fields(st, M, s, two_d);
      ++st.row_index;
      sweep.push_back(static_cast<double>(v));
      errs.push_back(e);
    }
    append_block(table, params_label(p), sweep, errs, false);
  }
  return table;
}

ResultTable run_msd(RunState& st) {
  const auto& cfg = st.cfg;
  const auto& c = cfg.ctrw;
  const auto& p = cfg.params;
  const auto t0 = std::chrono::steady_clock::now();
  const auto grid = default_waiting_grid();
  WaitingTimeOptions wopts;
  wopts.talbot_nodes = c.talbot_nodes;
  const auto table_wt = invert_waiting_time(p, grid, wopts);
  const auto tq = geometric_grid(c.t_min, c.t_max, c.t_count);
  const auto mc = msd_monte_carlo(table_wt, c.dim, c.particles, tq, c.seed, st.opts.workers);
  const auto an = msd_analytic(p, tq);
  const double scale = kStepVariance * static_cast<double>(c.dim);

  std::vector<std::vector<double>> rows;
  std::vector<std::pair<double, double>> emp, ana;
  double max_dev = 0.0;
  for (std::size_t i = 0; i < tq.size(); ++i) {
    const double a = scale * an[i].second;
    rows.push_back({tq[i], mc[i].msd, mc[i].std_error, a});
    emp.emplace_back(tq[i], mc[i].msd);
    ana.emplace_back(tq[i], a);
    if (mc[i].std_error > 0.0) max_dev = std::max(max_dev, std::abs(mc[i].msd - a) / mc[i].std_error);
  }
  st.out.numeric("msd", {"t", "msd_empirical", "stderr", "msd_analytic"}, rows);

  const auto ts = geometric_grid(c.short_lo, c.short_hi, 11);
  const auto an_short = msd_analytic(p, ts);
  const double nu = p.alpha + p.gamma - p.beta;
  const double probe[] = {1e-8, 1e8};
  const auto an_probe = msd_analytic(p, probe);
  const double short_ratio = an_probe[0].second * gamma_fn(1.0 + nu) * (p.a / p.b) / std::pow(1e-8, nu);
  const double long_ratio = an_probe[1].second * gamma_fn(1.0 + p.gamma) / std::pow(1e8, p.gamma);

  ResultTable table;
  table.columns = {"params",        "dim",         "particles",  "slope_long_empirical", "slope_long_analytic",
                   "slope_short_analytic", "short_ratio", "long_ratio", "max_deviation_se"};
  table.rows.push_back({Cell::str(params_label(p)), Cell::num(static_cast<double>(c.dim)),
                        Cell::num(static_cast<double>(c.particles)), Cell::num(fit_loglog_slope(emp, c.fit_lo, c.fit_hi)),
                        Cell::num(fit_loglog_slope(ana, c.fit_lo, c.fit_hi)),
                        Cell::num(fit_loglog_slope(an_short, c.short_lo, c.short_hi)), Cell::num(short_ratio),
                        Cell::num(long_ratio), Cell::num(max_dev)});
  table.wall_seconds.push_back(seconds_since(t0));
  std::ostringstream os;
  os << "waiting-time table: points = " << grid.size() << "; tail_exponent = " << format_real(table_wt.tail_exponent)
     << "; negative_mass = " << format_real(table_wt.negative_mass) << "; cdf_last = " << format_real(table_wt.cdf.back())
     << "\n";
  st.meta_rows += os.str();
  return table;
}

ResultTable run_ctrw(RunState& st) {
  const auto& c = st.cfg.ctrw;
  const auto t0 = std::chrono::steady_clock::now();
  WaitingTimeOptions wopts;
  wopts.talbot_nodes = c.talbot_nodes;
  const auto wt = invert_waiting_time(st.cfg.params, default_waiting_grid(), wopts);
  const auto ens = simulate(wt, c.dim, c.particles, c.steps, c.seed, st.opts.workers);

  std::vector<std::vector<double>> rows;
  ResultTable table;
  table.columns = {"particle", "events", "t_last", "r2_last"};
  for (std::size_t i = 0; i < ens.trajectories.size(); ++i) {
    const auto& tr = ens.trajectories[i];
    std::vector<double> origin{static_cast<double>(i), 0.0, 0.0};
    origin.resize(3 + c.dim, 0.0);
    rows.push_back(origin);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      std::vector<double> r{static_cast<double>(i), static_cast<double>(k + 1), tr.times[k]};
      r.insert(r.end(), tr.positions[k].begin(), tr.positions[k].end());
      rows.push_back(std::move(r));
    }
    double r2 = 0.0;
    if (!tr.positions.empty())
      for (double x : tr.positions.back()) r2 += x * x;
    table.rows.push_back({Cell::num(static_cast<double>(i)), Cell::num(static_cast<double>(tr.times.size())),
                          Cell::num(tr.times.empty() ? 0.0 : tr.times.back()), Cell::num(r2)});
  }
  std::vector<std::string> header{"particle", "event_index", "t", "x"};
  if (c.dim == 2) header.push_back("y");
  st.out.numeric("trajectories", header, rows);
  table.wall_seconds.assign(table.rows.size(), 0.0);
  if (!table.wall_seconds.empty()) table.wall_seconds.back() = seconds_since(t0);
  st.meta_rows += "waiting-time table: tail_exponent = " + format_real(wt.tail_exponent) + "\n";
  return table;
}

}  // namespace

ProblemKind parse_problem(const std::string& text) {
  const auto s = lower(text);
  if (s == "scalar") return ProblemKind::Scalar;
  if (s == "pde1d") return ProblemKind::Pde1d;
  if (s == "pde2d") return ProblemKind::Pde2d;
  if (s == "ctrw") return ProblemKind::Ctrw;
  if (s == "msd") return ProblemKind::Msd;
  throw ConfigError("key 'problem.kind': unknown problem '" + text + "'");
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Scalar: return "scalar";
    case ProblemKind::Pde1d: return "pde1d";
    case ProblemKind::Pde2d: return "pde2d";
    case ProblemKind::Ctrw: return "ctrw";
    case ProblemKind::Msd: return "msd";
  }
  return "?";
}

SweepAxis parse_sweep_axis(const std::string& text) {
  const auto s = lower(text);
  if (s == "none" || s.empty()) return SweepAxis::None;
  if (s == "n") return SweepAxis::N;
  if (s == "m") return SweepAxis::M;
  if (s == "params") return SweepAxis::Params;
  throw ConfigError("key 'sweep.axis': unknown axis '" + text + "' (none | N | M | params)");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::None: return "none";
    case SweepAxis::N: return "N";
    case SweepAxis::M: return "M";
    case SweepAxis::Params: return "params";
  }
  return "?";
}

ExperimentConfig parse_experiment(const ConfigFile& file) {
  for (const auto& e : file.entries()) {
    const auto q = qualified_name(e);
    if (!known_keys().count(q))
      throw ConfigError("unknown key '" + q + "' (" + file.origin() + ":" + std::to_string(e.line) + ")");
  }
  ExperimentConfig cfg;
  cfg.raw = file;
  auto get = [&](const std::string& k) { return file.get(k); };
  auto real = [&](const std::string& k, double& dst) {
    if (auto v = get(k)) dst = parse_real(k, *v);
  };
  auto natural = [&](const std::string& k, std::size_t& dst) {
    if (auto v = get(k)) dst = parse_natural(k, *v);
  };

  if (auto v = get("problem.kind")) {
    cfg.problem = parse_problem(*v);
  } else {
    throw ConfigError("missing key 'problem.kind'");
  }
  if (auto v = get("problem.name")) cfg.name = *v;
  const bool stochastic = cfg.problem == ProblemKind::Ctrw || cfg.problem == ProblemKind::Msd;

  auto& p = cfg.params;
  real("params.alpha", p.alpha);
  real("params.beta", p.beta);
  real("params.gamma", p.gamma);
  real("params.a", p.a);
  real("params.b", p.b);
  for (const auto& s : file.get_all("params.alpha_k")) p.minor_alpha.push_back(parse_term("params.alpha_k", s));
  for (const auto& s : file.get_all("params.beta_j")) p.minor_beta.push_back(parse_term("params.beta_j", s));
  real("params.lambda", cfg.lambda);
  cfg.strictness = stochastic ? Strictness::PdfStrict : Strictness::Solver;
  if (auto v = get("params.strictness")) {
    try {
      cfg.strictness = parse_strictness(*v);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("key 'params.strictness': ") + e.what());
    }
  }
  if (stochastic && cfg.strictness != Strictness::PdfStrict)
    throw ConfigError("key 'params.strictness': ctrw and msd problems require pdf-strict");

  auto& c = cfg.contour;
  real("contour.alpha_tilde", c.alpha_tilde);
  real("contour.delta_prime", c.delta_prime);
  real("contour.t0", c.t0);
  real("contour.Lambda", c.Lambda);
  natural("contour.N", c.N);
  real("contour.eps_machine", c.eps_machine);
  natural("contour.rho_grid", c.rho_grid);
  if (auto v = get("contour.rho")) {
    c.rho = parse_real("contour.rho", *v);
    if (!(*c.rho > 0.0 && *c.rho < 1.0)) throw ConfigError("key 'contour.rho': must lie in (0, 1)");
  }
  if (auto v = get("contour.rho_objective")) {
    try {
      c.objective = parse_rho_objective(*v);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("key 'contour.rho_objective': ") + e.what());
    }
  }
  if (!(c.t0 > 0.0)) throw ConfigError("key 'contour.t0': must be positive");
  if (!(c.Lambda >= 1.0)) throw ConfigError("key 'contour.Lambda': must be >= 1");
  if (c.N < 2) throw ConfigError("key 'contour.N': must be >= 2");

  natural("space.M", cfg.M);
  if (auto v = get("time.times")) cfg.times = parse_real_list("time.times", *v);
  natural("time.count", cfg.time_count);
  if (cfg.times.empty() && cfg.time_count < 1) throw ConfigError("key 'time.count': must be >= 1");
  if (!stochastic) {
    const double hi = c.t0 * c.Lambda;
    for (double t : cfg.times)
      if (t < c.t0 * (1 - 1e-12) || t > hi * (1 + 1e-12))
        throw ConfigError("key 'time.times': " + format_real(t) + " lies outside the contour window [t0, Lambda t0]");
  }

  if (auto v = get("data.source")) cfg.source = lower(*v);
  real("data.kappa", cfg.kappa);
  if (auto v = get("data.initial")) cfg.initial = lower(*v);
  const auto& src = cfg.source;
  const auto& ini = cfg.initial;
  switch (cfg.problem) {
    case ProblemKind::Scalar:
      if (src != "example1" && src != "zero") throw ConfigError("key 'data.source': scalar supports example1 | zero");
      if (ini != "zero") throw ConfigError("key 'data.initial': scalar problems take p0 from the source preset");
      break;
    case ProblemKind::Pde1d:
      if (src != "example2" && src != "zero") throw ConfigError("key 'data.source': pde1d supports example2 | zero");
      if (ini != "zero" && ini != "example3") throw ConfigError("key 'data.initial': pde1d supports zero | example3");
      break;
    case ProblemKind::Pde2d:
      if (src != "zero") throw ConfigError("key 'data.source': pde2d supports zero only");
      if (ini != "zero" && ini != "example4") throw ConfigError("key 'data.initial': pde2d supports zero | example4");
      break;
    default:
      break;
  }
  if (src == "example2" && !(cfg.kappa > 0.0)) throw ConfigError("key 'data.kappa': must be positive");

  if (auto v = get("sweep.axis")) cfg.sweep = parse_sweep_axis(*v);
  if (auto v = get("sweep.values")) cfg.sweep_values = parse_natural_list("sweep.values", *v);
  if (auto v = get("sweep.params")) {
    for (const auto& tuple : split_list(*v, ';')) {
      const auto abg = parse_real_list("sweep.params", tuple);
      if (abg.size() != 3) throw ConfigError("key 'sweep.params': expected alpha,beta,gamma tuples, got '" + tuple + "'");
      JeffreysParams q = p;
      q.alpha = abg[0];
      q.beta = abg[1];
      q.gamma = abg[2];
      cfg.param_sets.push_back(q);
    }
  }
  natural("sweep.reference_N", cfg.reference_N);
  if (stochastic && (cfg.sweep != SweepAxis::None || !cfg.param_sets.empty()))
    throw ConfigError("key 'sweep.axis': ctrw and msd runs do not sweep");
  if (cfg.sweep == SweepAxis::N || cfg.sweep == SweepAxis::M) {
    if (cfg.sweep_values.empty()) throw ConfigError("key 'sweep.values': required for an N or M sweep");
    for (std::size_t i = 1; i < cfg.sweep_values.size(); ++i)
      if (cfg.sweep_values[i] <= cfg.sweep_values[i - 1])
        throw ConfigError("key 'sweep.values': must be strictly increasing");
    if (cfg.sweep_values.front() < 1) throw ConfigError("key 'sweep.values': must be positive");
  }
  if (cfg.sweep == SweepAxis::M && cfg.problem == ProblemKind::Scalar)
    throw ConfigError("key 'sweep.axis': scalar problems have no M");
  if (cfg.sweep == SweepAxis::Params && cfg.param_sets.empty())
    throw ConfigError("key 'sweep.params': required for a params sweep");
  if (cfg.problem == ProblemKind::Pde1d || cfg.problem == ProblemKind::Pde2d) {
    const std::size_t minM = cfg.sweep == SweepAxis::M ? cfg.sweep_values.front() : cfg.M;
    if (minM < 2) throw ConfigError(std::string("key '") + (cfg.sweep == SweepAxis::M ? "sweep.values" : "space.M") +
                                    "': polynomial degree must be >= 2");
  }

  auto& w = cfg.ctrw;
  natural("ctrw.dim", w.dim);
  natural("ctrw.particles", w.particles);
  natural("ctrw.steps", w.steps);
  if (auto v = get("ctrw.seed")) w.seed = parse_natural("ctrw.seed", *v);
  natural("ctrw.talbot_nodes", w.talbot_nodes);
  real("ctrw.t_min", w.t_min);
  real("ctrw.t_max", w.t_max);
  natural("ctrw.t_count", w.t_count);
  real("ctrw.fit_lo", w.fit_lo);
  real("ctrw.fit_hi", w.fit_hi);
  real("ctrw.short_lo", w.short_lo);
  real("ctrw.short_hi", w.short_hi);
  if (stochastic) {
    if (w.dim != 1 && w.dim != 2) throw ConfigError("key 'ctrw.dim': must be 1 or 2");
    if (w.particles < 1) throw ConfigError("key 'ctrw.particles': must be >= 1");
    if (!(w.t_min > 0.0 && w.t_max > w.t_min)) throw ConfigError("key 'ctrw.t_max': need 0 < t_min < t_max");
    if (w.t_count < 2) throw ConfigError("key 'ctrw.t_count': must be >= 2");
    if (!(w.fit_lo > 0.0 && w.fit_hi > w.fit_lo)) throw ConfigError("key 'ctrw.fit_hi': need 0 < fit_lo < fit_hi");
    if (!(w.short_lo > 0.0 && w.short_hi > w.short_lo))
      throw ConfigError("key 'ctrw.short_hi': need 0 < short_lo < short_hi");
  }

  if (auto v = get("output.dir")) cfg.output = *v;
  if (auto v = get("output.fields")) cfg.write_fields = parse_bool("output.fields", *v);

  // Parameter admissibility, with the key that carries the values.
  try {
    for (const auto& q : cfg.param_sets.empty() ? std::vector<JeffreysParams>{p} : cfg.param_sets)
      require_admissible(q, cfg.strictness);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(cfg.param_sets.empty() ? "keys 'params.*': " : "key 'sweep.params': ") + e.what());
  }
  if (src == "example1" && (!p.minor_alpha.empty() || !p.minor_beta.empty()))
    throw ConfigError("key 'params.alpha_k': the example1 preset needs K = J = 0");
  return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) { return parse_experiment(ConfigFile::load(path)); }

std::vector<OrderCell> convergence_orders(const std::vector<double>& errors, const std::vector<double>& sweep) {
  if (errors.size() != sweep.size()) throw ShapeError("convergence_orders: errors and sweep differ in length");
  std::vector<OrderCell> out(errors.size());
  for (std::size_t j = 1; j < errors.size(); ++j) {
    if (!(errors[j - 1] > 0.0) || !(errors[j] > 0.0)) {
      out[j].floor = true;
      continue;
    }
    if (!(sweep[j] > sweep[j - 1]) || !(sweep[j - 1] > 0.0))
      throw DomainError("convergence_orders: sweep must be positive and strictly increasing");
    out[j].order = std::log(errors[j - 1] / errors[j]) / std::log(sweep[j] / sweep[j - 1]);
  }
  return out;
}

std::size_t ResultTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ShapeError("no column named '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

double ResultTable::value(std::size_t row, const std::string& name) const {
  const auto& cell = rows.at(row).at(column(name));
  if (!cell.number) throw ShapeError("cell '" + name + "' in row " + std::to_string(row) + " is not numeric");
  return *cell.number;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string format_table(const ResultTable& table, bool whitespace) {
  std::string s = (whitespace ? "# " : "") + join_row(table.columns, whitespace);
  for (const auto& row : table.rows) {
    std::vector<std::string> cells;
    for (const auto& c : row) {
      if (c.number) {
        cells.push_back(format_real(*c.number));
      } else if (whitespace) {
        // gnuplot reads NaN as a missing point; labels keep their text.
        cells.push_back(c.text.empty() || c.text == "floor" ? "NaN" : c.text);
      } else {
        cells.push_back(c.text);
      }
    }
    s += join_row(cells, whitespace);
  }
  return s;
}

ResultTable run(const ExperimentConfig& cfg, const RunOptions& opts) {
  RunState st{cfg, opts, {}, {}, {}, 0};
  st.out.enabled = opts.write_files;
  st.out.gnuplot = opts.gnuplot_friendly;
  st.out.dir = opts.out ? *opts.out : cfg.output;
  if (st.out.enabled) std::filesystem::create_directories(st.out.dir);
  const bool stochastic = cfg.problem == ProblemKind::Ctrw || cfg.problem == ProblemKind::Msd;
  if (!stochastic) st.times = resolve_times(cfg);

  ResultTable table;
  switch (cfg.problem) {
    case ProblemKind::Scalar: table = run_scalar(st); break;
    case ProblemKind::Pde1d: table = run_pde(st, false); break;
    case ProblemKind::Pde2d: table = run_pde(st, true); break;
    case ProblemKind::Msd: table = run_msd(st); break;
    case ProblemKind::Ctrw: table = run_ctrw(st); break;
  }

  if (!st.out.enabled) return table;
  write_text(st.out.dir / "table.csv", format_table(table, false));
  if (opts.gnuplot_friendly) write_text(st.out.dir / "table.dat", format_table(table, true));

  std::ostringstream meta;
  meta << "# experiment " << cfg.name << "\n[config]\n" << cfg.raw.echo() << "[resolved]\nproblem = "
       << to_string(cfg.problem) << "\nstrictness = " << to_string(cfg.strictness)
       << "\nrho_objective = " << to_string(cfg.contour.objective) << "\nsweep = " << to_string(cfg.sweep) << "\n";
  if (!st.times.empty()) {
    meta << "times =";
    for (double t : st.times) meta << " " << format_real(t);
    meta << "\n";
  }
  if (stochastic) meta << "seed = " << cfg.ctrw.seed << "\n";
  meta << "[runs]\n" << st.meta_rows;
  write_text(st.out.dir / "meta.txt", meta.str());

  std::ostringstream timing;
  for (std::size_t i = 0; i < table.wall_seconds.size(); ++i) timing << "row " << i << " " << table.wall_seconds[i] << "\n";
  write_text(st.out.dir / "timing.txt", timing.str());
  return table;
}

// --- built-in tables ------------------------------------------------------

namespace {

const char* kTableBase = R"([contour]
t0 = 0.01
Lambda = 150
N = 50
[params]
a = 10
b = 10
[time]
times = 0.5
[output]
fields = false
)";

std::string table_config(const std::string& name) {
  const std::string sets12 = "0.25,0.10,0.25; 0.50,0.35,0.45";
  const std::string sets34 = "0.75,0.15,0.15; 1.00,1.00,1.00";
  const std::string all4 = sets12 + "; " + sets34;
  std::string s = kTableBase;
  auto add = [&](const std::string& text) { s += text; };
  if (name == "table1" || name == "table2") {
    add("[problem]\nkind = pde1d\nname = " + name + "\n[data]\nsource = example2\nkappa = 1\n"
        "[sweep]\naxis = M\nvalues = 4,6,8,10,12,14,16\nparams = " + (name == "table1" ? sets12 : sets34) + "\n");
  } else if (name == "table4") {
    add("[problem]\nkind = pde1d\nname = table4\n[space]\nM = 20\n[data]\ninitial = example3\n"
        "[sweep]\naxis = N\nvalues = 4,6,10,20,30,50\nreference_N = 100\nparams = " + all4 + "\n");
  } else if (name == "table5" || name == "table6") {
    add("[problem]\nkind = pde1d\nname = " + name + "\n[data]\ninitial = example3\n"
        "[sweep]\naxis = M\nvalues = 6,12,24\nparams = " + (name == "table5" ? sets12 : sets34) + "\n");
  } else if (name == "table7") {
    add("[problem]\nkind = pde2d\nname = table7\n[space]\nM = 12\n[data]\ninitial = example4\n"
        "[sweep]\naxis = N\nvalues = 4,6,10,20,30,50\nreference_N = 100\nparams = " + all4 + "\n");
  } else if (name == "table8" || name == "table9") {
    add("[problem]\nkind = pde2d\nname = " + name + "\n[data]\ninitial = example4\n"
        "[sweep]\naxis = M\nvalues = 6,12,24\nparams = " +
        (name == "table8" ? std::string("0.25,0.15,0.25; 0.50,0.35,0.45") : sets34) + "\n");
  } else if (name.rfind("fig2a-L", 0) == 0) {
    const double L = parse_real("table", name.substr(7));
    s = "[problem]\nkind = scalar\nname = " + name + "\n[params]\nalpha = 0.5\nbeta = 0.35\ngamma = 0.45\na = 1\n"
        "b = 100\nlambda = 1.5\n[contour]\nLambda = " + name.substr(7) + "\nt0 = " + format_real(0.5 / L) +
        "\nrho_objective = prose\n[data]\nsource = example1\n[sweep]\naxis = N\n"
        "values = 4,8,12,16,20,24,28,32,36,40,44,48,52,56,60,64,68,72,76,80\n[output]\nfields = false\n";
  } else if (name == "msd") {
    s = "[problem]\nkind = msd\nname = msd\n[params]\nalpha = 0.4\nbeta = 0.3\ngamma = 0.4\na = 1\nb = 1\n"
        "[ctrw]\ndim = 1\nparticles = 100000\nseed = 20240601\nt_min = 1e5\nt_max = 1e7\nt_count = 21\n"
        "fit_lo = 1e5\nfit_hi = 1e7\n";
  } else {
    throw ConfigError("unknown table '" + name + "'");
  }
  return s;
}

}  // namespace

std::vector<std::string> builtin_table_names() {
  return {"table1", "table2", "table4", "table5", "table6", "table7", "table8", "table9",
          "fig2a-L2", "fig2a-L10", "fig2a-L50", "fig2a-L150", "msd"};
}

std::string builtin_table_config(const std::string& name) { return table_config(name); }

}  // namespace cimclg

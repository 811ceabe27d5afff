#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cimclg/config.hpp"
#include "cimclg/contour.hpp"
#include "cimclg/params.hpp"

namespace cimclg {

enum class ProblemKind { Scalar, Pde1d, Pde2d, Ctrw, Msd };
enum class SweepAxis { None, N, M, Params };

ProblemKind parse_problem(const std::string& text);
std::string to_string(ProblemKind kind);
SweepAxis parse_sweep_axis(const std::string& text);
std::string to_string(SweepAxis axis);

struct CtrwSettings {
  std::size_t dim = 1;
  std::size_t particles = 1000;
  std::size_t steps = 100;  // per trajectory (ctrw problem)
  std::uint64_t seed = 1;
  std::size_t talbot_nodes = 64;
  // msd query grid and fit windows
  double t_min = 1e5;
  double t_max = 1e7;
  std::size_t t_count = 21;
  double fit_lo = 1e5;
  double fit_hi = 1e7;
  double short_lo = 1e-8;
  double short_hi = 1e-6;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ProblemKind problem = ProblemKind::Pde1d;
  JeffreysParams params;
  Strictness strictness = Strictness::Solver;
  ContourConfig contour;
  std::size_t M = 16;

  // Query times; empty means `time_count` geometric points over [t0, Lambda t0].
  std::vector<double> times;
  std::size_t time_count = 20;

  std::string source = "zero";  // example1 | example2 | zero
  double kappa = 1.0;           // example2 time power
  double lambda = 1.0;          // scalar problem coefficient
  std::string initial = "zero";  // zero | example3 | example4

  SweepAxis sweep = SweepAxis::None;
  std::vector<std::size_t> sweep_values;
  // Parameter tuples (alpha, beta, gamma); with an N or M sweep the sweep is
  // repeated per tuple.
  std::vector<JeffreysParams> param_sets;
  std::size_t reference_N = 100;

  CtrwSettings ctrw;

  std::filesystem::path output = "out";
  bool write_fields = true;

  ConfigFile raw;  // echoed into meta.txt
};

// Builds and validates an experiment from parsed config text. Errors name the
// offending key.
ExperimentConfig parse_experiment(const ConfigFile& file);
ExperimentConfig load_experiment(const std::filesystem::path& path);

struct OrderCell {
  std::optional<double> order;  // empty in the first row
  bool floor = false;           // a non-positive error in the pair
};

// Order_j = ln(e_{j-1}/e_j) / ln(s_j/s_{j-1}); the first entry is blank.
std::vector<OrderCell> convergence_orders(const std::vector<double>& errors, const std::vector<double>& sweep);

// A table cell is either a number or text (labels, blanks, `floor`).
struct Cell {
  std::optional<double> number;
  std::string text;
  static Cell num(double v) { return {v, {}}; }
  static Cell str(std::string s) { return {std::nullopt, std::move(s)}; }
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<double> wall_seconds;  // per row; kept out of table.csv

  std::size_t column(const std::string& name) const;
  // Numeric value at (row, column name); throws if the cell is text.
  double value(std::size_t row, const std::string& name) const;
};

struct RunOptions {
  std::size_t workers = 1;
  std::optional<std::filesystem::path> out;  // overrides config output
  bool gnuplot_friendly = false;
  bool write_files = true;
};

// Runs the sweep and writes table.csv, meta.txt, timing.txt and the
// problem-specific CSVs under the output directory.
ResultTable run(const ExperimentConfig& cfg, const RunOptions& opts = {});

// "%.16e" formatting used by every CSV.
std::string format_real(double v);
std::string format_table(const ResultTable& table, bool whitespace);

// Built-in experiment configs reproducing the published tables and figures,
// e.g. "table1", "table4", "fig2a".
std::vector<std::string> builtin_table_names();
std::string builtin_table_config(const std::string& name);

}  // namespace cimclg

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cimclg/ctrw.hpp"
#include "cimclg/errors.hpp"
#include "cimclg/experiment.hpp"
#include "cimclg/presets.hpp"
#include "cimclg/solver.hpp"

namespace py = pybind11;
using namespace cimclg;

namespace {

ContourConfig contour_from(double t0, double Lambda, std::size_t N, const std::string& objective,
                           std::optional<double> rho) {
  ContourConfig c;
  c.t0 = t0;
  c.Lambda = Lambda;
  c.N = N;
  c.objective = parse_rho_objective(objective);
  c.rho = rho;
  return c;
}

py::array_t<double> to_array(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size(), m = rows.empty() ? 0 : rows.front().size();
  py::array_t<double> a({n, m});
  auto v = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) v(i, j) = rows[i][j];
  return a;
}

py::dict plan_dict(const ContourPlan& p) {
  py::dict d;
  d["d"] = p.d;
  d["rho_star"] = p.rho_star;
  d["a_rho"] = p.a_rho;
  d["mu"] = p.mu;
  d["tau"] = p.tau;
  d["predicted_error"] = p.predicted_error;
  std::vector<cplx> z, dz;
  for (const auto& n : p.nodes) {
    z.push_back(n.z);
    dz.push_back(n.dz);
  }
  d["z"] = py::array(py::cast(z));
  d["dz"] = py::array(py::cast(dz));
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "CIM-CLG solver core";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  static py::exception<ConfigError> config_error(m, "ConfigError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<FractionalTerm>(m, "FractionalTerm")
      .def(py::init<double, double>(), py::arg("order"), py::arg("coeff"))
      .def_readwrite("order", &FractionalTerm::order)
      .def_readwrite("coeff", &FractionalTerm::coeff);

  py::class_<JeffreysParams>(m, "JeffreysParams")
      .def(py::init([](double alpha, double beta, double gamma, double a, double b,
                       std::vector<std::pair<double, double>> alpha_k, std::vector<std::pair<double, double>> beta_j) {
             JeffreysParams p;
             p.alpha = alpha;
             p.beta = beta;
             p.gamma = gamma;
             p.a = a;
             p.b = b;
             for (auto [o, c] : alpha_k) p.minor_alpha.push_back({o, c});
             for (auto [o, c] : beta_j) p.minor_beta.push_back({o, c});
             return p;
           }),
           py::arg("alpha") = 0.5, py::arg("beta") = 0.35, py::arg("gamma") = 0.45, py::arg("a") = 1.0,
           py::arg("b") = 1.0, py::arg("alpha_k") = std::vector<std::pair<double, double>>{},
           py::arg("beta_j") = std::vector<std::pair<double, double>>{})
      .def_readwrite("alpha", &JeffreysParams::alpha)
      .def_readwrite("beta", &JeffreysParams::beta)
      .def_readwrite("gamma", &JeffreysParams::gamma)
      .def_readwrite("a", &JeffreysParams::a)
      .def_readwrite("b", &JeffreysParams::b)
      .def_readwrite("minor_alpha", &JeffreysParams::minor_alpha)
      .def_readwrite("minor_beta", &JeffreysParams::minor_beta)
      .def("__repr__", [](const JeffreysParams& p) {
        return "JeffreysParams(alpha=" + std::to_string(p.alpha) + ", beta=" + std::to_string(p.beta) +
               ", gamma=" + std::to_string(p.gamma) + ", a=" + std::to_string(p.a) + ", b=" + std::to_string(p.b) +
               ")";
      });

  m.def(
      "validate",
      [](const JeffreysParams& p) {
        std::vector<std::string> names;
        for (const auto& v : validate(p).violations) names.push_back(v.name);
        return names;
      },
      "Names of every violated constraint.");

  py::class_<SymbolSet>(m, "SymbolSet")
      .def(py::init([](const JeffreysParams& p, const std::string& strictness) {
             return SymbolSet(p, parse_strictness(strictness));
           }),
           py::arg("params"), py::arg("strictness") = "solver")
      .def("eta", &SymbolSet::eta)
      .def("psi_hat", &SymbolSet::psi_hat)
      .def("msd_laplace", &SymbolSet::msd_laplace)
      .def("memory_coeff", &SymbolSet::memory_coeff)
      .def("initial_coeff", &SymbolSet::initial_coeff);

  m.def(
      "build_plan",
      [](double t0, double Lambda, std::size_t N, const std::string& objective, std::optional<double> rho) {
        return plan_dict(build_plan(contour_from(t0, Lambda, N, objective, rho)));
      },
      py::arg("t0") = 0.01, py::arg("Lambda") = 150.0, py::arg("N") = 50, py::arg("objective") = "algorithm1",
      py::arg("rho") = py::none());

  m.def(
      "invert",
      [](const std::function<cplx(cplx)>& F, std::vector<double> times, double t0, double Lambda, std::size_t N,
         const std::string& objective) {
        const auto plan = build_plan(contour_from(t0, Lambda, N, objective, std::nullopt));
        require_times_in_window(plan, times);
        std::vector<cplx> values;
        for (const auto& n : plan.nodes) values.push_back(F(n.z));
        std::vector<double> out;
        for (double t : times) {
          double acc = 0.0;
          for (std::size_t k = 0; k < values.size(); ++k)
            acc += (std::exp(plan.nodes[k].z * t) * values[k] * plan.nodes[k].dz).imag();
          out.push_back(plan.tau / std::numbers::pi * acc);
        }
        return out;
      },
      py::arg("transform"), py::arg("times"), py::arg("t0") = 0.01, py::arg("Lambda") = 150.0, py::arg("N") = 50,
      py::arg("objective") = "algorithm1", "Inverse Laplace transform of a scalar callable on the hyperbolic contour.");

  m.def("cgl_nodes", &cgl_nodes, py::arg("M"));
  m.def(
      "cheb_coeffs",
      [](std::vector<double> values) {
        if (values.size() < 3) throw ShapeError("need at least 3 samples");
        return SpectralSpace1D(values.size() - 1).cheb_coeffs(values);
      },
      py::arg("values"), "Chebyshev interpolation coefficients from samples at the CGL nodes.");

  m.def(
      "solve_scalar_example1",
      [](const JeffreysParams& p, double lambda, std::vector<double> times, double t0, double Lambda, std::size_t N,
         const std::string& objective) {
        const SymbolSet symbols(p);
        const auto plan = build_plan(contour_from(t0, Lambda, N, objective, std::nullopt));
        return cim_solve_scalar(plan, symbols, lambda, example1_source(p, lambda), times);
      },
      py::arg("params"), py::arg("lambda_"), py::arg("times"), py::arg("t0") = 0.05, py::arg("Lambda") = 10.0,
      py::arg("N") = 40, py::arg("objective") = "prose");

  m.def(
      "solve_pde1d",
      [](const JeffreysParams& p, std::size_t M, std::vector<double> times, std::optional<std::vector<double>> p0,
         std::optional<double> kappa, double t0, double Lambda, std::size_t N, std::size_t workers) {
        const SpectralSpace1D space(M);
        const SymbolSet symbols(p);
        LaplaceSourceSpec spec;
        if (kappa) spec = example2_source(space, p, *kappa);
        if (p0) {
          if (p0->size() != M + 1) throw ShapeError("p0 must hold M+1 samples at the CGL nodes");
          spec.p0 = *p0;
        }
        const auto plan = build_plan(contour_from(t0, Lambda, N, "algorithm1", std::nullopt));
        const auto sol = cim_solve(plan, space, symbols, spec, times, workers);
        py::dict d;
        d["x"] = space.nodes();
        d["fields"] = to_array(sol.fields);
        d["coeffs"] = to_array(sol.coeffs);
        d["max_residual"] = *std::max_element(sol.residuals.begin(), sol.residuals.end());
        return d;
      },
      py::arg("params"), py::arg("M"), py::arg("times"), py::arg("p0") = py::none(), py::arg("kappa") = py::none(),
      py::arg("t0") = 0.01, py::arg("Lambda") = 150.0, py::arg("N") = 50, py::arg("workers") = 1,
      "1D solve; p0 sampled at the CGL nodes, kappa selects the manufactured t^kappa sin(pi x) source.");

  m.def(
      "solve_pde2d",
      [](const JeffreysParams& p, std::size_t M, std::vector<double> times, std::optional<std::vector<double>> p0,
         double t0, double Lambda, std::size_t N, std::size_t workers) {
        const SpectralSpace2D space{SpectralSpace1D(M)};
        const SymbolSet symbols(p);
        LaplaceSourceSpec spec = p0 ? LaplaceSourceSpec{*p0, {}, {}} : example4_source(space.base());
        const auto plan = build_plan(contour_from(t0, Lambda, N, "algorithm1", std::nullopt));
        const auto sol = cim_solve(plan, space, symbols, spec, times, workers);
        py::dict d;
        d["x"] = space.base().nodes();
        d["fields"] = to_array(sol.fields);
        return d;
      },
      py::arg("params"), py::arg("M"), py::arg("times"), py::arg("p0") = py::none(), py::arg("t0") = 0.01,
      py::arg("Lambda") = 150.0, py::arg("N") = 50, py::arg("workers") = 1,
      "2D solve; p0 flattened as i*(M+1)+j, defaulting to the example4 initial data.");

  m.def(
      "invert_waiting_time",
      [](const JeffreysParams& p) {
        const auto grid = default_waiting_grid();
        const auto t = invert_waiting_time(p, grid);
        py::dict d;
        d["t"] = t.t_grid;
        d["pdf"] = t.pdf;
        d["cdf"] = t.cdf;
        d["tail_exponent"] = t.tail_exponent;
        return d;
      },
      py::arg("params"));

  m.def(
      "msd_analytic",
      [](const JeffreysParams& p, std::vector<double> t) {
        std::vector<double> out;
        for (const auto& [ti, v] : msd_analytic(p, t)) out.push_back(v);
        return out;
      },
      py::arg("params"), py::arg("t"));

  m.def(
      "msd_monte_carlo",
      [](const JeffreysParams& p, std::size_t dim, std::size_t particles, std::vector<double> t, std::uint64_t seed,
         std::size_t workers) {
        const auto grid = default_waiting_grid();
        const auto table = invert_waiting_time(p, grid);
        const auto pts = msd_monte_carlo(table, dim, particles, t, seed, workers);
        std::vector<double> msd, se;
        for (const auto& q : pts) {
          msd.push_back(q.msd);
          se.push_back(q.std_error);
        }
        return py::make_tuple(msd, se);
      },
      py::arg("params"), py::arg("dim"), py::arg("particles"), py::arg("t"), py::arg("seed") = 1,
      py::arg("workers") = 1);

  m.def(
      "run_experiment",
      [](const std::string& text, std::optional<std::filesystem::path> out, std::size_t workers) {
        const auto cfg = parse_experiment(ConfigFile::parse(text, "<python>"));
        RunOptions opts;
        opts.workers = workers;
        opts.out = out;
        opts.write_files = out.has_value();
        const auto table = run(cfg, opts);
        py::list rows;
        for (const auto& r : table.rows) {
          py::list row;
          for (const auto& c : r) {
            if (c.number)
              row.append(*c.number);
            else
              row.append(c.text);
          }
          rows.append(row);
        }
        return py::make_tuple(table.columns, rows);
      },
      py::arg("config_text"), py::arg("out") = py::none(), py::arg("workers") = 1,
      "Runs an experiment config; returns (columns, rows). Files are written only when out is given.");
}

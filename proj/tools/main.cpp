#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cimclg/errors.hpp"
#include "cimclg/experiment.hpp"

namespace {

struct Common {
  std::string config;
  std::size_t workers = 1;
  std::string out;
  bool gnuplot = false;
};

void add_common(CLI::App* app, Common& c, bool need_config) {
  auto* opt = app->add_option("--config", c.config, "experiment config file");
  if (need_config) opt->required()->check(CLI::ExistingFile);
  app->add_option("--workers", c.workers, "worker threads for node solves (0 = all cores)");
  app->add_option("--out", c.out, "output directory");
  app->add_flag("--gnuplot-friendly", c.gnuplot, "also write whitespace-separated .dat files");
}

// --out, then output.dir from the config, then $CIMCLG_OUTPUT_DIR, then ./out.
std::filesystem::path output_dir(const Common& c, const cimclg::ConfigFile& file, const std::string& fallback) {
  if (!c.out.empty()) return c.out;
  if (auto v = file.get("output.dir")) return *v;
  std::filesystem::path base = "out";
  if (const char* env = std::getenv("CIMCLG_OUTPUT_DIR"); env && *env) base = env;
  return fallback.empty() ? base : base / fallback;
}

int execute(cimclg::ConfigFile file, const Common& c, const std::string& fallback_dir) {
  const auto cfg = cimclg::parse_experiment(file);
  cimclg::RunOptions opts;
  opts.workers = c.workers;
  opts.out = output_dir(c, file, fallback_dir);
  opts.gnuplot_friendly = c.gnuplot;
  const auto table = cimclg::run(cfg, opts);
  std::cout << cimclg::format_table(table, false);
  std::cerr << "wrote " << opts.out->string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CIM-CLG solver and CTRW driver"};
  app.require_subcommand(1);

  Common solve_opts;
  auto* solve = app.add_subcommand("solve", "run the experiment described by a config file");
  add_common(solve, solve_opts, true);

  const char* kinds[] = {"scalar", "pde1d", "pde2d", "ctrw", "msd"};
  Common kind_opts[5];
  CLI::App* kind_cmds[5];
  for (int i = 0; i < 5; ++i) {
    kind_cmds[i] = app.add_subcommand(kinds[i], std::string("run a ") + kinds[i] + " experiment");
    add_common(kind_cmds[i], kind_opts[i], true);
  }

  Common table_opts;
  std::string table_name;
  bool list = false, print = false;
  auto* table = app.add_subcommand("table", "reproduce a built-in table or figure sweep");
  table->add_option("name", table_name, "table name (see --list)");
  table->add_flag("--list", list, "list the built-in tables");
  table->add_flag("--print-config", print, "print the config instead of running it");
  add_common(table, table_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // usage errors share the config-error exit status
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return execute(cimclg::ConfigFile::load(solve_opts.config), solve_opts, "");
    for (int i = 0; i < 5; ++i) {
      if (!kind_cmds[i]->parsed()) continue;
      auto file = cimclg::ConfigFile::load(kind_opts[i].config);
      if (auto k = file.get("problem.kind"); k && *k != kinds[i])
        throw cimclg::ConfigError("key 'problem.kind': config says '" + *k + "' but the subcommand is " + kinds[i]);
      file.set("problem.kind", kinds[i]);
      return execute(std::move(file), kind_opts[i], "");
    }
    if (table->parsed()) {
      if (list || table_name.empty()) {
        for (const auto& n : cimclg::builtin_table_names()) std::cout << n << "\n";
        return 0;
      }
      const auto text = cimclg::builtin_table_config(table_name);
      if (print) {
        std::cout << text;
        return 0;
      }
      if (!table_opts.config.empty())
        throw cimclg::ConfigError("table takes a built-in name; use solve --config for files");
      return execute(cimclg::ConfigFile::parse(text, table_name), table_opts, table_name);
    }
  } catch (const cimclg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dburgers/commands.hpp"
#include "dburgers/config.hpp"
#include "dburgers/errors.hpp"

using namespace dburgers;

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output;
  bool print_config = false;
  // manifold / squeeze shortcuts
  std::string model;
  std::size_t n = 0;
  bool auto_n = false;
  std::string method;
  std::size_t depth = 0;
  double tol = 0.0;
  std::map<std::string, CLI::Option*> n_options;
};

const char* kDescriptions[][2] = {
    {"simulate", "integrate one trajectory (or an ensemble) and write diagnostics and snapshots"},
    {"equivalence", "run primal, integrated and Cole-Hopf forms side by side and report their deviation"},
    {"dispersion", "fit linear growth rates of single modes and compare with the dispersion relation"},
    {"gaps", "tabulate Laplacian eigenvalues and spectral gaps"},
    {"absorb", "estimate the absorbing-ball radius and entry time over IC scales"},
    {"prepare", "estimate transform radii and the Lipschitz constant of the prepared nonlinearity"},
    {"manifold", "build the inertial-manifold graph and measure attraction"},
    {"squeeze", "run the strong squeezing test on seeded pairs"},
};

std::string read_text(const std::string& path) {
  if (path.empty()) return "";
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral toolkit for diffusive Burgers equations on periodic domains.\n"
               "Outputs go to [output] directory, placed under $DBURGERS_OUTPUT_ROOT when it is set.\n"
               "Exit codes: 0 ok, 2 config error, 3 blow-up, 4 positivity lost, 5 no convergence."};
  app.set_version_flag("--version", code_version());
  app.require_subcommand(1);

  Options opt;
  for (const auto& [name, desc] : kDescriptions) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("-c,--config", opt.config_path, "INI config with [model] [solver] [ic] [output] [analysis]")
        ->check(CLI::ExistingFile);
    sub->add_option("-s,--set", opt.overrides, "override a config value, e.g. --set solver.dt=0.01 (repeatable)");
    sub->add_option("-o,--output", opt.output, "output directory (overrides output.directory)");
    sub->add_flag("--print-config", opt.print_config, "print the resolved config and exit");
    if (std::string(name) == "manifold" || std::string(name) == "squeeze") {
      sub->add_option("--model", opt.model, "symbol kind: zero, bse or qse");
      auto* n = sub->add_option("--n", opt.n, "Galerkin index n (disables automatic selection)");
      opt.n_options[name] = n;
      sub->add_flag("--auto-n", opt.auto_n, "select n from the probed Lipschitz constant")->excludes(n);
      sub->add_option("--method", opt.method, "graph method: aim or lyapunov_perron");
      sub->add_option("--depth", opt.depth, "fixed-point iteration cap");
      sub->add_option("--tol", opt.tol, "fixed-point residual tolerance");
    }
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    std::vector<std::string> overrides = opt.overrides;
    if (!opt.output.empty()) overrides.push_back("output.directory=" + opt.output);
    if (!opt.model.empty()) overrides.push_back("model.symbol=" + opt.model);
    if (opt.auto_n) overrides.push_back("analysis.auto_n=true");
    if (opt.n_options.count(command) && opt.n_options[command]->count()) {
      overrides.push_back("analysis.n=" + std::to_string(opt.n));
      overrides.push_back("analysis.auto_n=false");
    }
    if (!opt.method.empty()) overrides.push_back("analysis.method=" + opt.method);
    if (opt.depth) overrides.push_back("analysis.depth=" + std::to_string(opt.depth));
    if (opt.tol > 0.0) {
      std::ostringstream t;
      t.precision(17);
      t << opt.tol;
      overrides.push_back("analysis.tol=" + t.str());
    }
    const RunConfig config = apply_overrides(read_text(opt.config_path), overrides);
    if (opt.print_config) {
      std::cout << emit_config(config);
      return 0;
    }
    const auto dir = run_command(command, config);
    std::cout << command << ": wrote " << dir.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    const int code = exit_code_for(std::current_exception());
    std::cerr << "dburgers " << command << ": " << e.what() << "\n";
    return code;
  }
}

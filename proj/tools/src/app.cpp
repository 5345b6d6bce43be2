#include "ekrylov_cli/app.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "ekrylov_cli/commands.hpp"
#include "ekrylov_cli/config.hpp"

namespace ekrylov::cli {

namespace {

/// Command-line spelling of a config key ("chain.g_eff" -> "--g-eff").
std::string flag_for(const std::string& key) {
  if (key == "output.dir") return "--out";
  if (key == "check.tolerance") return "--tol,--tolerance";
  if (key == "distribution.spins") return "--spins,--N";
  std::string name = key.substr(key.find('.') + 1);
  std::replace(name.begin(), name.end(), '_', '-');
  return "--" + name;
}

struct Overrides {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App& sub) {
    sub.add_option("--config", config_path, "INI run configuration; flags override its values");
    for (const auto& key : config_keys())
      options[key] = sub.add_option(flag_for(key), values[key], "sets " + key);
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& key : config_keys()) {
      const auto it = options.find(key);
      if (it != options.end() && it->second->count() > 0) set(c, key, values.at(key));
    }
    return c;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Krylov-chain toolkit for spin ensembles coupled to a cavity", "ekrylov"};
  app.set_version_flag("--version", EKRYLOV_VERSION);
  app.require_subcommand(1);

  Overrides coeff_opts, evolve_opts, corr_opts, qsl_opts, oracle_opts, sweep_opts, print_opts;
  bool cross_check = false;
  std::string sweep_text, sweep_command = "evolve";
  int workers = 4;

  auto* coeff = app.add_subcommand("coefficients", "write chain coefficients (coefficients.csv)");
  coeff_opts.attach(*coeff);
  coeff->add_flag("--cross-check", cross_check, "compare every applicable route");
  auto* evolve = app.add_subcommand("evolve", "evolve a chain state and write amplitude and metric CSVs");
  evolve_opts.attach(*evolve);
  auto* corr = app.add_subcommand("correlator", "write the bond correlator grid (correlator.csv)");
  corr_opts.attach(*corr);
  auto* qsl = app.add_subcommand("qsl", "write quantum-speed-limit times (qsl.csv)");
  qsl_opts.attach(*qsl);
  auto* oracle = app.add_subcommand("oracle-compare", "check the chain against the full single-excitation space");
  oracle_opts.attach(*oracle);
  auto* sweep = app.add_subcommand("sweep", "run a command over a parameter range in parallel");
  sweep_opts.attach(*sweep);
  sweep->add_option("--sweep", sweep_text, "key=start:stop:step or key=v1,v2,...")->required();
  sweep->add_option("--command", sweep_command, "coefficients | evolve | correlator | qsl");
  sweep->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  auto* print = app.add_subcommand("print-config", "print the resolved configuration in canonical form");
  print_opts.attach(*print);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kValidationError;
  }

  try {
    if (coeff->parsed()) return cmd_coefficients(coeff_opts.resolve(), cross_check, out);
    if (evolve->parsed()) return cmd_evolve(evolve_opts.resolve(), out);
    if (corr->parsed()) return cmd_correlator(corr_opts.resolve(), out);
    if (qsl->parsed()) return cmd_qsl(qsl_opts.resolve(), out);
    if (oracle->parsed()) return cmd_oracle_compare(oracle_opts.resolve(), out);
    if (sweep->parsed()) return cmd_sweep(sweep_opts.resolve(), parse_sweep(sweep_text), sweep_command, workers, out);
    if (print->parsed()) {
      out << canonical_text(print_opts.resolve());
      return kSuccess;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kValidationError;
}

}  // namespace ekrylov::cli

#include "nlc/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Classical and quantum propagation through a chi(2) nonlinear directional coupler"};
  app.require_subcommand(1);

  nlc::SimulateRequest sim;
  std::string figure;
  auto* simulate = app.add_subcommand("simulate", "run one device configuration and write CSV artifacts");
  simulate->add_option("--config", sim.config, "YAML run configuration")->required();
  simulate->add_option("--figure", figure, "figure preset (fig2 .. fig8)");
  simulate->add_flag("--svg", sim.svg, "also write an SVG plot of the figure data");

  nlc::SweepRequest sweep;
  std::string values;
  auto* sw = app.add_subcommand("sweep", "repeat a run over a list of parameter values");
  sw->add_option("--config", sweep.config, "YAML run configuration")->required();
  sw->add_option("--param", sweep.param, "kappa, P, C, g, zeta_end, gamma_f or gamma_h")->required();
  sw->add_option("--values", values, "comma-separated values")->required();
  sw->add_option("--jobs", sweep.jobs, "worker threads")->capture_default_str();

  nlc::SelfcheckOptions check;
  auto* sc = app.add_subcommand("selfcheck", "run the invariant suite");
  sc->add_option("--seed", check.seed, "seed for the randomized checks")->capture_default_str();
  sc->add_option("--step", check.step, "integration step for the trajectory checks")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? nlc::kExitOk : nlc::kExitUsage;
  }

  if (*simulate) {
    if (!figure.empty()) sim.figure = figure;
    return nlc::cmd_simulate(sim, std::cout, std::cerr);
  }
  if (*sw) {
    try {
      sweep.values = nlc::parse_value_list(values);
    } catch (const std::exception& e) {
      std::cerr << "invalid argument: " << e.what() << '\n';
      return nlc::kExitUsage;
    }
    return nlc::cmd_sweep(sweep, std::cout, std::cerr);
  }
  return nlc::cmd_selfcheck(check, std::cout, std::cerr);
}

#include "sck/cli.hpp"
#include "sck/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

int main(int argc, char** argv) {
  CLI::App app{"Band control thresholds, value functions, simulation and grid checks"};
  std::string command;
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> dt;
  std::optional<std::size_t> grid;
  std::optional<double> tol;

  app.add_option("command", command, "solve | simulate | compare | verify | sweep (default: config task)")
      ->check(CLI::IsMember({"solve", "simulate", "compare", "verify", "sweep"}));
  app.add_option("--config", config_path, "JSON run configuration")->required()->envname("SCK_CONFIG");
  app.add_option("--out", out, "output directory")->envname("SCK_OUT");
  app.add_option("--seed", seed, "random seed")->envname("SCK_SEED");
  app.add_option("--paths", paths, "Monte Carlo paths")->envname("SCK_PATHS");
  app.add_option("--dt", dt, "simulation step")->envname("SCK_DT");
  app.add_option("--grid", grid, "grid nodes per axis")->envname("SCK_GRID");
  app.add_option("--tol", tol, "threshold tolerance")->envname("SCK_TOL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sck::kExitConfig;
  }

  sck::RunConfig cfg;
  try {
    cfg = sck::load_config(config_path);
    if (out) cfg.out = *out;
    if (seed) cfg.seed = *seed;
    if (paths) cfg.sim.paths = *paths;
    if (dt) cfg.sim.dt = *dt;
    if (grid) cfg.solver.grid = *grid;
    if (tol) cfg.solver.tol = *tol;
    cfg.validate();
  } catch (const sck::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return sck::kExitConfig;
  }
  return sck::run_command(command.empty() ? cfg.task : command, cfg, std::cout);
}

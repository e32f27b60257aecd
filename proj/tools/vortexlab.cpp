#include <CLI11.hpp>

#include <iostream>

#include "vortexlab/config.hpp"
#include "vortexlab/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"vortexlab: boundary-generated vortex particles vs. a spectral reference"};
  app.require_subcommand(1);

  std::string fault;
  auto* selftest = app.add_subcommand("selftest-kernel", "kernel, Biot-Savart and reflection properties");
  selftest->add_option("--fault", fault, "inject a fault (multiplier)");

  vlab::CommandOptions opts;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "config file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "override particles.seed");
    cmd->add_option("--threads", opts.threads, "worker threads (scheduling only)")->check(CLI::PositiveNumber);
  };
  auto* pde = app.add_subcommand("pde", "solve the reference PDE and recommend M");
  auto* simulate = app.add_subcommand("simulate", "one particle run");
  auto* converge = app.add_subcommand("converge", "convergence sweep over n and seeds");
  for (auto* c : {pde, simulate, converge}) add_common(c);

  CLI11_PARSE(app, argc, argv);
  opts.out_dir = out_dir;
  for (auto* c : {pde, simulate, converge}) {
    if (c->parsed() && c->count("--seed")) opts.seed = seed;
  }

  try {
    if (selftest->parsed()) return vlab::cmd_selftest(fault, std::cout);
    if (pde->parsed()) return vlab::cmd_pde(opts, std::cout, std::cerr);
    if (simulate->parsed()) return vlab::cmd_simulate(opts, std::cout, std::cerr);
    if (converge->parsed()) return vlab::cmd_converge(opts, std::cout, std::cerr);
  } catch (const vlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

// ushift: simulate unbiased shifts of two-sided Brownian motion and check them.

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "ushift/experiment.hpp"

namespace {

void on_sigint(int) { ushift::interrupt_flag().store(true); }

void add_common(CLI::App* cmd, ushift::ExperimentConfig& c) {
  cmd->add_option("--construction", c.construction,
                  "bertoin_lejan | inverse_local_time | atom_splitting | atom_probability | "
                  "non_stopping | excursion_reflection | fixed_time");
  cmd->add_option("--nu", c.nu, "target: atoms:loc=w,...;density:name,params,weight");
  cmd->add_option("--r", c.r, "inverse local time level");
  cmd->add_option("--y", c.y, "relay level for atom_splitting");
  cmd->add_option("--p", c.p, "probability for atom_probability");
  cmd->add_option("--x", c.x, "level for non_stopping");
  cmd->add_option("--fixed-time", c.fixed_time, "shift for fixed_time");
  cmd->add_option("--dt", c.dt, "time step");
  cmd->add_option("--bandwidth", c.bandwidth, "local time bandwidth (0: sqrt(dt))");
  cmd->add_option("--base-horizon", c.base_horizon, "initial window on each side");
  cmd->add_option("--max-horizon", c.max_horizon, "window cap");
  cmd->add_option("--keep", c.keep, "half-width of the stored shifted path");
  cmd->add_option("--n", c.n, "replicates");
  cmd->add_option("--seed", c.seed, "base seed");
  cmd->add_option("--out", c.out, "output directory (default $USHIFT_OUT_DIR or ./ushift_out)");
  cmd->add_option("--tests", c.tests, "tests to run")->delimiter(',');
  cmd->add_option("--probes", c.probes, "probe times for unbiasedness")->delimiter(',');
  cmd->add_option("--threads", c.threads, "worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unbiased shifts of two-sided Brownian motion"};
  app.require_subcommand(1);
  ushift::ExperimentConfig cfg;

  auto* embed = app.add_subcommand("embed", "run a construction and test the embedded law");
  add_common(embed, cfg);
  auto* verify = app.add_subcommand("verify", "balancing, equivariance, stability, minimality");
  add_common(verify, cfg);
  verify->add_flag("--inject-fault", cfg.inject_fault, "shift every matched time by one cell");
  verify->add_flag("--point-oracle", cfg.point_oracle, "run the exact point-matching checks");
  verify->add_option("--configs", cfg.configs, "point configurations");
  auto* tails = app.add_subcommand("tails", "tail slopes and moment growth of T and ell0[0,T]");
  add_common(tails, cfg);
  tails->add_flag("--pareto-selftest", cfg.pareto_selftest, "use synthetic Pareto samples");
  auto* oracle = app.add_subcommand("match-oracle", "exact point-process matching checks");
  add_common(oracle, cfg);
  oracle->add_option("--configs", cfg.configs, "point configurations");
  oracle->add_flag("--adversarial", cfg.adversarial, "check the crossed fixture as candidate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ushift::kExitConfig;
  }
  std::signal(SIGINT, on_sigint);
  try {
    if (*embed) return ushift::cmd_embed(cfg, std::cout);
    if (*verify) return ushift::cmd_verify(cfg, std::cout);
    if (*tails) return ushift::cmd_tails(cfg, std::cout);
    if (*oracle) return ushift::cmd_match_oracle(cfg, std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ushift::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return ushift::kExitRuntime;
  }
  return ushift::kExitConfig;
}

// robustrl command-line entry point.
//
//   robustrl solve        --config c.json --out dir
//   robustrl train        --config c.json --out dir [--seed N] [--kappa K] [--n-samples N]
//   robustrl sweep        --config c.json --out dir [--jobs J] [--seed N] ...
//   robustrl oracle-check [--config c.json] [--seed N]
//
// Exit codes: 0 success, 2 invalid input, 3 oracle-check failure.

#include <iostream>
#include <limits>
#include <string>

#include <CLI11.hpp>

#include "robustrl/errors.hpp"
#include "robustrl/experiment.hpp"
#include "robustrl/format.hpp"

namespace {

using robustrl::CommandOptions;

struct Flags {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string kappa;
  int n_samples = 0;
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help,
                      Flags& flags) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", flags.config, "configuration document (JSON)");
  sub->add_option("--out", flags.out, "output directory");
  sub->add_option("--seed", flags.seed, "master seed (overrides the config)");
  sub->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--kappa", flags.kappa, "sampler temperature, a positive number or 'inf'");
  sub->add_option("--n-samples", flags.n_samples, "candidates per step")
      ->check(CLI::PositiveNumber);
  return sub;
}

CommandOptions to_options(const Flags& flags, const CLI::App& sub) {
  CommandOptions opts;
  opts.config_path = flags.config;
  opts.out_dir = flags.out;
  opts.jobs = flags.jobs;
  if (sub.count("--seed")) opts.overrides.seed = flags.seed;
  if (sub.count("--n-samples")) opts.overrides.n_samples = flags.n_samples;
  if (sub.count("--kappa")) {
    if (flags.kappa == "inf" || flags.kappa == "infinity") {
      opts.overrides.kappa = std::numeric_limits<double>::infinity();
    } else {
      opts.overrides.kappa = robustrl::parse_double(flags.kappa);
    }
  }
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust MDP solver and adversarial-resampling experiments"};
  app.require_subcommand(1);
  Flags flags;
  CLI::App* solve = add_command(app, "solve", "exact robust value iteration", flags);
  CLI::App* train = add_command(app, "train", "train one Q-learning agent", flags);
  CLI::App* sweep = add_command(app, "sweep", "baseline vs adversarial over a perturbation grid", flags);
  CLI::App* check = add_command(app, "oracle-check", "dual solver and sampler verification", flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return robustrl::kExitValidation;
  }

  try {
    if (solve->parsed()) return robustrl::cmd_solve(to_options(flags, *solve), std::cout);
    if (train->parsed()) return robustrl::cmd_train(to_options(flags, *train), std::cout);
    if (sweep->parsed()) return robustrl::cmd_sweep(to_options(flags, *sweep), std::cout);
    if (check->parsed()) return robustrl::cmd_oracle_check(to_options(flags, *check), std::cout);
  } catch (const robustrl::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return robustrl::kExitValidation;
  } catch (const robustrl::ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return robustrl::kExitValidation;
  }
  return robustrl::kExitValidation;
}

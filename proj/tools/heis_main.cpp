#include <iostream>

#include <CLI11.hpp>

#include "heis/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"controllability analysis of linear systems on Heisenberg groups"};
  app.require_subcommand(1);

  heis::RunOptions opts;
  bool text = false;

  for (const char* name : {"validate", "analyze", "normal-form", "simulate", "certify"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("spec", opts.spec_path, "system spec (JSON)")->required();
    sub->add_flag("--text", text, "human-readable output instead of JSON");
    sub->add_option("--horizon", opts.horizon, "integration horizon T");
    sub->add_option("--samples", opts.samples, "number of random signals");
    sub->add_option("--amplitude", opts.amplitude, "control amplitude bound");
    sub->add_option("--seed", opts.seed, "random seed");
    sub->add_option("--step", opts.step, "RK4 step size");
    sub->add_option("--budget", opts.budget, "obstruction search starts");
    sub->add_option("--out", opts.out_path, "trajectory CSV path");
  }

  CLI11_PARSE(app, argc, argv);

  opts.command = app.get_subcommands().front()->get_name();
  opts.json_output = !text;
  return heis::run_command(opts, std::cout, std::cerr);
}

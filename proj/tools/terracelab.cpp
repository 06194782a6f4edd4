// Command-line driver: one subcommand per stage plus the full pipeline.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "terracelab/config.hpp"
#include "terracelab/errors.hpp"
#include "terracelab/parallel.hpp"
#include "terracelab/pipeline.hpp"

namespace {

struct Args {
  std::string config;
  std::string out = "out";
  int workers = 0;
  std::vector<std::string> overrides;
};

int exit_code(terracelab::ErrorClass c) { return static_cast<int>(c); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"terracelab: fronts, terraces and radial spreading for multistable reaction-diffusion"};
  app.require_subcommand(1);
  Args args;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"analyze", "check the structural assumptions on f"},
      {"terrace", "compute the propagating terrace (fronts and speeds)"},
      {"simulate", "run the radial PDE and store snapshots"},
      {"levels", "track level sets, estimate speeds, classify level-set gaps"},
      {"fit", "fit terrace shifts and the convergence residual"},
      {"supersub", "verify super/subsolutions and the sandwich bound"},
      {"planar2d", "2-D elliptical-seed run with ring extraction"},
      {"pipeline", "all stages in order"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", args.config, "TOML configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output directory")->capture_default_str();
    sub->add_option("--workers", args.workers, "worker threads (default: $TERRACELAB_WORKERS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--override", args.overrides, "dotted.key=value (TOML value syntax); repeatable");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(terracelab::ErrorClass::Config);
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    terracelab::RunConfig cfg = terracelab::load_config(args.config, args.overrides);
    int workers = args.workers;
    if (workers <= 0) workers = std::getenv("TERRACELAB_WORKERS") ? terracelab::default_workers() : cfg.workers;
    terracelab::RunContext ctx(std::move(cfg), args.out, workers);
    if (command != "analyze") ctx.validate();
    if (command == "pipeline") {
      terracelab::run_pipeline(ctx);
    } else {
      terracelab::run_stage(terracelab::stage_from_string(command), ctx);
    }
  } catch (const terracelab::Error& e) {
    std::cerr << "terracelab " << command << ": " << e.what() << "\n";
    return exit_code(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << "terracelab " << command << ": unexpected failure: " << e.what() << "\n";
    return exit_code(terracelab::ErrorClass::Numerical);
  }
  return 0;
}

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "terracelab/comparison.hpp"
#include "terracelab/config.hpp"
#include "terracelab/nonlinearity.hpp"
#include "terracelab/planar2d.hpp"
#include "terracelab/radial_pde.hpp"
#include "terracelab/terrace.hpp"

namespace terracelab {

enum class Stage { Analyze, Terrace, Simulate, Levels, Fit, Supersub, Planar2d };

// Parses "analyze", "terrace", ... ; throws ConfigError for unknown names.
Stage stage_from_string(const std::string& name);
std::string to_string(Stage s);

// Shared state of one run. Each stage computes the inputs it needs (reaction term,
// terrace, trajectory) on first use and caches them, so running the stages one by
// one with the same configuration writes exactly the files the pipeline writes.
class RunContext {
 public:
  RunContext(RunConfig cfg, std::filesystem::path out, int workers);

  const RunConfig& config() const noexcept { return cfg_; }
  const std::filesystem::path& out_dir() const noexcept { return out_; }
  int workers() const noexcept { return workers_; }

  const Nonlinearity& f();
  const Terrace& terrace();
  // The configured radial run (terrace seed or bump).
  const RadialTrajectory& trajectory();
  // A terrace-seed run on the configured grid (same as trajectory() when the
  // configured initial datum is the terrace seed).
  const RadialTrajectory& seed_trajectory();

  double seed_epsilon();

  // Semantic checks that need f (levels inside (0, p), ...). Throws ConfigError.
  void validate();

 private:
  RadialTrajectory run_radial(const RadialGrid& grid, double T_final, bool seed);

  RunConfig cfg_;
  std::filesystem::path out_;
  int workers_;
  std::optional<Nonlinearity> f_;
  std::optional<Terrace> terrace_;
  std::optional<RadialTrajectory> traj_;
  std::optional<RadialTrajectory> seed_;
};

// Runs one stage and writes its reports into ctx.out_dir(). Throws the module
// error that stopped it (after writing the report, for a failed assumption check).
void run_stage(Stage s, RunContext& ctx);
// All stages in order.
void run_pipeline(RunContext& ctx);

}  // namespace terracelab

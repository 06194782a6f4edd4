#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "terracelab/comparison.hpp"
#include "terracelab/front.hpp"
#include "terracelab/levelset.hpp"
#include "terracelab/nonlinearity.hpp"
#include "terracelab/planar2d.hpp"
#include "terracelab/radial_pde.hpp"

namespace terracelab {

// Every numeric knob of a run. Defaults here are the documented defaults; the
// TOML file and --override key=value entries replace them.
struct RunConfig {
  // [nonlinearity]
  ReactionTerm term = ReactionTerm::polynomial({0.0});
  Interval search{-0.5, 1.5};
  ZeroSearchOptions zero{};

  // [grid]
  RadialGrid grid{};
  double T_final = 400.0;
  double stride = 1.0;  // snapshot interval (time units)

  // [initial]
  std::string initial_kind = "terrace-seed";  // terrace-seed | bump
  double epsilon = 0.0;                       // 0: 1e-2 * p
  double theta = 0.6;
  double bump_R = 10.0;

  // [front], [terrace]
  FrontOptions front{};
  double tol_speed = 1e-6;

  // [levels]
  std::vector<double> levels{};  // empty: one anchor level (unstable zero) per terrace wave
  double tail_fraction = 0.25;
  TrackOptions track{};
  double slope_min = 0.0;  // 0: 0.2 * smallest terrace speed gap, else 0.01
  double gap_bound = 0.0;  // 0: 50 * dr

  // [supersub]
  ConstantsOptions constants{};
  WaveCheckOptions wave_check{};
  RadialCheckOptions radial_check{};
  SandwichOptions sandwich{};
  double sandwich_theta = 0.6;
  double sandwich_R_offset = 2.0;  // bump radius = R(theta) + offset
  double T_classify = 0.0;

  // [planar2d]
  Grid2D grid2d{};
  double T2d = 200.0;
  double stride2d = 10.0;
  double theta2d = 0.9;
  double ellipse_a = 45.0, ellipse_b = 30.0, ellipse_angle = 0.6;
  double level2d = 0.5;
  double ring_from = 100.0;  // rings extracted from this time on
  RingOptions ring{};
  double V_R_max = 0.0;  // radial reference grid for the 2-D sandwich; 0: ceil(sqrt(2) L) + 10

  // [output]
  std::string format = "csv";  // csv | binary

  int workers = 1;
};

// Parses TOML text, applies "dotted.key=value" overrides (values in TOML syntax),
// rejects unknown keys. Throws ConfigError on any problem.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace terracelab

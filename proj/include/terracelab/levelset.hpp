#pragma once

#include <string>
#include <vector>

#include "terracelab/nonlinearity.hpp"
#include "terracelab/radial_pde.hpp"

namespace terracelab {

struct LevelTrack {
  double level = 0.0;
  std::vector<double> times;  // only times >= valid_from
  std::vector<double> xi;
  double valid_from = 0.0;

  // Central differences (one-sided at the ends).
  std::vector<double> xi_prime() const;
};

struct TrackOptions {
  // Levels closer than this to a stable zero are rejected (robustness knob).
  double min_floor_distance = 0.0;
};

// Unique downcrossing of level c per snapshot, linear interpolation between nodes.
// Throws PreconditionError for levels outside (0, p) or at a stable zero, and
// MonotonicityViolation if a later snapshot has more than one crossing.
LevelTrack track_level(const RadialTrajectory& traj, const Nonlinearity& f, double c, const TrackOptions& opts = {});

struct SpeedEstimate {
  double c_hat = 0.0;
  double ci = 0.0;  // standard error of the slope
  double min_xi_prime = 0.0;
  std::size_t samples = 0;
  bool stalled = false;
  std::string warning;
};

// Least-squares slope of xi(t) over the trailing tail_fraction of samples.
SpeedEstimate estimate_speed(const LevelTrack& track, double tail_fraction = 0.25);

enum class GapClass { Diverging, Bounded, Inconclusive };

struct DichotomyOptions {
  double slope_min = 0.01;
  double bound = 0.0;  // 0: 50 * dr
  double tail_fraction = 0.25;
};

struct DichotomyReport {
  double b_lower = 0.0, b_upper = 0.0;
  GapClass classification = GapClass::Inconclusive;
  double slope = 0.0;
  double slope_min = 0.0;
  double bound = 0.0;
  double max_tail_gap = 0.0;
  double final_gap = 0.0;
  std::vector<double> times, gap;
  std::string suggestion;
};

// rho(t) = xi_{b_lower}(t) - xi_{b_upper}(t) for two unstable zeros b_lower < b_upper.
DichotomyReport gap_dichotomy(const RadialTrajectory& traj, const Nonlinearity& f, double b_lower, double b_upper,
                              const DichotomyOptions& opts = {});

// Slope threshold 0.2 * (smallest positive gap between consecutive speeds), or `fallback`.
double dichotomy_slope_min(const std::vector<double>& speeds, double fallback = 0.01);

std::string to_string(GapClass c);

// Least-squares line fit y = a + b t; returns {b, standard error of b}.
std::pair<double, double> fit_slope(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace terracelab

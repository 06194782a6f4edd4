#pragma once

#include <vector>

#include "terracelab/levelset.hpp"
#include "terracelab/radial_pde.hpp"
#include "terracelab/terrace.hpp"

namespace terracelab {

struct ShiftSeries {
  std::size_t k = 0;  // wave index (0-based, top wave first)
  double anchor_level = 0.0;
  double r0 = 0.0;  // U_k(r0) = anchor_level
  std::vector<double> times;
  std::vector<double> eta;
  std::vector<double> eta_prime;
};

// Anchor for wave k: the unstable zero inside the wave's range closest to its midpoint.
double anchor_level(const Nonlinearity& f, const WaveProfile& w);

// eta_k(t) = xi_b(t) - r0_k - c_k t on the snapshots where the anchor track is valid.
std::vector<ShiftSeries> fit_shifts(const RadialTrajectory& traj, const Nonlinearity& f, const Terrace& terrace,
                                    const TrackOptions& opts = {});

struct ResidualSeries {
  std::vector<double> times;
  std::vector<double> rho;
  double excluded_band = 10.0;  // [R_max - band, R_max] left out
};

// rho(t) = max_r |V(r,t) - sum_k [U_k(r - c_k t - eta_k(t)) - q_{i_k}]| over the
// times where every shift is defined.
ResidualSeries convergence_residual(const RadialTrajectory& traj, const Terrace& terrace,
                                    const std::vector<ShiftSeries>& shifts, double excluded_band = 10.0);

// Summation formula evaluated at one radius.
double terrace_superposition(const Terrace& terrace, const std::vector<double>& shifted_coords);

}  // namespace terracelab

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "terracelab/nonlinearity.hpp"

namespace terracelab {

enum class Scheme { RK4, IMEXTrapezoid };

// Nodes r_j = j*dr, j = 0..n-1 with r_{n-1} = R_max.
struct RadialGrid {
  int N = 2;  // space dimension
  double R_max = 200.0;
  double dr = 0.1;
  double dt = 0.0;  // 0: cfl*dr^2
  Scheme scheme = Scheme::RK4;
  double cfl = 0.2;

  std::size_t nodes() const;
  double r(std::size_t j) const { return static_cast<double>(j) * dr; }
  double time_step() const { return dt > 0.0 ? dt : cfl * dr * dr; }
  // Throws ConfigError on inconsistent sizes or a CFL violation for RK4.
  void validate() const;
};

enum class InitialKind { Bump, TerraceSeed, Custom };

struct RadialTrajectory {
  RadialGrid grid;
  double dt = 0.0;  // step actually used
  std::vector<double> times;
  std::vector<std::vector<double>> snapshots;
  InitialKind initial_kind = InitialKind::Custom;
  double R0 = 0.0;
  std::string isa;                    // kernel provenance
  std::vector<std::string> warnings;  // e.g. absorbing-margin shortfall
};

// theta on [0, R], 0 beyond, linearly mollified across one cell.
std::vector<double> build_bump_initial(const Nonlinearity& f, double theta, double R, const RadialGrid& grid);

struct TerraceSeed {
  std::vector<double> u0;
  double R0 = 0.0;             // first zero of the discrete steady profile (interpolated)
  double R0_continuous = 0.0;  // first zero of the radial ODE solution
};

// Stationary radial profile started at p - eps with zero slope, cut at its first
// zero. The grid values follow the steady discrete stencil exactly, so the
// discrete time derivative starts nonnegative.
TerraceSeed build_terrace_initial(const Nonlinearity& f, double eps, int N, const RadialGrid& grid);

// Continuous counterpart: integrates v'' + (N-1)/r v' + f~(v) = 0, v(0) = p - eps,
// v'(0) = 0 until v = 0; returns R0 (throws ConstructionError beyond r_limit).
double radial_ode_zero(const Nonlinearity& f, double eps, int N, double r_limit);

struct SimulateOptions {
  double T_final = 100.0;
  double snapshot_interval = 1.0;  // must be a multiple of the step
  double invariant_tol = 1e-8;     // allowance for the invariant-region check
};

RadialTrajectory simulate(const Nonlinearity& f, const std::vector<double>& u0, const RadialGrid& grid,
                          const SimulateOptions& opts, InitialKind kind = InitialKind::Custom, double R0 = 0.0);

struct SpreadingOptions {
  double T_classify = 0.0;  // 0: 50 / (smallest terrace speed), or 200 if none given
  double sustain = 10.0;    // threshold crossing must persist this long
  double min_speed = 0.0;   // smallest terrace speed for the heuristic horizon
  double R_hi = 60.0;       // initial upper bracket (doubled until spreading)
  int workers = 1;
};

// Minimal plateau radius whose bump spreads; bracket width <= dr.
double estimate_spreading_radius(const Nonlinearity& f, double theta, int N, const RadialGrid& grid,
                                 const SpreadingOptions& opts = {});

enum class SpreadingOutcome { Spreading, Extinction, Unclassified };
SpreadingOutcome classify_bump(const Nonlinearity& f, double theta, double R, const RadialGrid& grid,
                               const SpreadingOptions& opts);

struct MonotonicityReport {
  bool pass = true;
  double tol = 1e-6;
  double worst_ut = 0.0;  // most negative discrete u_t
  double worst_ut_r = 0.0, worst_ut_t = 0.0;
  double worst_ur = 0.0;  // most positive discrete u_r
  double worst_ur_r = 0.0, worst_ur_t = 0.0;
  bool checked_ut = true;
};

// Terrace seed: u_t >= -tol and u_r <= tol for r > 0; bump: u_r <= tol for r > R0 only.
MonotonicityReport monotonicity_report(const RadialTrajectory& traj, double tol = 1e-6);

// Semi-discrete right-hand side L_h u + f(u) of the radial scheme (used by the
// comparison module for V_t).
void radial_rhs(const Nonlinearity& f, const RadialGrid& grid, const std::vector<double>& u, std::vector<double>& out);

// Linear interpolation of a snapshot at radius r (constant beyond R_max).
double sample_radial(const RadialGrid& grid, const std::vector<double>& u, double r);

}  // namespace terracelab

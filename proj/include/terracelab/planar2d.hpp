#pragma once

#include <string>
#include <vector>

#include "terracelab/nonlinearity.hpp"
#include "terracelab/radial_pde.hpp"
#include "terracelab/terrace.hpp"

namespace terracelab {

// Cell-centred square grid on [-L, L]^2, x_i = -L + (i + 1/2) h, h = 2L/n.
struct Grid2D {
  int n = 1024;
  double L = 130.0;
  double dt = 0.0;  // 0: cfl*h^2
  double cfl = 0.2;

  double h() const { return 2.0 * L / n; }
  double x(int i) const { return -L + (i + 0.5) * h(); }
  double time_step() const { return dt > 0.0 ? dt : cfl * h() * h(); }
  std::size_t cells() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }
  void validate() const;
};

struct Trajectory2D {
  Grid2D grid;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> snapshots;  // row-major, index i*n + j (i: y, j: x)
  std::string isa;

  // Bilinear interpolation at (x, y); the outermost cell value beyond the centres.
  double sample(std::size_t snapshot, double x, double y) const;
};

// theta inside the ellipse with semi-axes (a, b) rotated by `angle`, mollified over one cell.
std::vector<double> elliptical_initial(const Nonlinearity& f, double theta, double a, double b, double angle,
                                       const Grid2D& grid);
// u0(x) = radial profile sampled at |x|.
std::vector<double> radial_initial_2d(const RadialGrid& rgrid, const std::vector<double>& profile, const Grid2D& grid);

// Five-point Laplacian, RK4 in time; the outer ring of cells follows u_t = f(u).
Trajectory2D simulate2d(const Nonlinearity& f, const std::vector<double>& u0, const Grid2D& grid,
                        const SimulateOptions& opts, int workers = 1);

struct RingExtract {
  double level = 0.0;
  double t = 0.0;
  std::vector<double> angles;
  std::vector<double> xi;
  double R_bar = 0.0;
  double R_under = 0.0;
  double slice_step = 0.0;
  double slice_half_width = 0.0;
  std::vector<std::vector<double>> profile_slices;  // u along nu at xi + s, s in [-W, W]
};

struct RingOptions {
  int n_directions = 64;
  double slice_half_width = 15.0;
  int workers = 1;
};

// Throws PreTaError when some direction does not have exactly one crossing.
RingExtract extract_ring(const Trajectory2D& traj, std::size_t snapshot, double a, const RingOptions& opts = {});

struct MetricsReport {
  double c = 0.0;  // terrace speed of the wave carrying level a
  std::vector<double> direction_speeds;
  double speed_min = 0.0, speed_max = 0.0;
  double max_rel_speed_error = 0.0;
  double speed_spread = 0.0;  // (max - min) / c
  std::vector<double> times, thickness;
  double thickness_slope = 0.0;
  bool thickness_bounded = false;
  double alpha = 0.0;           // U_k(alpha) = a
  double slice_distance = 0.0;  // final ring
};

// Needs >= 5 rings; wave k is the terrace wave whose range contains the level.
MetricsReport ring_metrics(const std::vector<RingExtract>& rings, const Terrace& terrace,
                           double thickness_slope_max = 0.01);

// Minimal SVG with the level curves of the given rings.
std::string ring_svg(const std::vector<RingExtract>& rings, double L);

}  // namespace terracelab

#pragma once

#include <string>
#include <vector>

#include "terracelab/planar2d.hpp"
#include "terracelab/radial_pde.hpp"
#include "terracelab/terrace.hpp"

namespace terracelab {

struct SupersubConstants {
  enum class Form { Wave, Radial };
  Form form = Form::Wave;
  double beta0 = 0.0;
  double sigma0 = 0.0;
  double eta0 = 0.0;          // -f' > eta0 near the floors
  double interface = 0.0;     // eta1 (wave form) or delta0 (radial form)
  double M0 = 0.0;            // sup (f' + beta0) over the attained range
  double epsilon_nbhd = 0.0;
  double t_min = 10.0;        // radial form: delta0 taken over t >= t_min
};

struct ConstantsOptions {
  double epsilon_nbhd = 0.005;
  // Radial form only; the construction then needs t0 >= t_min. The terrace seed is
  // discretely stationary, so V_t is exponentially small near r = 0 at early times;
  // t_min keeps delta0 (and with it sigma0) away from that transient.
  double t_min = 10.0;
  int samples = 4001;
};

// Wave recipe from the terrace profiles: beta0 = eta0/2, eta1 = min -(1+c)U' outside
// the floor neighbourhoods, sigma0 = min(eps, eta0 eta1 / (2 M0)).
SupersubConstants compute_constants(const Nonlinearity& f, const Terrace& terrace, const ConstantsOptions& opts = {});

// Radial recipe from a terrace-seed trajectory V: beta0 = eta, delta0 = min discrete V_t
// where V lies outside I_{eps/2}, sigma0 = min(eps / (2 beta0), delta0 / M0).
SupersubConstants compute_constants(const Nonlinearity& f, const Terrace& terrace, const RadialTrajectory& V,
                                    const ConstantsOptions& opts = {});

struct ViolationReport {
  double min_super = 0.0;  // min of W_t - W_rr - f(W) for the supersolution
  double super_r = 0.0, super_t = 0.0;
  double min_sub = 0.0;  // min of f(W) - (W_t - W_rr) for the subsolution
  double sub_r = 0.0, sub_t = 0.0;
  double tol = 0.0;
  std::size_t points = 0;
  bool pass = false;
};

struct WaveCheckOptions {
  double r0 = 0.0, t0 = 0.0;
  double r_lo = -50.0, r_hi = 50.0;
  double t_hi = 40.0;
  double h = 0.01, k = 0.01;
  double sigma = -1.0;  // < 0: constants.sigma0
  double beta = -1.0;   // < 0: constants.beta0
  bool shift_terms = true;  // false: plain U(r - ct), the discretisation-error baseline
};

// Tolerance 10 (h^2 + k^2) max|f'| on [q_bot, q_top].
double inequality_tolerance(const Nonlinearity& f, double h, double k);

// Finite-difference residuals of the moving-frame super/subsolutions built on wave w.
ViolationReport verify_wave_supersub(const Nonlinearity& f, const WaveProfile& w, const SupersubConstants& k,
                                     const WaveCheckOptions& opts = {});

struct RadialCheckOptions {
  double t0 = 10.0;
  double sigma = -1.0;
  double beta = -1.0;
  // The residual is exact algebra on the semi-discrete system (no difference
  // quotients), so only rounding error is tolerated.
  double tol = 1e-10;
};

// Residuals of V(r, t + t0 +- (1 - e^{-beta t})) +- sigma beta e^{-beta t} at every stored
// snapshot of V, with V_t taken as the semi-discrete right-hand side.
ViolationReport verify_radial_supersub(const Nonlinearity& f, const RadialTrajectory& V, const SupersubConstants& k,
                                       const RadialCheckOptions& opts = {});

struct SandwichOptions {
  double tol = 1e-6;
  double search_bound = 0.0;  // 0: 10 * T_final / 2 of u
};

struct SandwichReport {
  bool found = false;
  double T = 0.0, T0 = 0.0;
  double worst_lower = 0.0;  // min of u - (V(t - T) - s(t))
  double worst_upper = 0.0;  // min of V(t + T0) + s(t) - u
  double lower_r = 0.0, lower_t = 0.0, upper_r = 0.0, upper_t = 0.0;
  std::string message;
};

// V(|x|, t - T) - s(t) <= u(x, t) <= V(|x|, t + T0) + s(t), s(t) = sigma0 beta0 e^{-beta0 (t - T)},
// for all stored t > T; T, T0 range over multiples of V's snapshot interval.
SandwichReport sandwich_check(const RadialTrajectory& u, const RadialTrajectory& V, const SupersubConstants& k,
                              const SandwichOptions& opts = {});
SandwichReport sandwich_check(const Trajectory2D& u, const RadialTrajectory& V, const SupersubConstants& k,
                              const SandwichOptions& opts = {});

}  // namespace terracelab

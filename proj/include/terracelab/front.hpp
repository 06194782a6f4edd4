#pragma once

#include <optional>
#include <string>
#include <vector>

#include "terracelab/nonlinearity.hpp"

namespace terracelab {

// Monotone traveling front U'' + cU' + f(U) = 0 from q_top (z -> -inf) to q_bot
// (z -> +inf), sampled on a uniform z grid that contains z = 0 with
// U(0) = (q_top + q_bot) / 2. Beyond the sampled range (within tol_tail of the
// floors) value() continues the exponential tails, which keeps U smooth.
struct WaveProfile {
  double c = 0.0;
  double q_top = 0.0;
  double q_bot = 0.0;
  std::vector<double> z_samples;
  std::vector<double> u_samples;
  std::vector<double> du_samples;  // U'(z), from the phase-plane variable P

  double value(double z) const;
  double slope(double z) const;
  // Unique z with U(z) = level, level strictly between the floors.
  double coordinate_of(double level) const;
};

struct ShootResult {
  enum class Outcome { ReachedBottom, TouchedZero, Diverged };
  double c = 0.0;
  std::vector<double> v_grid;    // descending U values along the trajectory
  std::vector<double> P_values;  // P = U' at those values
  Outcome outcome = Outcome::Diverged;
  double v_touch = 0.0;   // where P returned to 0 (TouchedZero)
  double p_bottom = 0.0;  // P on arrival at q_bot (ReachedBottom)
  // Signed miss used for bisection: P(q_bot) < 0 on overshoot, v* - q_bot > 0 on touch.
  double miss = 0.0;
};

struct FrontOptions {
  double delta_launch_rel = 1e-4;  // launch offset relative to q_top - q_bot
  double tol_tail = 1e-6;
  double rtol = 1e-9;
  double bracket_tol = 1e-8;
  double sample_spacing = 0.01;
  int prescan = 24;
  double bottom_tol_rel = 1e-4;  // |U - q_bot|, |P| counted as arrival
  double z_max = 1e4;
};

// Speed cap 2 sqrt(sup_{[0,p]} |f'|) + 1.
double speed_cap(const Nonlinearity& f);

ShootResult shoot(const Nonlinearity& f, double q_top, double q_bot, double c,
                  const FrontOptions& opts = {});

// Bisection on c; std::nullopt when the energy condition fails or no direct
// monotone front joins q_top to q_bot. `connection` (if given) receives the
// zero of f the limiting trajectory actually reaches.
std::optional<WaveProfile> find_front(const Nonlinearity& f, double q_top, double q_bot,
                                      const FrontOptions& opts = {}, double* connection = nullptr);

// max over interior samples of |U'' + cU' + f(U)| with nonuniform 3-point differences.
double profile_residual(const WaveProfile& w, const Nonlinearity& f);

}  // namespace terracelab

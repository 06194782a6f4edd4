#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace terracelab::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct AdaptiveOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_init = 1e-3;
  double h_min = 1e-13;
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
};

enum class Stop { ReachedEnd, Observer, StepUnderflow, MaxSteps };

template <std::size_t N>
struct Result {
  Stop stop = Stop::ReachedEnd;
  double t = 0.0;
  State<N> y{};
  std::size_t steps = 0;
};

// One accepted step, with end-point derivatives for cubic Hermite dense output.
template <std::size_t N>
struct Step {
  double t0, t1;
  State<N> y0, y1, dy0, dy1;

  State<N> interpolate(double t) const {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    State<N> y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = h00 * y0[i] + h10 * h * dy0[i] + h01 * y1[i] + h11 * h * dy1[i];
    return y;
  }
};

// Dormand-Prince 5(4) with FSAL and a standard PI-free step controller.
// `observer(step)` is called after every accepted step; returning false stops.
template <std::size_t N, class Rhs, class Observer>
Result<N> integrate(Rhs&& rhs, double t0, State<N> y0, double t_end, const AdaptiveOptions& opt,
                    Observer&& observer) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  Result<N> res;
  res.t = t0;
  res.y = y0;
  const double dir = t_end >= t0 ? 1.0 : -1.0;
  double h = dir * std::min(opt.h_init, std::abs(t_end - t0));
  if (h == 0.0) return res;

  State<N> k1 = rhs(t0, y0), k2, k3, k4, k5, k6, k7, tmp, y_new;
  double t = t0;
  State<N> y = y0;

  while (dir * (t_end - t) > 0.0) {
    if (res.steps >= opt.max_steps) {
      res.stop = Stop::MaxSteps;
      break;
    }
    if (dir * (t + h - t_end) > 0.0) h = t_end - t;

    auto stage = [&](State<N>& out, std::initializer_list<std::pair<const State<N>*, double>> terms) {
      for (std::size_t i = 0; i < N; ++i) {
        double s = y[i];
        for (const auto& [k, a] : terms) s += h * a * (*k)[i];
        out[i] = s;
      }
    };
    stage(tmp, {{&k1, a21}});
    k2 = rhs(t + c2 * h, tmp);
    stage(tmp, {{&k1, a31}, {&k2, a32}});
    k3 = rhs(t + c3 * h, tmp);
    stage(tmp, {{&k1, a41}, {&k2, a42}, {&k3, a43}});
    k4 = rhs(t + c4 * h, tmp);
    stage(tmp, {{&k1, a51}, {&k2, a52}, {&k3, a53}, {&k4, a54}});
    k5 = rhs(t + c5 * h, tmp);
    stage(tmp, {{&k1, a61}, {&k2, a62}, {&k3, a63}, {&k4, a64}, {&k5, a65}});
    k6 = rhs(t + h, tmp);
    stage(y_new, {{&k1, b1}, {&k3, b3}, {&k4, b4}, {&k5, b5}, {&k6, b6}});
    k7 = rhs(t + h, y_new);

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < N; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err = std::max(err, std::abs(ei) / sc);
      finite = finite && std::isfinite(y_new[i]);
    }
    if (!finite) err = std::numeric_limits<double>::infinity();

    if (err <= 1.0) {
      Step<N> step{t, t + h, y, y_new, k1, k7};
      t += h;
      y = y_new;
      k1 = k7;
      ++res.steps;
      res.t = t;
      res.y = y;
      if (!observer(step)) {
        res.stop = Stop::Observer;
        return res;
      }
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = dir * std::min(std::abs(h) * fac, opt.h_max);
    } else {
      const double fac = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.1;
      h *= fac;
      if (std::abs(h) < opt.h_min) {
        res.stop = Stop::StepUnderflow;
        return res;
      }
    }
  }
  if (res.stop != Stop::MaxSteps) res.stop = Stop::ReachedEnd;
  return res;
}

}  // namespace terracelab::ode

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "terracelab/errors.hpp"
#include "terracelab/levelset.hpp"

using namespace terracelab;

namespace {

// Snapshots of a given profile u(r, t) on [0, R_max].
template <class F>
RadialTrajectory synthetic(F u, double R_max, double dr, double T, double dt_snap) {
  RadialTrajectory tr;
  tr.grid.R_max = R_max;
  tr.grid.dr = dr;
  const std::size_t n = tr.grid.nodes();
  for (double t = 0.0; t <= T + 1e-9; t += dt_snap) {
    std::vector<double> s(n);
    for (std::size_t j = 0; j < n; ++j) s[j] = u(tr.grid.r(j), t);
    tr.times.push_back(t);
    tr.snapshots.push_back(std::move(s));
  }
  return tr;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(x)); }

}  // namespace

TEST_CASE("level of a translating profile moves at the translation speed") {
  const Nonlinearity f = testing_support::make(testing_support::cubic(0.25));
  const auto tr = synthetic([](double r, double t) { return logistic(r - 10.0 - 0.3 * t); }, 100.0, 0.1, 200.0, 1.0);
  const LevelTrack track = track_level(tr, f, 0.5);
  REQUIRE(track.times.size() == tr.times.size());
  for (std::size_t i = 0; i < track.times.size(); ++i) CHECK(track.xi[i] == doctest::Approx(10.0 + 0.3 * track.times[i]).epsilon(1e-4));
  const SpeedEstimate se = estimate_speed(track);
  CHECK(se.c_hat == doctest::Approx(0.3).epsilon(1e-5));
  CHECK_FALSE(se.stalled);
  for (double v : track.xi_prime()) CHECK(v == doctest::Approx(0.3).epsilon(1e-3));
}

TEST_CASE("levels at stable zeros or outside (0, p) are rejected") {
  const Nonlinearity f = testing_support::make(testing_support::cubic(0.25));
  const auto tr = synthetic([](double r, double) { return logistic(r - 10.0); }, 30.0, 0.1, 1.0, 1.0);
  CHECK_THROWS_AS(track_level(tr, f, 1.0), PreconditionError);
  CHECK_THROWS_AS(track_level(tr, f, 1.5), PreconditionError);
}

TEST_CASE("a second crossing raises a monotonicity violation") {
  const Nonlinearity f = testing_support::make(testing_support::cubic(0.25));
  const auto tr = synthetic(
      [](double r, double t) { return t < 2.0 ? logistic(r - 10.0) : 0.8 * std::exp(-std::pow((r - 15.0) / 3.0, 2)); },
      40.0, 0.1, 4.0, 1.0);
  CHECK_THROWS_AS(track_level(tr, f, 0.5), MonotonicityViolation);
}

TEST_CASE("least-squares slope is exact on a line") {
  const auto [b, se] = fit_slope({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
  CHECK(b == doctest::Approx(2.0));
  CHECK(se == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("gap dichotomy separates diverging from bounded gaps") {
  const Nonlinearity f = testing_support::make(testing_support::quintic(0.05, 0.72));
  auto two_step = [](double shift_speed) {
    return [shift_speed](double r, double t) {
      const double r1 = 10.0 + 0.2 * t, r2 = 15.0 + shift_speed * t;
      return 0.5 * logistic(r - r1) + 0.5 * logistic(r - r2);
    };
  };
  DichotomyOptions o;
  o.bound = 20.0;
  const auto diverging = synthetic(two_step(0.45), 200.0, 0.1, 300.0, 1.0);
  const DichotomyReport d = gap_dichotomy(diverging, f, 0.05, 0.72, o);
  CHECK(d.classification == GapClass::Diverging);
  CHECK(d.slope == doctest::Approx(0.25).epsilon(1e-2));
  const auto bounded = synthetic(two_step(0.2), 200.0, 0.1, 300.0, 1.0);
  const DichotomyReport b = gap_dichotomy(bounded, f, 0.05, 0.72, o);
  CHECK(b.classification == GapClass::Bounded);
  // Exact gap of the profile (time independent here) by bisection on each level.
  auto crossing = [&](double level) {
    double lo = 0.0, hi = 100.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (two_step(0.2)(mid, 0.0) > level ? lo : hi) = mid;
    }
    return lo;
  };
  CHECK(b.max_tail_gap == doctest::Approx(crossing(0.05) - crossing(0.72)).epsilon(1e-3));
  CHECK_THROWS_AS(gap_dichotomy(bounded, f, 0.05, 0.5, o), PreconditionError);
}

TEST_CASE("slope threshold from the speed gaps") {
  CHECK(dichotomy_slope_min({0.1, 0.3}) == doctest::Approx(0.04));
  CHECK(dichotomy_slope_min({0.2}) == doctest::Approx(0.01));
  CHECK(to_string(GapClass::Bounded) == "bounded");
}

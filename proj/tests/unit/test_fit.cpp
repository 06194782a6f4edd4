#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "terracelab/fit.hpp"

using namespace terracelab;

TEST_CASE("shifts and residual of an exact shifted front are recovered") {
  const Nonlinearity f = testing_support::make(testing_support::cubic(0.25));
  const Terrace terrace = decompose(f);
  const WaveProfile& w = terrace.waves[0];
  auto eta = [](double t) { return 3.0 + 2.0 * std::exp(-t / 50.0); };

  RadialTrajectory tr;
  tr.grid.R_max = 150.0;
  tr.grid.dr = 0.05;
  for (double t = 0.0; t <= 200.0 + 1e-9; t += 1.0) {
    std::vector<double> s(tr.grid.nodes());
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = w.value(tr.grid.r(j) - 40.0 - w.c * t - eta(t));
    tr.times.push_back(t);
    tr.snapshots.push_back(std::move(s));
  }
  const auto shifts = fit_shifts(tr, f, terrace);
  REQUIRE(shifts.size() == 1);
  CHECK(shifts[0].anchor_level == doctest::Approx(0.25));
  CHECK(w.value(shifts[0].r0) == doctest::Approx(0.25).epsilon(1e-9));
  for (std::size_t i = 0; i < shifts[0].times.size(); ++i)
    CHECK(shifts[0].eta[i] == doctest::Approx(40.0 + eta(shifts[0].times[i])).epsilon(1e-4));
  const ResidualSeries res = convergence_residual(tr, terrace, shifts);
  for (double r : res.rho) CHECK(r < 1e-4);
}

TEST_CASE("superposition of a single wave is the wave itself") {
  const Nonlinearity f = testing_support::make(testing_support::cubic(0.25));
  const Terrace terrace = decompose(f);
  for (double z : {-3.0, 0.0, 2.5}) CHECK(terrace_superposition(terrace, {z}) == doctest::Approx(terrace.waves[0].value(z)));
}

TEST_CASE("two-wave superposition stacks the floors") {
  const Nonlinearity f = testing_support::make(testing_support::quintic(0.05, 0.72));
  const Terrace terrace = decompose(f);
  REQUIRE(terrace.size() == 2);
  // Far behind both fronts: top floor; between them: the middle floor; ahead: 0.
  CHECK(terrace_superposition(terrace, {-200.0, -400.0}) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(terrace_superposition(terrace, {200.0, -200.0}) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(terrace_superposition(terrace, {400.0, 200.0}) == doctest::Approx(0.0).scale(1.0).epsilon(1e-5));
}

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "terracelab/comparison.hpp"
#include "terracelab/errors.hpp"

using namespace terracelab;

namespace {

struct Cubic {
  Nonlinearity f = testing_support::make(testing_support::cubic(0.25));
  Terrace t = decompose(f);
};

const Cubic& cubic() {
  static const Cubic c;
  return c;
}

}  // namespace

TEST_CASE("tolerance formula 10 (h^2 + k^2) max|f'|") {
  const Nonlinearity& f = cubic().f;
  CHECK(inequality_tolerance(f, 0.01, 0.01) == doctest::Approx(10.0 * 2e-4 * f.max_abs_derivative(0.0, 1.0)));
}

TEST_CASE("wave constants for the cubic follow the recipe") {
  const Cubic& c = cubic();
  const SupersubConstants k = compute_constants(c.f, c.t);
  // min of -f' = 0.25 - 2.5u + 3u^2 on [-2e, 2e] and of 0.75 ... on [1-2e, 1+2e], e = 0.005.
  const double e2 = 0.01;
  const double at0 = 0.25 - 2.5 * e2 + 3.0 * e2 * e2;
  const double at1 = -(-3.0 * std::pow(1.0 - e2, 2) + 2.5 * (1.0 - e2) - 0.25);
  CHECK(k.eta0 == doctest::Approx(std::min(at0, at1)).epsilon(1e-6));
  CHECK(k.beta0 == doctest::Approx(k.eta0 / 2.0));
  CHECK(k.sigma0 <= k.epsilon_nbhd);
  CHECK(k.sigma0 == doctest::Approx(std::min(k.epsilon_nbhd, k.eta0 * k.interface / (2.0 * k.M0))));
}

TEST_CASE("wave super/subsolutions hold; inflated sigma breaks them") {
  const Cubic& c = cubic();
  const SupersubConstants k = compute_constants(c.f, c.t);
  WaveCheckOptions o;
  o.t_hi = 10.0;
  const ViolationReport base = verify_wave_supersub(c.f, c.t.waves[0], k, o);
  CHECK(base.pass);
  o.shift_terms = false;
  const ViolationReport plain = verify_wave_supersub(c.f, c.t.waves[0], k, o);
  CHECK(std::abs(plain.min_super) < plain.tol);
  o.shift_terms = true;
  o.sigma = 100.0 * k.sigma0;
  const ViolationReport infl = verify_wave_supersub(c.f, c.t.waves[0], k, o);
  CHECK_FALSE(infl.pass);
}

TEST_CASE("radial super/subsolutions on a terrace-seed run") {
  const Cubic& c = cubic();
  RadialGrid g;
  g.R_max = 80.0;
  g.dr = 0.2;
  const TerraceSeed s = build_terrace_initial(c.f, 1e-2, 2, g);
  const RadialTrajectory V = simulate(c.f, s.u0, g, {60.0, 1.0}, InitialKind::TerraceSeed, s.R0);
  const SupersubConstants k = compute_constants(c.f, c.t, V);
  CHECK(k.form == SupersubConstants::Form::Radial);
  CHECK(k.beta0 > 0.0);
  CHECK(k.sigma0 > 0.0);
  const ViolationReport r = verify_radial_supersub(c.f, V, k);
  CHECK(r.pass);
  RadialCheckOptions o;
  o.sigma = 100.0 * k.sigma0;
  CHECK_FALSE(verify_radial_supersub(c.f, V, k, o).pass);
  o.t0 = 0.5;  // earlier than the t_min used for the constants
  CHECK_THROWS_AS(verify_radial_supersub(c.f, V, k, o), PreconditionError);
}

TEST_CASE("a trajectory is sandwiched by itself with zero shifts") {
  const Cubic& c = cubic();
  RadialGrid g;
  g.R_max = 60.0;
  g.dr = 0.2;
  const TerraceSeed s = build_terrace_initial(c.f, 1e-2, 2, g);
  const RadialTrajectory V = simulate(c.f, s.u0, g, {40.0, 1.0}, InitialKind::TerraceSeed, s.R0);
  const SupersubConstants k = compute_constants(c.f, c.t, V);
  const SandwichReport r = sandwich_check(V, V, k);
  CHECK(r.found);
  CHECK(r.T == 0.0);
  CHECK(r.T0 == 0.0);
}

TEST_CASE("sandwich fails when V cannot dominate") {
  const Cubic& c = cubic();
  RadialGrid g;
  g.R_max = 60.0;
  g.dr = 0.2;
  const TerraceSeed s = build_terrace_initial(c.f, 1e-2, 2, g);
  const RadialTrajectory V = simulate(c.f, s.u0, g, {20.0, 1.0}, InitialKind::TerraceSeed, s.R0);
  // u: a much wider plateau than V at every time within the available shifts.
  const auto u0 = build_bump_initial(c.f, 0.99, 40.0, g);
  const RadialTrajectory u = simulate(c.f, u0, g, {20.0, 1.0});
  const SupersubConstants k = compute_constants(c.f, c.t, V);
  const SandwichReport r = sandwich_check(u, V, k);
  CHECK_FALSE(r.found);
  CHECK_FALSE(r.message.empty());
}

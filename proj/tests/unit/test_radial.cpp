#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "terracelab/errors.hpp"
#include "terracelab/radial_pde.hpp"

using namespace terracelab;

namespace {

const Nonlinearity& cubic_f() {
  static const Nonlinearity f = testing_support::make(testing_support::cubic(0.25));
  return f;
}

RadialGrid small_grid(double R = 60.0, double dr = 0.2) {
  RadialGrid g;
  g.R_max = R;
  g.dr = dr;
  return g;
}

// Fine RK4 for u' = f(u).
double ode_reference(const Nonlinearity& f, double u, double T) {
  const int n = 200000;
  const double h = T / n;
  for (int i = 0; i < n; ++i) {
    const double k1 = f.value(u), k2 = f.value(u + 0.5 * h * k1), k3 = f.value(u + 0.5 * h * k2),
                 k4 = f.value(u + h * k3);
    u += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return u;
}

}  // namespace

TEST_CASE("spatially uniform data follow u' = f(u)") {
  const RadialGrid g = small_grid(20.0);
  const std::vector<double> u0(g.nodes(), 0.4);
  const RadialTrajectory tr = simulate(cubic_f(), u0, g, {5.0, 5.0});
  const double ref = ode_reference(cubic_f(), 0.4, 5.0);
  for (double x : tr.snapshots.back()) CHECK(x == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("stable constant states are steady") {
  const RadialGrid g = small_grid(20.0);
  for (double c : {0.0, 1.0}) {
    const std::vector<double> u0(g.nodes(), c);
    const RadialTrajectory tr = simulate(cubic_f(), u0, g, {5.0, 1.0});
    for (double x : tr.snapshots.back()) CHECK(x == c);
  }
}

TEST_CASE("explicit scheme rejects a CFL violation") {
  RadialGrid g = small_grid();
  g.dt = 0.9 * g.dr * g.dr;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g.scheme = Scheme::IMEXTrapezoid;
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("IMEX and RK4 agree to discretisation accuracy") {
  RadialGrid g = small_grid(40.0, 0.2);
  const auto u0 = build_bump_initial(cubic_f(), 0.9, 10.0, g);
  const RadialTrajectory a = simulate(cubic_f(), u0, g, {10.0, 10.0});
  g.scheme = Scheme::IMEXTrapezoid;
  g.dt = 0.002;
  const RadialTrajectory b = simulate(cubic_f(), u0, g, {10.0, 10.0});
  double diff = 0.0;
  for (std::size_t j = 0; j < a.snapshots.back().size(); ++j)
    diff = std::max(diff, std::abs(a.snapshots.back()[j] - b.snapshots.back()[j]));
  CHECK(diff < 1e-3);
}

TEST_CASE("terrace seed: discrete and continuous first zeros agree") {
  const RadialGrid g = small_grid(60.0, 0.1);
  const TerraceSeed s = build_terrace_initial(cubic_f(), 1e-2, 2, g);
  CHECK(s.R0 == doctest::Approx(s.R0_continuous).epsilon(5e-3));
  CHECK(s.u0.front() == doctest::Approx(0.99));
  for (std::size_t j = 1; j < s.u0.size(); ++j) CHECK(s.u0[j] <= s.u0[j - 1]);
  CHECK(s.u0.back() == 0.0);
}

TEST_CASE("one-dimensional first zero matches the energy quadrature") {
  // v'' + f(v) = 0, v(0) = v0: R0 = integral_0^{v0} dv / sqrt(2 (F(v0) - F(v))).
  const Nonlinearity& f = cubic_f();
  const double v0 = 0.99;
  // Substitute v = v0 - s^2 to remove the endpoint singularity.
  const double smax = std::sqrt(v0);
  const int n = 200000;
  double R = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = (i + 0.5) * smax / n;
    const double v = v0 - s * s;
    R += 2.0 * s / std::sqrt(2.0 * f.integral(v, v0)) * smax / n;
  }
  CHECK(radial_ode_zero(f, 1.0 - v0, 1, 100.0) == doctest::Approx(R).epsilon(1e-4));
}

TEST_CASE("terrace seed gives monotone snapshots") {
  const RadialGrid g = small_grid(60.0, 0.2);
  const TerraceSeed s = build_terrace_initial(cubic_f(), 1e-2, 2, g);
  const RadialTrajectory tr = simulate(cubic_f(), s.u0, g, {40.0, 1.0}, InitialKind::TerraceSeed, s.R0);
  const MonotonicityReport m = monotonicity_report(tr);
  CHECK(m.pass);
  CHECK(m.checked_ut);
}

TEST_CASE("bump classification: small bumps die out, large bumps spread") {
  const RadialGrid g = small_grid(80.0, 0.2);
  SpreadingOptions o;
  o.min_speed = 0.35;
  CHECK(classify_bump(cubic_f(), 0.6, 1.0, g, o) == SpreadingOutcome::Extinction);
  CHECK(classify_bump(cubic_f(), 0.6, 15.0, g, o) == SpreadingOutcome::Spreading);
  const double R = estimate_spreading_radius(cubic_f(), 0.6, 2, g, o);
  CHECK(R > 1.0);
  CHECK(R < 15.0);
  CHECK(classify_bump(cubic_f(), 0.6, R, g, o) == SpreadingOutcome::Spreading);
  CHECK(classify_bump(cubic_f(), 0.6, R - g.dr, g, o) == SpreadingOutcome::Extinction);
}

TEST_CASE("spreading radius does not depend on the worker count") {
  const RadialGrid g = small_grid(80.0, 0.2);
  SpreadingOptions a, b;
  a.min_speed = b.min_speed = 0.35;
  b.workers = 3;
  CHECK(estimate_spreading_radius(cubic_f(), 0.6, 2, g, a) == estimate_spreading_radius(cubic_f(), 0.6, 2, g, b));
}

TEST_CASE("initial data outside the invariant region are rejected") {
  const RadialGrid g = small_grid(20.0);
  std::vector<double> u0(g.nodes(), 0.5);
  u0[3] = -5.0;
  CHECK_THROWS_AS(simulate(cubic_f(), u0, g, {1.0, 1.0}), PreconditionError);
}

TEST_CASE("snapshot interval must divide the horizon") {
  const RadialGrid g = small_grid(20.0);
  const std::vector<double> u0(g.nodes(), 0.5);
  CHECK_THROWS_AS(simulate(cubic_f(), u0, g, {1.0, 0.3}), ConfigError);
}

TEST_CASE("radial rhs vanishes on constants at zeros of f") {
  const RadialGrid g = small_grid(20.0);
  std::vector<double> out;
  radial_rhs(cubic_f(), g, std::vector<double>(g.nodes(), 1.0), out);
  for (double x : out) CHECK(x == doctest::Approx(0.0).scale(1.0));
  CHECK(sample_radial(g, std::vector<double>(g.nodes(), 0.3), 7.77) == doctest::Approx(0.3));
}

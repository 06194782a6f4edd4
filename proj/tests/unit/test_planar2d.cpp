#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "terracelab/errors.hpp"
#include "terracelab/kernels.hpp"
#include "terracelab/planar2d.hpp"

using namespace terracelab;

namespace {
const Nonlinearity& cubic_f() {
  static const Nonlinearity f = testing_support::make(testing_support::cubic(0.25));
  return f;
}
Grid2D small2d(int n = 128, double L = 32.0) {
  Grid2D g;
  g.n = n;
  g.L = L;
  return g;
}
}  // namespace

TEST_CASE("radially symmetric 2-D data follow the radial N = 2 solver") {
  const Grid2D g = small2d();
  RadialGrid rg;
  rg.R_max = 50.0;
  rg.dr = 0.05;
  std::vector<double> prof(rg.nodes());
  for (std::size_t j = 0; j < prof.size(); ++j) prof[j] = 0.9 * std::exp(-std::pow(rg.r(j) / 10.0, 4.0));
  const auto u0 = radial_initial_2d(rg, prof, g);
  const Trajectory2D u = simulate2d(cubic_f(), u0, g, {10.0, 10.0});
  const RadialTrajectory v = simulate(cubic_f(), prof, rg, {10.0, 10.0});
  double diff = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double r = std::hypot(g.x(i), g.x(j));
      if (r > 25.0) continue;
      diff = std::max(diff, std::abs(u.snapshots.back()[static_cast<std::size_t>(i) * g.n + j] -
                                     sample_radial(rg, v.snapshots.back(), r)));
    }
  CHECK(diff < 5e-3);
}

TEST_CASE("2-D runs are identical for any worker count and instruction set") {
  const Grid2D g = small2d(64, 16.0);
  const auto u0 = elliptical_initial(cubic_f(), 0.9, 8.0, 5.0, 0.6, g);
  const Trajectory2D a = simulate2d(cubic_f(), u0, g, {2.0, 1.0}, 1);
  const Trajectory2D b = simulate2d(cubic_f(), u0, g, {2.0, 1.0}, 3);
  CHECK(a.snapshots == b.snapshots);
  if (kernels::avx2_table()) {
    kernels::force_isa(kernels::Isa::Scalar);
    const Trajectory2D c = simulate2d(cubic_f(), u0, g, {2.0, 1.0}, 2);
    kernels::force_isa(std::nullopt);
    CHECK(c.isa == "scalar");
    CHECK(a.snapshots == c.snapshots);
  }
}

TEST_CASE("elliptical seed values") {
  const Grid2D g = small2d(64, 16.0);
  const auto u0 = elliptical_initial(cubic_f(), 0.9, 8.0, 5.0, 0.6, g);
  CHECK(u0[static_cast<std::size_t>(32) * 64 + 32] == doctest::Approx(0.9));
  CHECK(u0[0] == 0.0);
}

TEST_CASE("ring of a radial profile is a circle") {
  Trajectory2D tr;
  tr.grid = small2d(128, 32.0);
  const double R = 12.0;
  std::vector<double> s(tr.grid.cells());
  for (int i = 0; i < tr.grid.n; ++i)
    for (int j = 0; j < tr.grid.n; ++j)
      s[static_cast<std::size_t>(i) * tr.grid.n + j] = 1.0 / (1.0 + std::exp(std::hypot(tr.grid.x(i), tr.grid.x(j)) - R));
  tr.times = {0.0};
  tr.snapshots = {s};
  RingOptions o;
  o.slice_half_width = 5.0;
  const RingExtract ring = extract_ring(tr, 0, 0.5, o);
  REQUIRE(ring.xi.size() == 64);
  for (double x : ring.xi) CHECK(x == doctest::Approx(R).epsilon(5e-3));
  CHECK(ring.R_bar - ring.R_under < 0.1);
  CHECK(ring_svg({ring}, tr.grid.L).find("<svg") != std::string::npos);
}

TEST_CASE("ring extraction refuses a level with no crossing") {
  Trajectory2D tr;
  tr.grid = small2d(32, 8.0);
  tr.times = {0.0};
  tr.snapshots = {std::vector<double>(tr.grid.cells(), 0.1)};
  CHECK_THROWS_AS(extract_ring(tr, 0, 0.5), PreTaError);
}

TEST_CASE("explicit 2-D step is bounded by the CFL number") {
  Grid2D g = small2d(64, 16.0);
  g.dt = g.h() * g.h();
  CHECK_THROWS_AS(g.validate(), ConfigError);
}

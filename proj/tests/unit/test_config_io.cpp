#include <doctest.h>

#include <filesystem>

#include "helpers.hpp"
#include "terracelab/config.hpp"
#include "terracelab/errors.hpp"
#include "terracelab/parallel.hpp"
#include "terracelab/report_io.hpp"

using namespace terracelab;
namespace fs = std::filesystem;

namespace {
const char* kBase = R"(
[nonlinearity]
coeffs = [0.0, -0.25, 1.25, -1.0]
[grid]
R_max = 50.0
dr = 0.25
T_final = 20.0
)";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("terracelab_unit_" + name);
  fs::remove_all(p);
  return p;
}
}  // namespace

TEST_CASE("config defaults and values") {
  const RunConfig c = parse_config(kBase);
  CHECK(c.grid.R_max == 50.0);
  CHECK(c.grid.dr == 0.25);
  CHECK(c.grid.N == 2);
  CHECK(c.T_final == 20.0);
  CHECK(c.term.value(0.5) == doctest::Approx(0.5 * 0.5 * 0.25));
  CHECK(c.constants.epsilon_nbhd == 0.005);
  CHECK(c.format == "csv");
}

TEST_CASE("overrides replace and add keys") {
  const RunConfig c = parse_config(kBase, {"grid.dr=0.5", "grid.scheme=imex", "levels.values=[0.3, 0.6]", "workers=3"});
  CHECK(c.grid.dr == 0.5);
  CHECK(c.grid.scheme == Scheme::IMEXTrapezoid);
  CHECK(c.levels == std::vector<double>{0.3, 0.6});
  CHECK(c.workers == 3);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("[grid\nN = 2"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kBase) + "\n[typo]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kBase) + "\n[front]\nrtoll = 1e-9\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(kBase, {"grid.scheme=\"euler\""}), ConfigError);
  CHECK_THROWS_AS(parse_config(kBase, {"grid.R_max=50.1"}), ConfigError);
  CHECK_THROWS_AS(parse_config(kBase, {"grid.N=\"two\""}), ConfigError);
  CHECK_THROWS_AS(parse_config(kBase, {"no_equals_sign"}), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\nN = 2\n"), ConfigError);  // no nonlinearity
  CHECK_THROWS_AS(load_config("/nonexistent/file.toml"), ConfigError);
}

TEST_CASE("node-interpolant nonlinearity from config") {
  const RunConfig c = parse_config(R"(
[nonlinearity]
kind = "nodes"
points = [[0.0, 0.0], [0.3, -0.05], [0.5, 0.0], [0.8, 0.06], [1.0, 0.0]]
)");
  CHECK(c.term.kind() == ReactionTerm::Kind::Nodes);
  CHECK(c.term.value(0.3) == doctest::Approx(-0.05));
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(io::fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(io::fnv1a64_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("CSV round trip is exact") {
  const fs::path dir = scratch("csv");
  const std::vector<double> a{0.1, 1.0 / 3.0, -2.5e-300}, b{1e300, 0.0, -0.0};
  io::write_csv(dir / "t.csv", {"a", "b"}, {a, b});
  const auto rows = io::read_csv_rows(dir / "t.csv");
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rows[i][0] == a[i]);
    CHECK(rows[i][1] == b[i]);
  }
  fs::remove_all(dir);
}

TEST_CASE("profile and trajectory round trips") {
  const fs::path dir = scratch("traj");
  const Nonlinearity f = testing_support::make(testing_support::cubic(0.25));
  const Terrace t = decompose(f);
  io::write_profile_csv(dir / "w.csv", t.waves[0], 1e-5);
  const WaveProfile w = io::read_profile_csv(dir / "w.csv");
  CHECK(w.c == t.waves[0].c);
  CHECK(w.u_samples == t.waves[0].u_samples);
  CHECK(w.z_samples == t.waves[0].z_samples);

  RadialGrid g;
  g.R_max = 20.0;
  g.dr = 0.5;
  const auto u0 = build_bump_initial(f, 0.8, 5.0, g);
  const RadialTrajectory tr = simulate(f, u0, g, {3.0, 1.0}, InitialKind::Bump, 5.0);
  for (const char* fmt : {"csv", "binary"}) {
    io::write_trajectory(dir, std::string("tr_") + fmt, tr, f.term(), fmt);
    const RadialTrajectory back = io::read_trajectory(dir, std::string("tr_") + fmt);
    CHECK(back.times == tr.times);
    CHECK(back.snapshots == tr.snapshots);
    CHECK(back.grid.dr == tr.grid.dr);
    CHECK(back.initial_kind == InitialKind::Bump);
    const auto side = io::read_json(dir / (std::string("tr_") + fmt + ".json"));
    CHECK(side.at("f_hash").get<std::string>() == io::fnv1a64_hex(f.term().canonical()));
  }
  fs::remove_all(dir);
}

TEST_CASE("parallel_for covers every index and rethrows the lowest failure") {
  std::vector<int> hit(100, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 7 || i == 31) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "7");
  }
  CHECK(default_workers() >= 1);
}

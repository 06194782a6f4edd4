// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Arguments select a subset, e.g. `acceptance 1 3 7`.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "terracelab/comparison.hpp"
#include "terracelab/config.hpp"
#include "terracelab/errors.hpp"
#include "terracelab/fit.hpp"
#include "terracelab/front.hpp"
#include "terracelab/levelset.hpp"
#include "terracelab/planar2d.hpp"
#include "terracelab/radial_pde.hpp"
#include "terracelab/terrace.hpp"

using namespace terracelab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string config_path(const std::string& name) { return std::string(TERRACELAB_SOURCE_DIR) + "/configs/" + name; }

Nonlinearity make_f(const RunConfig& c) { return Nonlinearity(c.term, c.search, c.zero); }

TerraceOptions terrace_options(const RunConfig& c) {
  TerraceOptions o;
  o.front = c.front;
  o.tol_speed = c.tol_speed;
  return o;
}

// -8 u (u - a)(u - 0.5)(u - b)(u - 1), ascending coefficients.
ReactionTerm quintic(double a, double b) {
  std::vector<double> p{-8.0};
  for (double root : {0.0, a, 0.5, b, 1.0}) {
    std::vector<double> q(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i + 1] += p[i];
      q[i] -= root * p[i];
    }
    p = q;
  }
  return ReactionTerm::polynomial(p);
}

// The cubic terrace-seed run shared by criteria 3, 4, 6 and 7.
struct CubicRun {
  RunConfig cfg;
  std::optional<Nonlinearity> f;
  Terrace terrace;
  RadialTrajectory traj;
  double seconds = 0.0;
};

CubicRun& cubic_run() {
  static std::optional<CubicRun> run;
  if (!run) {
    CubicRun r;
    r.cfg = load_config(config_path("cubic.toml"));
    r.f.emplace(make_f(r.cfg));
    r.terrace = decompose(*r.f, terrace_options(r.cfg));
    const auto t0 = std::chrono::steady_clock::now();
    const TerraceSeed seed = build_terrace_initial(*r.f, r.cfg.epsilon, r.cfg.grid.N, r.cfg.grid);
    r.traj = simulate(*r.f, seed.u0, r.cfg.grid, {r.cfg.T_final, r.cfg.stride}, InitialKind::TerraceSeed, seed.R0);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    run = std::move(r);
  }
  return *run;
}

Outcome criterion1() {
  const RunConfig cfg = load_config(config_path("cubic.toml"));
  const auto t0 = std::chrono::steady_clock::now();
  const Nonlinearity f = make_f(cfg);
  const auto w = find_front(f, 1.0, 0.0, cfg.front);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!w) return {false, "no front found"};
  const double c_exact = (1.0 - 2.0 * 0.25) / std::sqrt(2.0);
  double sup = 0.0;
  for (std::size_t i = 0; i < w->z_samples.size(); ++i) {
    const double exact = 1.0 / (1.0 + std::exp(w->z_samples[i] / std::sqrt(2.0)));
    sup = std::max(sup, std::abs(w->u_samples[i] - exact));
  }
  std::ostringstream os;
  os << "c=" << w->c << " |c-c*|=" << std::abs(w->c - c_exact) << " profile sup err=" << sup << " t=" << secs << "s";
  return {std::abs(w->c - c_exact) <= 1e-3 && sup <= 1e-3 && secs < 1.0, os.str()};
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream os;
  bool ok = true;
  for (const char* name : {"cubic.toml", "quintic.toml"}) {
    const RunConfig cfg = load_config(config_path(name));
    const Nonlinearity f = make_f(cfg);
    const Terrace t = decompose(f, terrace_options(cfg));
    bool chain = !t.speeds.empty() && t.floors.front() == f.require_landmarks().p && t.floors.back() == 0.0;
    for (std::size_t k = 0; k < t.speeds.size(); ++k) {
      chain = chain && t.speeds[k] > 0.0;
      if (k) chain = chain && t.speeds[k] >= t.speeds[k - 1] - cfg.tol_speed;
    }
    os << name << ": " << t.size() << " wave(s), speeds";
    for (double c : t.speeds) os << " " << c;
    // Order check for every triple of stable zeros whose three fronts exist.
    const auto stable = f.zeros_in(0.0, f.require_landmarks().p, Stability::Stable);
    int checked = 0;
    for (std::size_t a = 0; a < stable.size(); ++a)
      for (std::size_t m = a + 1; m < stable.size(); ++m)
        for (std::size_t b = m + 1; b < stable.size(); ++b) {
          auto has = [&](double top, double bot) {
            for (const auto& e : t.pair_table)
              if (e.q_top == top && e.q_bot == bot) return e.has_front;
            return false;
          };
          if (!(has(stable[b], stable[a]) && has(stable[b], stable[m]) && has(stable[m], stable[a]))) continue;
          const OrderReport r = speed_order_check(f, stable[b], stable[m], stable[a], terrace_options(cfg));
          ++checked;
          os << "; order " << *r.c_top << " > " << r.c << " > " << *r.c_bot << (r.pass ? " ok" : " FAILED");
          chain = chain && r.pass;
        }
    os << " (" << checked << " order check(s)); ";
    ok = ok && chain;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  os << "t=" << secs << "s";
  return {ok && secs < 10.0, os.str()};
}

Outcome criterion3() {
  CubicRun& r = cubic_run();
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream os;
  bool ok = true;
  const double c = r.terrace.speeds.front();
  for (double level : {0.3, 0.5, 0.7}) {
    const SpeedEstimate se = estimate_speed(track_level(r.traj, *r.f, level), r.cfg.tail_fraction);
    const double rel = (se.c_hat - c) / c;
    ok = ok && std::abs(rel) <= 0.02;
    os << "level " << level << ": c_hat=" << se.c_hat << " (" << 100.0 * rel << "%); ";
  }
  const double secs = r.seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  os << "t=" << secs << "s";
  return {ok && secs < 120.0, os.str()};
}

Outcome criterion4() {
  CubicRun& r = cubic_run();
  const MonotonicityReport m = monotonicity_report(r.traj, 1e-6);
  std::ostringstream os;
  os << "min u_t=" << m.worst_ut << " max u_r=" << m.worst_ur << " over " << r.traj.times.size() << " snapshots";
  return {m.pass && m.checked_ut, os.str()};
}

Outcome criterion5() {
  const RunConfig base = load_config(config_path("quintic.toml"));
  struct Setting {
    double a, b;
  };
  const std::vector<Setting> settings{{0.15, 0.6}, {0.2, 0.55}, {0.05, 0.72}, {0.1, 0.75}};
  std::ostringstream os;
  bool ok = true;
  std::set<GapClass> seen;
  for (const Setting& s : settings) {
    const Nonlinearity f(quintic(s.a, s.b), base.search, base.zero);
    const Terrace t = decompose(f, terrace_options(base));
    const TerraceSeed seed = build_terrace_initial(f, base.epsilon, base.grid.N, base.grid);
    // Stop before the fastest front reaches the far boundary.
    const double cmax = *std::max_element(t.speeds.begin(), t.speeds.end());
    double T = std::floor((base.grid.R_max - seed.R0 - 20.0) / cmax / base.stride) * base.stride;
    T = std::min(T, base.T_final);
    const RadialTrajectory tr = simulate(f, seed.u0, base.grid, {T, base.stride}, InitialKind::TerraceSeed, seed.R0);
    DichotomyOptions o;
    o.slope_min = dichotomy_slope_min(t.speeds);
    o.tail_fraction = base.tail_fraction;
    const DichotomyReport d = gap_dichotomy(tr, f, s.a, s.b, o);
    bool floor_between = false;
    for (double q : t.floors)
      if (q > s.a && q < s.b) floor_between = true;
    const GapClass expected = floor_between ? GapClass::Diverging : GapClass::Bounded;
    const bool agree = d.classification == expected;
    ok = ok && agree;
    seen.insert(d.classification);
    os << "(a,b)=(" << s.a << "," << s.b << "): " << t.size() << " wave(s), rho " << to_string(d.classification)
       << " (slope " << d.slope << ", tail gap " << d.max_tail_gap << ")" << (agree ? "" : " DISAGREES") << "; ";
  }
  ok = ok && seen.count(GapClass::Diverging) && seen.count(GapClass::Bounded);
  return {ok, os.str()};
}

Outcome criterion6() {
  CubicRun& r = cubic_run();
  const auto shifts = fit_shifts(r.traj, *r.f, r.terrace);
  const ResidualSeries res = convergence_residual(r.traj, r.terrace, shifts);
  auto rho_at = [&](double t) {
    for (std::size_t i = 0; i < res.times.size(); ++i)
      if (std::abs(res.times[i] - t) < 1e-9) return res.rho[i];
    throw PreconditionError("residual not available at the requested time");
  };
  const double T = r.cfg.T_final;
  const double rho_half = rho_at(0.5 * T), rho_full = rho_at(T);
  double tail = 0.0;
  for (const auto& s : shifts) {
    const std::size_t from = s.eta_prime.size() - s.eta_prime.size() / 4;
    for (std::size_t i = from; i < s.eta_prime.size(); ++i) tail = std::max(tail, std::abs(s.eta_prime[i]));
  }
  std::ostringstream os;
  os << "rho(" << 0.5 * T << ")=" << rho_half << " rho(" << T << ")=" << rho_full << " eta' tail sup=" << tail;
  return {rho_full <= 0.02 && rho_full < rho_half && tail <= 1e-2, os.str()};
}

Outcome criterion7() {
  CubicRun& r = cubic_run();
  const Nonlinearity& f = *r.f;
  std::ostringstream os;
  bool ok = true;

  const SupersubConstants kw = compute_constants(f, r.terrace);
  for (const auto& w : r.terrace.waves) {
    WaveCheckOptions o;
    const ViolationReport base = verify_wave_supersub(f, w, kw, o);
    o.sigma = 100.0 * kw.sigma0;
    const ViolationReport infl = verify_wave_supersub(f, w, kw, o);
    ok = ok && base.pass && !infl.pass;
    os << "wave: min residual " << std::min(base.min_super, base.min_sub) << " (tol " << base.tol << "), 100x sigma "
       << std::min(infl.min_super, infl.min_sub) << (infl.pass ? " NOT detected" : " detected") << "; ";
  }

  // Radial form on the configured terrace-seed run.
  const SupersubConstants kr = compute_constants(f, r.terrace, r.traj);
  RadialCheckOptions ro;
  const ViolationReport rb = verify_radial_supersub(f, r.traj, kr, ro);
  ro.sigma = 100.0 * kr.sigma0;
  const ViolationReport ri = verify_radial_supersub(f, r.traj, kr, ro);
  ok = ok && rb.pass && !ri.pass;
  os << "radial: sigma0=" << kr.sigma0 << " beta0=" << kr.beta0 << " min residual "
     << std::min(rb.min_super, rb.min_sub) << " (tol " << rb.tol << "), 100x sigma "
     << std::min(ri.min_super, ri.min_sub) << (ri.pass ? " NOT detected" : " detected");
  return {ok, os.str()};
}

Outcome criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  CubicRun& r = cubic_run();
  const Nonlinearity& f = *r.f;
  const RunConfig& cfg = r.cfg;
  std::ostringstream os;

  // Radial sandwich for a plateau bump (not a terrace seed).
  const SupersubConstants kr = compute_constants(f, r.terrace, r.traj);
  SpreadingOptions so;
  so.min_speed = r.terrace.speeds.front();
  const double R_theta = estimate_spreading_radius(f, cfg.sandwich_theta, cfg.grid.N, cfg.grid, so);
  const double R_bump = R_theta + cfg.sandwich_R_offset;
  const auto u0 = build_bump_initial(f, cfg.sandwich_theta, R_bump, cfg.grid);
  const RadialTrajectory u = simulate(f, u0, cfg.grid, {0.5 * cfg.T_final, cfg.stride}, InitialKind::Bump, R_bump);
  const SandwichReport sr = sandwich_check(u, r.traj, kr);
  os << "radial bump (theta=" << cfg.sandwich_theta << ", R=" << R_bump << "): "
     << (sr.found ? "T=" + std::to_string(sr.T) + " T0=" + std::to_string(sr.T0) : sr.message) << "; ";

  // 2-D elliptical seed.
  const Grid2D& g = cfg.grid2d;
  const auto e0 = elliptical_initial(f, cfg.theta2d, cfg.ellipse_a, cfg.ellipse_b, cfg.ellipse_angle, g);
  const Trajectory2D u2 = simulate2d(f, e0, g, {cfg.T2d, cfg.stride2d}, 1);
  std::vector<RingExtract> rings;
  for (std::size_t s = 0; s < u2.times.size(); ++s)
    if (u2.times[s] >= cfg.ring_from - 1e-9) rings.push_back(extract_ring(u2, s, cfg.level2d, cfg.ring));
  const MetricsReport m = ring_metrics(rings, r.terrace);

  RadialGrid vg = cfg.grid;
  vg.N = 2;
  vg.R_max = std::ceil((std::ceil(std::sqrt(2.0) * g.L) + 10.0) / vg.dr) * vg.dr;
  const TerraceSeed seed = build_terrace_initial(f, cfg.epsilon, 2, vg);
  const RadialTrajectory V = simulate(f, seed.u0, vg, {2.0 * cfg.T2d, cfg.stride}, InitialKind::TerraceSeed, seed.R0);
  const SupersubConstants k2 = compute_constants(f, r.terrace, V);
  SandwichOptions sopt;
  sopt.search_bound = cfg.T2d;
  const SandwichReport s2 = sandwich_check(u2, V, k2, sopt);
  const double thickness = m.thickness.back();
  const double bound = s2.found ? (s2.T + s2.T0) * m.c + 10.0 * g.h() : 0.0;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  os << "2-D " << g.n << "^2: sandwich "
     << (s2.found ? "T=" + std::to_string(s2.T) + " T0=" + std::to_string(s2.T0) : s2.message)
     << ", thickness " << thickness << " <= " << bound << ", direction speeds [" << m.speed_min << ", "
     << m.speed_max << "] vs c=" << m.c << " (max err " << 100.0 * m.max_rel_speed_error << "%), t=" << secs << "s";
  const bool ok = sr.found && s2.found && thickness <= bound && m.max_rel_speed_error <= 0.05 && secs < 600.0;
  return {ok, os.str()};
}

Outcome criterion9() {
  const RunConfig cfg = load_config(config_path("cubic.toml"));
  const Nonlinearity f = make_f(cfg);
  RadialGrid g = cfg.grid;
  g.R_max = 30.0;
  g.dr = 0.2;
  const std::size_t n = g.nodes();
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int pair = 0; pair < 100; ++pair) {
    // Random piecewise-constant lower datum; the upper one adds a random nonnegative
    // perturbation, capped at p. Odd pairs use independent node-wise noise.
    std::vector<double> u(n), v(n);
    const int pieces = 1 + static_cast<int>(unit(rng) * 8.0);
    std::vector<double> levels(static_cast<std::size_t>(pieces));
    for (double& l : levels) l = unit(rng);
    for (std::size_t j = 0; j < n; ++j) {
      const double base = pair % 2 == 0 ? levels[j * static_cast<std::size_t>(pieces) / n] : unit(rng);
      u[j] = base;
      v[j] = std::min(1.0, base + (unit(rng) < 0.5 ? 0.0 : 0.3 * unit(rng)));
    }
    const RadialTrajectory tu = simulate(f, u, g, {50.0, 1.0});
    const RadialTrajectory tv = simulate(f, v, g, {50.0, 1.0});
    for (std::size_t s = 0; s < tu.times.size(); ++s)
      for (std::size_t j = 0; j < n; ++j) worst = std::min(worst, tv.snapshots[s][j] - tu.snapshots[s][j]);
  }
  std::ostringstream os;
  os << "100 ordered pairs, min slack v - u = " << worst;
  return {worst >= -1e-9, os.str()};
}

Outcome criterion10() {
  const RunConfig cfg = load_config(config_path("cubic.toml"));
  const Nonlinearity f = make_f(cfg);
  auto run = [&](double dr) {
    RadialGrid g;
    g.N = 2;
    g.R_max = 60.0;
    g.dr = dr;
    std::vector<double> u0(g.nodes());
    for (std::size_t j = 0; j < u0.size(); ++j) u0[j] = 0.9 * std::exp(-std::pow(g.r(j) / 15.0, 4.0));
    return simulate(f, u0, g, {50.0, 50.0}).snapshots.back();
  };
  const auto a = run(0.2), b = run(0.1), c = run(0.05);
  double e1 = 0.0, e2 = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    e1 = std::max(e1, std::abs(a[j] - b[2 * j]));
    e2 = std::max(e2, std::abs(b[2 * j] - c[4 * j]));
  }
  const double ratio = e1 / e2;
  std::ostringstream os;
  os << "|u_0.2 - u_0.1|=" << e1 << " |u_0.1 - u_0.05|=" << e2 << " ratio=" << ratio;
  return {ratio >= 3.0 && ratio <= 5.0, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria{
      {1, {"front speed and profile, cubic", criterion1}},
      {2, {"terrace validity and speed order", criterion2}},
      {3, {"radial spreading speed", criterion3}},
      {4, {"monotonicity invariants", criterion4}},
      {5, {"gap dichotomy vs floors", criterion5}},
      {6, {"convergence residual", criterion6}},
      {7, {"super/subsolution inequalities", criterion7}},
      {8, {"sandwich and shell thickness", criterion8}},
      {9, {"discrete comparison principle", criterion9}},
      {10, {"grid convergence", criterion10}},
  };
  std::set<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& [id, entry] : criteria) {
    if (!chosen.empty() && !chosen.count(id)) continue;
    Outcome o;
    try {
      o = entry.second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, entry.first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

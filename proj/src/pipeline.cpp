#include "terracelab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "terracelab/errors.hpp"
#include "terracelab/fit.hpp"
#include "terracelab/front.hpp"
#include "terracelab/levelset.hpp"
#include "terracelab/report_io.hpp"

namespace terracelab {

namespace fs = std::filesystem;
using io::json;

Stage stage_from_string(const std::string& name) {
  if (name == "analyze") return Stage::Analyze;
  if (name == "terrace") return Stage::Terrace;
  if (name == "simulate") return Stage::Simulate;
  if (name == "levels") return Stage::Levels;
  if (name == "fit") return Stage::Fit;
  if (name == "supersub") return Stage::Supersub;
  if (name == "planar2d") return Stage::Planar2d;
  throw ConfigError("unknown experiment '" + name + "'");
}

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Analyze: return "analyze";
    case Stage::Terrace: return "terrace";
    case Stage::Simulate: return "simulate";
    case Stage::Levels: return "levels";
    case Stage::Fit: return "fit";
    case Stage::Supersub: return "supersub";
    case Stage::Planar2d: return "planar2d";
  }
  return "?";
}

RunContext::RunContext(RunConfig cfg, fs::path out, int workers)
    : cfg_(std::move(cfg)), out_(std::move(out)), workers_(std::max(1, workers)) {}

const Nonlinearity& RunContext::f() {
  if (!f_) f_.emplace(cfg_.term, cfg_.search, cfg_.zero);
  return *f_;
}

const Terrace& RunContext::terrace() {
  if (!terrace_) {
    TerraceOptions o;
    o.front = cfg_.front;
    o.tol_speed = cfg_.tol_speed;
    o.workers = workers_;
    terrace_ = decompose(f(), o);
  }
  return *terrace_;
}

double RunContext::seed_epsilon() {
  return cfg_.epsilon > 0.0 ? cfg_.epsilon : 1e-2 * f().require_landmarks().p;
}

RadialTrajectory RunContext::run_radial(const RadialGrid& grid, double T_final, bool seed) {
  SimulateOptions so;
  so.T_final = T_final;
  so.snapshot_interval = cfg_.stride;
  if (seed) {
    const TerraceSeed ts = build_terrace_initial(f(), seed_epsilon(), grid.N, grid);
    return simulate(f(), ts.u0, grid, so, InitialKind::TerraceSeed, ts.R0);
  }
  const auto u0 = build_bump_initial(f(), cfg_.theta, cfg_.bump_R, grid);
  return simulate(f(), u0, grid, so, InitialKind::Bump, cfg_.bump_R);
}

const RadialTrajectory& RunContext::trajectory() {
  if (!traj_) {
    if (cfg_.initial_kind == "terrace-seed") traj_ = seed_trajectory();
    else traj_ = run_radial(cfg_.grid, cfg_.T_final, false);
  }
  return *traj_;
}

const RadialTrajectory& RunContext::seed_trajectory() {
  if (!seed_) seed_ = run_radial(cfg_.grid, cfg_.T_final, true);
  return *seed_;
}

void RunContext::validate() {
  const Landmarks& lm = f().require_landmarks();
  for (double c : cfg_.levels)
    if (!(c > 0.0 && c < lm.p)) throw ConfigError("levels.values entries must lie in (0, p)");
  if (!(cfg_.level2d > 0.0 && cfg_.level2d < lm.p)) throw ConfigError("planar2d.level must lie in (0, p)");
  if (cfg_.initial_kind == "bump" && !(cfg_.theta > 0.0 && cfg_.theta <= lm.p))
    throw ConfigError("initial.theta must lie in (0, p]");
}

namespace {

json zeros_json(const std::vector<Zero>& zs) {
  json a = json::array();
  for (const auto& z : zs)
    a.push_back({{"u", z.location},
                 {"f_prime", z.derivative},
                 {"stability", z.stability == Stability::Stable ? "stable" : "unstable"}});
  return a;
}

void analyze_stage(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const AssumptionReport rep = check_assumptions(cfg.term, cfg.search, cfg.zero);
  json j;
  j["f"] = cfg.term.canonical();
  j["f_hash"] = io::fnv1a64_hex(cfg.term.canonical());
  j["f1_nondegenerate"] = rep.f1;
  j["f2_zero_stable"] = rep.f2;
  j["f3_top_state_energy"] = rep.f3;
  j["all_pass"] = rep.all_pass();
  j["min_abs_zero_derivative"] = rep.min_abs_zero_derivative;
  j["tol_nondegen"] = rep.tol_nondegen;
  j["zeros"] = zeros_json(rep.zeros);
  if (rep.landmarks) {
    const Landmarks& lm = *rep.landmarks;
    j["landmarks"] = {{"p", lm.p},
                      {"delta1", lm.delta1},
                      {"delta2", std::isfinite(lm.delta2) ? json(lm.delta2) : json("inf")},
                      {"b_star", lm.b_star},
                      {"b_star_upper", lm.b_star_upper}};
  } else {
    j["landmarks"] = nullptr;
  }
  if (rep.gamma) j["energy"] = {{"holds", rep.gamma->holds}, {"margin", rep.gamma->margin}};
  j["messages"] = rep.messages;
  io::write_json(ctx.out_dir() / "analyze.json", j);
  if (!rep.all_pass()) {
    std::string msg = "assumption check failed";
    for (const auto& m : rep.messages) msg += "; " + m;
    throw PreconditionError(msg);
  }
}

void terrace_stage(RunContext& ctx) {
  const Nonlinearity& f = ctx.f();
  const Terrace& t = ctx.terrace();
  json j;
  j["floors"] = t.floors;
  j["speeds"] = t.speeds;
  json waves = json::array();
  for (std::size_t k = 0; k < t.waves.size(); ++k) {
    const WaveProfile& w = t.waves[k];
    const double res = profile_residual(w, f);
    const std::string name = "wave_" + std::to_string(k) + ".csv";
    io::write_profile_csv(ctx.out_dir() / name, w, res);
    waves.push_back({{"q_top", w.q_top}, {"q_bot", w.q_bot}, {"c", w.c}, {"residual", res}, {"profile", name}});
  }
  j["waves"] = waves;
  json pairs = json::array();
  for (const PairEntry& e : t.pair_table)
    pairs.push_back({{"q_top", e.q_top},
                     {"q_bot", e.q_bot},
                     {"energy_holds", e.energy_holds},
                     {"energy_margin", e.energy_margin},
                     {"has_front", e.has_front},
                     {"c", e.has_front ? json(e.c) : json(nullptr)},
                     {"connection", e.has_front ? json(e.connection) : json(nullptr)}});
  j["pair_table"] = pairs;

  // Speed ordering for every triple of stable zeros whose three fronts all exist.
  auto lookup = [&](double top, double bot) -> const PairEntry* {
    for (const PairEntry& e : t.pair_table)
      if (e.q_top == top && e.q_bot == bot && e.has_front) return &e;
    return nullptr;
  };
  const auto stable = f.zeros_in(0.0, f.require_landmarks().p, Stability::Stable);
  json orders = json::array();
  bool all_ok = true;
  for (std::size_t a = 0; a < stable.size(); ++a)
    for (std::size_t b = a + 1; b < stable.size(); ++b)
      for (std::size_t m = a + 1; m < b; ++m) {
        const double bot = stable[a], mid = stable[m], top = stable[b];
        const PairEntry* d = lookup(top, bot);
        const PairEntry* up = lookup(top, mid);
        const PairEntry* lo = lookup(mid, bot);
        if (!d || !up || !lo) continue;
        const bool pass = up->c > d->c && d->c > lo->c;
        all_ok = all_ok && pass;
        orders.push_back({{"q_top", top}, {"q_mid", mid}, {"q_bot", bot}, {"c", d->c}, {"c_top", up->c},
                          {"c_bot", lo->c}, {"pass", pass}});
      }
  j["speed_order_checks"] = orders;
  j["speed_order_pass"] = all_ok;
  io::write_json(ctx.out_dir() / "terrace.json", j);
}

json mono_json(const MonotonicityReport& m) {
  return {{"pass", m.pass},
          {"tol", m.tol},
          {"checked_ut", m.checked_ut},
          {"worst_ut", m.worst_ut},
          {"worst_ut_r", m.worst_ut_r},
          {"worst_ut_t", m.worst_ut_t},
          {"worst_ur", m.worst_ur},
          {"worst_ur_r", m.worst_ur_r},
          {"worst_ur_t", m.worst_ur_t}};
}

void simulate_stage(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const RadialTrajectory& tr = ctx.trajectory();
  io::write_trajectory(ctx.out_dir(), "trajectory", tr, cfg.term, cfg.format);
  json j;
  j["grid"] = io::grid_json(tr.grid);
  j["dt_used"] = tr.dt;
  j["T_final"] = cfg.T_final;
  j["stride"] = cfg.stride;
  j["initial"] = cfg.initial_kind;
  j["R0"] = tr.R0;
  if (tr.initial_kind == InitialKind::TerraceSeed) {
    j["epsilon"] = ctx.seed_epsilon();
    j["R0_continuous"] = radial_ode_zero(ctx.f(), ctx.seed_epsilon(), tr.grid.N, tr.grid.R_max);
  }
  j["monotonicity"] = mono_json(monotonicity_report(tr));
  j["warnings"] = tr.warnings;
  j["isa"] = tr.isa;
  io::write_json(ctx.out_dir() / "simulate.json", j);
}

// One level per wave: its anchor (an unstable zero, never a plateau value).
std::vector<double> default_levels(const Nonlinearity& f, const Terrace& t) {
  std::vector<double> lv;
  for (const auto& w : t.waves) lv.push_back(anchor_level(f, w));
  return lv;
}

std::optional<std::size_t> wave_for_level(const Terrace& t, double c) {
  for (std::size_t k = 0; k < t.waves.size(); ++k)
    if (c > t.waves[k].q_bot && c < t.waves[k].q_top) return k;
  return std::nullopt;
}

void levels_stage(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const Nonlinearity& f = ctx.f();
  const Terrace& t = ctx.terrace();
  const RadialTrajectory& tr = ctx.trajectory();
  const auto levels = cfg.levels.empty() ? default_levels(f, t) : cfg.levels;

  json lj = json::array();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const LevelTrack track = track_level(tr, f, levels[i], cfg.track);
    const std::string name = "track_" + std::to_string(i) + ".csv";
    io::write_csv(ctx.out_dir() / name, {"t", "xi", "xi_prime"}, {track.times, track.xi, track.xi_prime()});
    const SpeedEstimate se = estimate_speed(track, cfg.tail_fraction);
    json e = {{"level", levels[i]}, {"track", name},         {"valid_from", track.valid_from},
              {"c_hat", se.c_hat},   {"ci", se.ci},          {"min_xi_prime", se.min_xi_prime},
              {"samples", se.samples}, {"stalled", se.stalled}, {"warning", se.warning}};
    if (const auto k = wave_for_level(t, levels[i])) {
      e["wave"] = *k;
      e["c_front"] = t.speeds[*k];
      e["rel_error"] = (se.c_hat - t.speeds[*k]) / t.speeds[*k];
    }
    lj.push_back(e);
  }
  io::write_json(ctx.out_dir() / "levels.json", {{"levels", lj}});

  // Gap dichotomy for every pair of unstable zeros in (0, p), checked against the floor set.
  const auto unstable = f.zeros_in(0.0, f.require_landmarks().p, Stability::Unstable);
  DichotomyOptions dopt;
  dopt.slope_min = cfg.slope_min > 0.0 ? cfg.slope_min : dichotomy_slope_min(t.speeds);
  dopt.bound = cfg.gap_bound;
  dopt.tail_fraction = cfg.tail_fraction;
  json dj = json::array();
  bool agree_all = true;
  std::size_t idx = 0;
  for (std::size_t a = 0; a < unstable.size(); ++a)
    for (std::size_t b = a + 1; b < unstable.size(); ++b, ++idx) {
      const DichotomyReport r = gap_dichotomy(tr, f, unstable[a], unstable[b], dopt);
      bool floor_between = false;
      for (double q : t.floors)
        if (q > unstable[a] && q < unstable[b]) floor_between = true;
      const GapClass expected = floor_between ? GapClass::Diverging : GapClass::Bounded;
      const bool agree = r.classification == expected;
      agree_all = agree_all && agree;
      const std::string name = "gap_" + std::to_string(idx) + ".csv";
      io::write_csv(ctx.out_dir() / name, {"t", "rho"}, {r.times, r.gap});
      dj.push_back({{"b_lower", r.b_lower},
                    {"b_upper", r.b_upper},
                    {"classification", to_string(r.classification)},
                    {"expected_from_floors", to_string(expected)},
                    {"agree", agree},
                    {"slope", r.slope},
                    {"slope_min", r.slope_min},
                    {"bound", r.bound},
                    {"max_tail_gap", r.max_tail_gap},
                    {"final_gap", r.final_gap},
                    {"series", name},
                    {"suggestion", r.suggestion}});
    }
  io::write_json(ctx.out_dir() / "dichotomy.json", {{"pairs", dj}, {"all_agree", agree_all}});
}

void fit_stage(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const Terrace& t = ctx.terrace();
  const RadialTrajectory& tr = ctx.trajectory();
  const auto shifts = fit_shifts(tr, ctx.f(), t, cfg.track);
  const ResidualSeries res = convergence_residual(tr, t, shifts);

  std::vector<std::string> header{"t"};
  std::vector<std::vector<double>> cols{res.times};
  for (const auto& s : shifts) header.push_back("eta_" + std::to_string(s.k));
  for (const auto& s : shifts) header.push_back("eta_prime_" + std::to_string(s.k));
  std::vector<std::vector<double>> eta(shifts.size()), etap(shifts.size());
  for (std::size_t k = 0; k < shifts.size(); ++k)
    for (double time : res.times) {
      const auto it = std::find(shifts[k].times.begin(), shifts[k].times.end(), time);
      if (it == shifts[k].times.end()) throw PreconditionError("shift series misses a residual time");
      const auto i = static_cast<std::size_t>(it - shifts[k].times.begin());
      eta[k].push_back(shifts[k].eta[i]);
      etap[k].push_back(shifts[k].eta_prime[i]);
    }
  for (auto& c : eta) cols.push_back(c);
  for (auto& c : etap) cols.push_back(c);
  header.push_back("rho");
  cols.push_back(res.rho);
  io::write_csv(ctx.out_dir() / "fit.csv", header, cols);

  json sj = json::array();
  for (std::size_t k = 0; k < shifts.size(); ++k) {
    const auto& e = etap[k];
    const std::size_t from = e.size() - static_cast<std::size_t>(std::ceil(cfg.tail_fraction * e.size()));
    double tail = 0.0;
    for (std::size_t i = from; i < e.size(); ++i) tail = std::max(tail, std::abs(e[i]));
    sj.push_back({{"wave", shifts[k].k},
                  {"anchor_level", shifts[k].anchor_level},
                  {"r0", shifts[k].r0},
                  {"eta_final", eta[k].empty() ? 0.0 : eta[k].back()},
                  {"eta_prime_tail_sup", tail}});
  }
  json j;
  j["shifts"] = sj;
  j["rho_final"] = res.rho.empty() ? 0.0 : res.rho.back();
  j["excluded_band"] = res.excluded_band;
  j["table"] = "fit.csv";
  io::write_json(ctx.out_dir() / "fit.json", j);
}

json constants_json(const SupersubConstants& k) {
  return {{"form", k.form == SupersubConstants::Form::Wave ? "wave" : "radial"},
          {"beta0", k.beta0},
          {"sigma0", k.sigma0},
          {"eta0", k.eta0},
          {"interface", k.interface},
          {"M0", k.M0},
          {"epsilon_nbhd", k.epsilon_nbhd},
          {"t_min", k.t_min}};
}

json violation_json(const ViolationReport& v) {
  return {{"pass", v.pass},       {"tol", v.tol},         {"points", v.points},
          {"min_super", v.min_super}, {"super_r", v.super_r}, {"super_t", v.super_t},
          {"min_sub", v.min_sub},     {"sub_r", v.sub_r},     {"sub_t", v.sub_t}};
}

json sandwich_json(const SandwichReport& s) {
  return {{"found", s.found},
          {"T", s.T},
          {"T0", s.T0},
          {"worst_lower", s.worst_lower},
          {"lower_r", s.lower_r},
          {"lower_t", s.lower_t},
          {"worst_upper", s.worst_upper},
          {"upper_r", s.upper_r},
          {"upper_t", s.upper_t},
          {"message", s.message}};
}

constexpr double kSigmaInflation = 100.0;

void supersub_stage(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const Nonlinearity& f = ctx.f();
  const Terrace& t = ctx.terrace();
  json j;

  const SupersubConstants kw = compute_constants(f, t, cfg.constants);
  j["wave_constants"] = constants_json(kw);
  json wv = json::array();
  for (const auto& w : t.waves) {
    WaveCheckOptions o = cfg.wave_check;
    const ViolationReport base = verify_wave_supersub(f, w, kw, o);
    o.sigma = kSigmaInflation * kw.sigma0;
    const ViolationReport inflated = verify_wave_supersub(f, w, kw, o);
    wv.push_back({{"c", w.c}, {"check", violation_json(base)}, {"inflated_sigma", violation_json(inflated)},
                  {"inflation_detected", !inflated.pass}});
  }
  j["wave_checks"] = wv;

  const RadialTrajectory& V = ctx.seed_trajectory();
  const SupersubConstants kr = compute_constants(f, t, V, cfg.constants);
  j["radial_constants"] = constants_json(kr);
  RadialCheckOptions ro = cfg.radial_check;
  const ViolationReport rbase = verify_radial_supersub(f, V, kr, ro);
  ro.sigma = kSigmaInflation * kr.sigma0;
  const ViolationReport rinfl = verify_radial_supersub(f, V, kr, ro);
  j["radial_check"] = violation_json(rbase);
  j["radial_inflated_sigma"] = violation_json(rinfl);
  j["radial_inflation_detected"] = !rinfl.pass;

  // Sandwich of a spreading plateau bump between time shifts of V. The bump runs
  // for half of V's horizon so that forward shifts T0 up to T_final/2 are available.
  SpreadingOptions so;
  so.T_classify = cfg.T_classify;
  so.min_speed = *std::min_element(t.speeds.begin(), t.speeds.end());
  so.workers = ctx.workers();
  const double R_theta = estimate_spreading_radius(f, cfg.sandwich_theta, cfg.grid.N, cfg.grid, so);
  const double R_bump = R_theta + cfg.sandwich_R_offset;
  SimulateOptions sim;
  sim.T_final = 0.5 * cfg.T_final;
  sim.snapshot_interval = cfg.stride;
  const auto u0 = build_bump_initial(f, cfg.sandwich_theta, R_bump, cfg.grid);
  const RadialTrajectory u = simulate(f, u0, cfg.grid, sim, InitialKind::Bump, R_bump);
  const SandwichReport sw = sandwich_check(u, V, kr, cfg.sandwich);
  j["sandwich"] = sandwich_json(sw);
  j["sandwich"]["theta"] = cfg.sandwich_theta;
  j["sandwich"]["R_theta"] = R_theta;
  j["sandwich"]["R_bump"] = R_bump;
  io::write_json(ctx.out_dir() / "supersub.json", j);
}

void planar2d_stage(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const Nonlinearity& f = ctx.f();
  const Terrace& t = ctx.terrace();
  const Grid2D& g = cfg.grid2d;

  SimulateOptions so;
  so.T_final = cfg.T2d;
  so.snapshot_interval = cfg.stride2d;
  const auto u0 = elliptical_initial(f, cfg.theta2d, cfg.ellipse_a, cfg.ellipse_b, cfg.ellipse_angle, g);
  const Trajectory2D u = simulate2d(f, u0, g, so, ctx.workers());

  RingOptions ro = cfg.ring;
  ro.workers = ctx.workers();
  std::vector<RingExtract> rings;
  for (std::size_t s = 0; s < u.times.size(); ++s)
    if (u.times[s] >= cfg.ring_from - 1e-9) rings.push_back(extract_ring(u, s, cfg.level2d, ro));
  const MetricsReport m = ring_metrics(rings, t);

  std::vector<double> ct, ca, cx;
  for (const auto& r : rings)
    for (std::size_t k = 0; k < r.angles.size(); ++k) {
      ct.push_back(r.t);
      ca.push_back(r.angles[k]);
      cx.push_back(r.xi[k]);
    }
  io::write_csv(ctx.out_dir() / "rings.csv", {"t", "angle", "xi"}, {ct, ca, cx});
  io::write_text(ctx.out_dir() / "rings.svg", ring_svg(rings, g.L));

  // Radial comparison function on a grid covering the box diagonal, run twice as
  // long as the 2-D solution so forward shifts up to T2d are available.
  RadialGrid vg = cfg.grid;
  vg.N = 2;
  vg.R_max = cfg.V_R_max > 0.0 ? cfg.V_R_max : std::ceil(std::sqrt(2.0) * g.L) + 10.0;
  vg.R_max = std::ceil(vg.R_max / vg.dr) * vg.dr;
  SimulateOptions vo;
  vo.T_final = 2.0 * cfg.T2d;
  vo.snapshot_interval = cfg.stride;
  const TerraceSeed ts = build_terrace_initial(f, ctx.seed_epsilon(), 2, vg);
  const RadialTrajectory V = simulate(f, ts.u0, vg, vo, InitialKind::TerraceSeed, ts.R0);
  const SupersubConstants kr = compute_constants(f, t, V, cfg.constants);
  SandwichOptions sopt = cfg.sandwich;
  if (!(sopt.search_bound > 0.0)) sopt.search_bound = cfg.T2d;
  const SandwichReport sw = sandwich_check(u, V, kr, sopt);

  json j;
  j["grid"] = {{"n", g.n}, {"L", g.L}, {"h", g.h()}, {"dt_used", u.dt}};
  j["isa"] = u.isa;
  j["level"] = cfg.level2d;
  j["c"] = m.c;
  j["direction_speeds"] = m.direction_speeds;
  j["speed_min"] = m.speed_min;
  j["speed_max"] = m.speed_max;
  j["max_rel_speed_error"] = m.max_rel_speed_error;
  j["speed_spread"] = m.speed_spread;
  j["ring_times"] = m.times;
  j["thickness"] = m.thickness;
  j["thickness_slope"] = m.thickness_slope;
  j["thickness_bounded"] = m.thickness_bounded;
  j["alpha"] = m.alpha;
  j["slice_distance"] = m.slice_distance;
  j["radial_constants"] = constants_json(kr);
  j["sandwich"] = sandwich_json(sw);
  if (sw.found && !m.thickness.empty()) {
    const double bound = (sw.T + sw.T0) * m.c + 10.0 * g.h();
    j["thickness_bound"] = bound;
    j["thickness_within_bound"] = m.thickness.back() <= bound;
  }
  j["rings"] = "rings.csv";
  j["svg"] = "rings.svg";
  io::write_json(ctx.out_dir() / "planar2d.json", j);
}

}  // namespace

void run_stage(Stage s, RunContext& ctx) {
  fs::create_directories(ctx.out_dir());
  switch (s) {
    case Stage::Analyze: return analyze_stage(ctx);
    case Stage::Terrace: return terrace_stage(ctx);
    case Stage::Simulate: return simulate_stage(ctx);
    case Stage::Levels: return levels_stage(ctx);
    case Stage::Fit: return fit_stage(ctx);
    case Stage::Supersub: return supersub_stage(ctx);
    case Stage::Planar2d: return planar2d_stage(ctx);
  }
}

void run_pipeline(RunContext& ctx) {
  for (Stage s : {Stage::Analyze, Stage::Terrace, Stage::Simulate, Stage::Levels, Stage::Fit, Stage::Supersub,
                  Stage::Planar2d})
    run_stage(s, ctx);
}

}  // namespace terracelab

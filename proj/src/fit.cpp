#include "terracelab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "terracelab/errors.hpp"

namespace terracelab {

double anchor_level(const Nonlinearity& f, const WaveProfile& w) {
  const double mid = 0.5 * (w.q_top + w.q_bot);
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double b : f.zeros_in(w.q_bot, w.q_top, Stability::Unstable))
    if (b > w.q_bot && b < w.q_top && (std::isnan(best) || std::abs(b - mid) < std::abs(best - mid))) best = b;
  if (std::isnan(best)) throw PreconditionError("wave range contains no unstable zero to anchor on");
  return best;
}

std::vector<ShiftSeries> fit_shifts(const RadialTrajectory& traj, const Nonlinearity& f, const Terrace& terrace,
                                    const TrackOptions& opts) {
  std::vector<ShiftSeries> out;
  for (std::size_t k = 0; k < terrace.waves.size(); ++k) {
    const WaveProfile& w = terrace.waves[k];
    ShiftSeries s;
    s.k = k;
    s.anchor_level = anchor_level(f, w);
    s.r0 = w.coordinate_of(s.anchor_level);
    const LevelTrack tr = track_level(traj, f, s.anchor_level, opts);
    s.times = tr.times;
    s.eta.resize(tr.xi.size());
    for (std::size_t i = 0; i < tr.xi.size(); ++i) s.eta[i] = tr.xi[i] - s.r0 - w.c * tr.times[i];
    LevelTrack tmp;
    tmp.times = s.times;
    tmp.xi = s.eta;
    s.eta_prime = tmp.xi_prime();
    out.push_back(std::move(s));
  }
  return out;
}

double terrace_superposition(const Terrace& terrace, const std::vector<double>& z) {
  double v = 0.0;
  for (std::size_t k = 0; k < terrace.waves.size(); ++k) v += terrace.waves[k].value(z[k]) - terrace.floors[k + 1];
  return v;
}

ResidualSeries convergence_residual(const RadialTrajectory& traj, const Terrace& terrace,
                                    const std::vector<ShiftSeries>& shifts, double excluded_band) {
  if (shifts.size() != terrace.waves.size()) throw PreconditionError("one shift series per wave is required");
  ResidualSeries res;
  res.excluded_band = excluded_band;
  const RadialGrid& g = traj.grid;
  const double r_cut = g.R_max - excluded_band;
  std::vector<double> z(shifts.size());
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    const double t = traj.times[s];
    std::vector<double> eta(shifts.size());
    bool all = true;
    for (std::size_t k = 0; k < shifts.size() && all; ++k) {
      const auto& sh = shifts[k];
      const auto it = std::find_if(sh.times.begin(), sh.times.end(), [&](double x) { return std::abs(x - t) < 1e-9; });
      if (it == sh.times.end()) all = false;
      else eta[k] = sh.eta[static_cast<std::size_t>(it - sh.times.begin())];
    }
    if (!all) continue;
    const auto& u = traj.snapshots[s];
    double worst = 0.0;
    for (std::size_t j = 0; j < u.size() && g.r(j) <= r_cut; ++j) {
      for (std::size_t k = 0; k < shifts.size(); ++k) z[k] = g.r(j) - terrace.waves[k].c * t - eta[k];
      worst = std::max(worst, std::abs(u[j] - terrace_superposition(terrace, z)));
    }
    res.times.push_back(t);
    res.rho.push_back(worst);
  }
  return res;
}

}  // namespace terracelab

#include "terracelab/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "terracelab/errors.hpp"

namespace terracelab {

std::vector<double> LevelTrack::xi_prime() const {
  const std::size_t n = xi.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d[0] = (xi[1] - xi[0]) / (times[1] - times[0]);
  d[n - 1] = (xi[n - 1] - xi[n - 2]) / (times[n - 1] - times[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (xi[i + 1] - xi[i - 1]) / (times[i + 1] - times[i - 1]);
  return d;
}

LevelTrack track_level(const RadialTrajectory& traj, const Nonlinearity& f, double c, const TrackOptions& opts) {
  const Landmarks& lm = f.require_landmarks();
  if (!(c > 0.0 && c < lm.p)) throw PreconditionError("tracked level must lie in (0, p)");
  const double guard = std::max(opts.min_floor_distance, 1e-9);
  for (double q : f.zeros_in(0.0, lm.p, Stability::Stable))
    if (std::abs(c - q) < guard) throw PreconditionError("tracked level is (too close to) a stable zero");

  LevelTrack tr;
  tr.level = c;
  bool valid = false;
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    const auto& u = traj.snapshots[s];
    int count = 0;
    double xi = 0.0;
    bool first_is_down = false;
    for (std::size_t j = 0; j + 1 < u.size(); ++j) {
      const bool down = u[j] >= c && u[j + 1] < c;
      const bool up = u[j] < c && u[j + 1] >= c;
      if (!down && !up) continue;
      if (count == 0) {
        first_is_down = down;
        xi = traj.grid.r(j) + (u[j] - c) / (u[j] - u[j + 1]) * traj.grid.dr;
      }
      ++count;
    }
    const bool unique = count == 1 && first_is_down;
    if (!valid && unique) {
      valid = true;
      tr.valid_from = traj.times[s];
    }
    if (!valid) continue;
    if (!unique) {
      std::ostringstream os;
      os << "level " << c << " has " << count << " crossings at t=" << traj.times[s] << " after becoming unique at t="
         << tr.valid_from;
      throw MonotonicityViolation(os.str());
    }
    tr.times.push_back(traj.times[s]);
    tr.xi.push_back(xi);
  }
  if (!valid) tr.valid_from = traj.times.empty() ? 0.0 : traj.times.back() + 1.0;
  return tr;
}

std::pair<double, double> fit_slope(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  if (n < 3) throw PreconditionError("slope fit needs at least 3 samples");
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (t[i] - mt) * (t[i] - mt);
    sxy += (t[i] - mt) * (y[i] - my);
  }
  const double b = sxy / sxx;
  const double a = my - b * mt;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) sse += (y[i] - a - b * t[i]) * (y[i] - a - b * t[i]);
  const double se = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  return {b, se};
}

SpeedEstimate estimate_speed(const LevelTrack& track, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw DomainError("tail_fraction must lie in (0, 1]");
  const std::size_t n = track.xi.size();
  const auto tail = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
  if (tail < 20) throw PreconditionError("speed estimate needs >= 20 samples in the tail window");
  const std::size_t start = n - tail;
  std::vector<double> t(track.times.begin() + static_cast<long>(start), track.times.end());
  std::vector<double> x(track.xi.begin() + static_cast<long>(start), track.xi.end());
  SpeedEstimate est;
  std::tie(est.c_hat, est.ci) = fit_slope(t, x);
  est.samples = tail;
  const auto d = track.xi_prime();
  est.min_xi_prime = *std::min_element(d.begin() + static_cast<long>(start), d.end());
  if (!(est.min_xi_prime > 0.0)) {
    est.stalled = true;
    est.warning = "nonpositive xi' in the tail window: stalled front";
  }
  return est;
}

double dichotomy_slope_min(const std::vector<double>& speeds, double fallback) {
  double gap = 0.0;
  for (std::size_t k = 0; k + 1 < speeds.size(); ++k) {
    const double d = speeds[k + 1] - speeds[k];
    if (d > 0.0 && (gap == 0.0 || d < gap)) gap = d;
  }
  return gap > 0.0 ? 0.2 * gap : fallback;
}

DichotomyReport gap_dichotomy(const RadialTrajectory& traj, const Nonlinearity& f, double b_lower, double b_upper,
                              const DichotomyOptions& opts) {
  auto is_unstable = [&](double b) {
    for (const Zero& z : f.zeros())
      if (z.stability == Stability::Unstable && std::abs(z.location - b) <= 1e-9) return true;
    return false;
  };
  if (!is_unstable(b_lower) || !is_unstable(b_upper)) throw PreconditionError("gap levels must be unstable zeros of f");
  DichotomyReport rep;
  rep.b_lower = b_lower;
  rep.b_upper = b_upper;
  rep.slope_min = opts.slope_min;
  rep.bound = opts.bound > 0.0 ? opts.bound : 50.0 * traj.grid.dr;

  const LevelTrack lo = track_level(traj, f, b_lower);
  const LevelTrack hi = track_level(traj, f, b_upper);
  // Align on common times (the lower level becomes valid first).
  for (std::size_t i = 0, j = 0; i < lo.times.size() && j < hi.times.size();) {
    if (lo.times[i] < hi.times[j] - 1e-12) ++i;
    else if (hi.times[j] < lo.times[i] - 1e-12) ++j;
    else {
      rep.times.push_back(lo.times[i]);
      rep.gap.push_back(lo.xi[i] - hi.xi[j]);
      ++i, ++j;
    }
  }
  const std::size_t n = rep.gap.size();
  const auto tail = static_cast<std::size_t>(std::ceil(opts.tail_fraction * static_cast<double>(n)));
  if (tail < 3) {
    rep.classification = GapClass::Inconclusive;
    rep.suggestion = "too few common valid snapshots; run longer";
    return rep;
  }
  const std::size_t start = n - tail;
  std::vector<double> t(rep.times.begin() + static_cast<long>(start), rep.times.end());
  std::vector<double> g(rep.gap.begin() + static_cast<long>(start), rep.gap.end());
  rep.slope = fit_slope(t, g).first;
  rep.final_gap = rep.gap.back();
  for (double v : g) rep.max_tail_gap = std::max(rep.max_tail_gap, std::abs(v));
  if (rep.slope >= rep.slope_min) {
    rep.classification = GapClass::Diverging;
  } else if (rep.max_tail_gap <= rep.bound) {
    rep.classification = GapClass::Bounded;
  } else {
    rep.classification = GapClass::Inconclusive;
    std::ostringstream os;
    os << "slope " << rep.slope << " below threshold but gap " << rep.max_tail_gap << " exceeds bound " << rep.bound
       << "; try a horizon of " << 2.0 * traj.times.back();
    rep.suggestion = os.str();
  }
  return rep;
}

std::string to_string(GapClass c) {
  switch (c) {
    case GapClass::Diverging: return "diverging";
    case GapClass::Bounded: return "bounded";
    default: return "inconclusive";
  }
}

}  // namespace terracelab

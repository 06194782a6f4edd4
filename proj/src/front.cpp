#include "terracelab/front.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "terracelab/errors.hpp"
#include "terracelab/ode.hpp"

namespace terracelab {

namespace {

using Vec2 = ode::State<2>;

double hermite(double y0, double y1, double d0, double d1, double h, double s) {
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * h * d1;
}

double hermite_slope(double y0, double y1, double d0, double d1, double h, double s) {
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * y0 + (-6 * s2 + 6 * s) * y1) / h + (3 * s2 - 4 * s + 1) * d0 +
         (3 * s2 - 2 * s) * d1;
}

// Locate the root of g along a Hermite step by bisection on the step parameter.
template <class G>
double root_in_step(const ode::Step<2>& st, G&& g) {
  double a = st.t0, b = st.t1;
  const double ga = g(st.y0);
  for (int it = 0; it < 80; ++it) {
    const double m = 0.5 * (a + b);
    const double gm = g(st.interpolate(m));
    if ((gm > 0) == (ga > 0)) a = m; else b = m;
  }
  return 0.5 * (a + b);
}

void check_pair(const Nonlinearity& f, double q_top, double q_bot) {
  if (!(q_top > q_bot)) throw DomainError("front needs q_top > q_bot");
  if (!f.is_stable_zero(q_top) || !f.is_stable_zero(q_bot))
    throw DomainError("front endpoints must be stable zeros of f");
}

struct Trajectory {
  ShootResult result;
  std::vector<ode::Step<2>> steps;
};

Trajectory run_shot(const Nonlinearity& f, double q_top, double q_bot, double c, const FrontOptions& opts,
                    bool keep_steps) {
  Trajectory tr;
  ShootResult& r = tr.result;
  r.c = c;
  const double range = q_top - q_bot;
  const double delta = opts.delta_launch_rel * range;
  const double bottom_tol = opts.bottom_tol_rel * range;
  const double fp_top = f.derivative(q_top);
  const double mu_plus = 0.5 * (-c + std::sqrt(c * c - 4.0 * fp_top));

  Vec2 y0{q_top - delta, -mu_plus * delta};
  r.v_grid.push_back(y0[0]);
  r.P_values.push_back(y0[1]);

  auto rhs = [&](double, const Vec2& y) { return Vec2{y[1], -c * y[1] - f.value(y[0])}; };
  ode::AdaptiveOptions ao;
  ao.rtol = opts.rtol;
  ao.atol = 1e-13 * range;
  ao.h_init = 1e-2;
  ao.h_max = 0.5;

  bool decided = false;
  auto observer = [&](const ode::Step<2>& st) {
    if (keep_steps) tr.steps.push_back(st);
    if (st.y1[1] >= 0.0) {
      const double zt = root_in_step(st, [](const Vec2& y) { return y[1]; });
      r.v_touch = st.interpolate(zt)[0];
      r.miss = r.v_touch - q_bot;
      r.outcome = r.miss <= bottom_tol ? ShootResult::Outcome::ReachedBottom : ShootResult::Outcome::TouchedZero;
      r.p_bottom = 0.0;
      decided = true;
      return false;
    }
    if (st.y1[0] <= q_bot) {
      const double zb = root_in_step(st, [&](const Vec2& y) { return y[0] - q_bot; });
      r.p_bottom = st.interpolate(zb)[1];
      r.miss = r.p_bottom;
      r.outcome = ShootResult::Outcome::ReachedBottom;
      r.v_grid.push_back(q_bot);
      r.P_values.push_back(r.p_bottom);
      decided = true;
      return false;
    }
    r.v_grid.push_back(st.y1[0]);
    r.P_values.push_back(st.y1[1]);
    // Trajectory parked at a rest state (a node for large c): stop early.
    if (std::abs(st.y1[1]) < 1e-12 * range && std::abs(f.value(st.y1[0])) < 1e-12 * range) return false;
    return true;
  };

  const auto res = ode::integrate<2>(rhs, 0.0, y0, opts.z_max, ao, observer);
  if (res.stop == ode::Stop::StepUnderflow) {
    std::ostringstream os;
    os << "step underflow at U=" << res.y[0] << ", P=" << res.y[1] << " (c=" << c << ")";
    throw SingularityError(os.str());
  }
  if (!decided) {
    const double u = res.y[0], p = res.y[1];
    if (std::abs(u - q_bot) <= bottom_tol && std::abs(p) <= bottom_tol) {
      r.outcome = ShootResult::Outcome::ReachedBottom;
      r.p_bottom = p;
      r.miss = p;
    } else if (std::abs(p) <= bottom_tol) {
      // Converged to an intermediate rest state without turning: too fast.
      r.outcome = ShootResult::Outcome::TouchedZero;
      r.v_touch = u;
      r.miss = u - q_bot;
    } else {
      r.outcome = ShootResult::Outcome::Diverged;
      r.miss = 0.0;
    }
  }
  return tr;
}

int miss_sign(const ShootResult& r) {
  if (r.outcome == ShootResult::Outcome::Diverged) return 0;
  return r.miss < 0.0 ? -1 : 1;
}

WaveProfile build_profile(const Nonlinearity& f, double q_top, double q_bot, double c,
                          const std::vector<ode::Step<2>>& steps, const FrontOptions& opts) {
  const double range = q_top - q_bot;
  const double delta = opts.delta_launch_rel * range;
  const double mu_plus = 0.5 * (-c + std::sqrt(c * c - 4.0 * f.derivative(q_top)));
  const double mu_minus = 0.5 * (-c - std::sqrt(c * c - 4.0 * f.derivative(q_bot)));

  // Keep the shadowing part of the trajectory, down to U - q_bot = delta.
  std::size_t n_keep = 0;
  while (n_keep < steps.size() && steps[n_keep].y1[0] - q_bot > delta && steps[n_keep].y1[1] < 0.0) ++n_keep;
  if (n_keep == steps.size() || n_keep == 0)
    throw SingularityError("front trajectory never entered the bottom neighbourhood");
  const ode::Step<2>& last = steps[n_keep];
  const double z_end = root_in_step(last, [&](const Vec2& y) { return y[0] - q_bot - delta; });
  const Vec2 y_end = last.interpolate(z_end);
  std::vector<ode::Step<2>> body(steps.begin(), steps.begin() + static_cast<long>(n_keep) + 1);

  auto eval_raw = [&](double z) -> Vec2 {
    if (z <= 0.0) {
      const double e = delta * std::exp(mu_plus * z);
      return {q_top - e, -mu_plus * e};
    }
    if (z >= z_end) {
      const double e = (y_end[0] - q_bot) * std::exp(mu_minus * (z - z_end));
      return {q_bot + e, mu_minus * e};
    }
    const auto it = std::upper_bound(body.begin(), body.end(), z,
                                     [](double v, const ode::Step<2>& s) { return v < s.t1; });
    const ode::Step<2>& st = (it == body.end()) ? body.back() : *it;
    return st.interpolate(std::clamp(z, st.t0, st.t1));
  };

  // Normalise: shift so that U(0) is the floor midpoint.
  const double mid = 0.5 * (q_top + q_bot);
  double za = 0.0, zb = z_end;
  if (!(eval_raw(za)[0] > mid && eval_raw(zb)[0] < mid))
    throw SingularityError("front trajectory does not cross the midpoint level");
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (za + zb);
    if (eval_raw(m)[0] > mid) za = m; else zb = m;
  }
  const double z_mid = 0.5 * (za + zb);

  const double z_lo = std::log(opts.tol_tail / delta) / mu_plus;                       // q_top - U = tol_tail
  const double z_hi = z_end + std::log(opts.tol_tail / (y_end[0] - q_bot)) / mu_minus;  // U - q_bot = tol_tail
  const double h = opts.sample_spacing;
  const long k_lo = static_cast<long>(std::floor((z_lo - z_mid) / h));
  const long k_hi = static_cast<long>(std::ceil((z_hi - z_mid) / h));

  WaveProfile w;
  w.c = c;
  w.q_top = q_top;
  w.q_bot = q_bot;
  w.z_samples.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
  for (long k = k_lo; k <= k_hi; ++k) {
    const double z = k * h;
    Vec2 y = eval_raw(z + z_mid);
    if (k == 0) y[0] = mid;
    w.z_samples.push_back(z);
    w.u_samples.push_back(y[0]);
    w.du_samples.push_back(y[1]);
  }
  return w;
}

}  // namespace

namespace {

// Exponential tail rate implied by the end sample: U - q ~ (u_end - q) e^{lambda (z - z_end)}.
double tail_rate(double u_end, double du_end, double q) {
  const double gap = u_end - q;
  return gap != 0.0 ? du_end / gap : 0.0;
}

}  // namespace

double WaveProfile::value(double z) const {
  if (z_samples.size() < 2) return q_bot;
  if (z <= z_samples.front()) {
    const double lam = tail_rate(u_samples.front(), du_samples.front(), q_top);
    return q_top + (u_samples.front() - q_top) * std::exp(lam * (z - z_samples.front()));
  }
  if (z >= z_samples.back()) {
    const double lam = tail_rate(u_samples.back(), du_samples.back(), q_bot);
    return q_bot + (u_samples.back() - q_bot) * std::exp(lam * (z - z_samples.back()));
  }
  const double h = z_samples[1] - z_samples[0];
  const auto i = std::min(static_cast<std::size_t>((z - z_samples.front()) / h), z_samples.size() - 2);
  const double s = (z - z_samples[i]) / h;
  return hermite(u_samples[i], u_samples[i + 1], du_samples[i], du_samples[i + 1], h, s);
}

double WaveProfile::slope(double z) const {
  if (z_samples.size() < 2) return 0.0;
  if (z <= z_samples.front()) {
    const double lam = tail_rate(u_samples.front(), du_samples.front(), q_top);
    return du_samples.front() * std::exp(lam * (z - z_samples.front()));
  }
  if (z >= z_samples.back()) {
    const double lam = tail_rate(u_samples.back(), du_samples.back(), q_bot);
    return du_samples.back() * std::exp(lam * (z - z_samples.back()));
  }
  const double h = z_samples[1] - z_samples[0];
  const auto i = std::min(static_cast<std::size_t>((z - z_samples.front()) / h), z_samples.size() - 2);
  const double s = (z - z_samples[i]) / h;
  return hermite_slope(u_samples[i], u_samples[i + 1], du_samples[i], du_samples[i + 1], h, s);
}

double WaveProfile::coordinate_of(double level) const {
  if (!(level < q_top && level > q_bot)) throw DomainError("level must lie strictly between the floors");
  if (level >= u_samples.front()) return z_samples.front();
  if (level <= u_samples.back()) return z_samples.back();
  // u_samples is decreasing.
  const auto it = std::lower_bound(u_samples.begin(), u_samples.end(), level, std::greater<double>());
  const std::size_t i = static_cast<std::size_t>(it - u_samples.begin());
  double a = z_samples[i - 1], b = z_samples[i];
  for (int k = 0; k < 100; ++k) {
    const double m = 0.5 * (a + b);
    if (value(m) > level) a = m; else b = m;
  }
  return 0.5 * (a + b);
}

double speed_cap(const Nonlinearity& f) {
  const double p = f.landmarks() ? f.landmarks()->p : f.search_interval().hi;
  return 2.0 * std::sqrt(f.max_abs_derivative(0.0, p)) + 1.0;
}

ShootResult shoot(const Nonlinearity& f, double q_top, double q_bot, double c, const FrontOptions& opts) {
  check_pair(f, q_top, q_bot);
  const double cap = speed_cap(f);
  if (!(c >= 0.0 && c <= cap)) {
    std::ostringstream os;
    os << "c=" << c << " outside [0, " << cap << "]";
    throw RangeError(os.str());
  }
  return run_shot(f, q_top, q_bot, c, opts, false).result;
}

std::optional<WaveProfile> find_front(const Nonlinearity& f, double q_top, double q_bot, const FrontOptions& opts,
                                      double* connection) {
  check_pair(f, q_top, q_bot);
  if (!energy_condition(f, q_bot, q_top).holds) return std::nullopt;

  const double cap = speed_cap(f);
  std::vector<std::pair<double, int>> trace;
  for (int i = 0; i <= opts.prescan; ++i) {
    const double c = cap * i / opts.prescan;
    trace.emplace_back(c, miss_sign(run_shot(f, q_top, q_bot, c, opts, false).result));
  }
  auto describe = [&] {
    std::ostringstream os;
    for (const auto& [c, s] : trace) os << " (" << c << "," << s << ")";
    return os.str();
  };
  int transitions = 0;
  std::size_t at = 0;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    if (trace[i].second == 0 || trace[i + 1].second == 0)
      throw AmbiguousConnectionError("diverged shot in speed scan:" + describe());
    if (trace[i].second != trace[i + 1].second) {
      ++transitions;
      at = i;
    }
  }
  if (transitions == 0) return std::nullopt;
  if (transitions > 1 || trace.front().second > 0)
    throw AmbiguousConnectionError("non-monotone shooting outcome in c:" + describe());

  double c_lo = trace[at].first, c_hi = trace[at + 1].first;
  while (c_hi - c_lo > opts.bracket_tol) {
    const double c = 0.5 * (c_lo + c_hi);
    const int s = miss_sign(run_shot(f, q_top, q_bot, c, opts, false).result);
    if (s == 0) throw AmbiguousConnectionError("diverged shot during bisection at c=" + std::to_string(c));
    (s < 0 ? c_lo : c_hi) = c;
  }

  // Which rest state does the limiting trajectory reach?
  const ShootResult upper = run_shot(f, q_top, q_bot, c_hi, opts, false).result;
  const double v_end = upper.outcome == ShootResult::Outcome::TouchedZero ? upper.v_touch : q_bot;
  double nearest = q_bot;
  for (double z : f.all_zero_locations_in(q_bot, q_top))
    if (std::abs(z - v_end) < std::abs(nearest - v_end)) nearest = z;
  if (connection) *connection = nearest;
  if (std::abs(nearest - q_bot) > 1e-9) return std::nullopt;

  const double c_star = 0.5 * (c_lo + c_hi);
  Trajectory tr = run_shot(f, q_top, q_bot, c_star, opts, true);
  return build_profile(f, q_top, q_bot, c_star, tr.steps, opts);
}

double profile_residual(const WaveProfile& w, const Nonlinearity& f) {
  const auto& z = w.z_samples;
  const auto& u = w.u_samples;
  if (z.size() < 5) throw PreconditionError("profile residual needs at least 5 samples");
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < z.size(); ++i) {
    const double hm = z[i] - z[i - 1], hp = z[i + 1] - z[i];
    const double d2 = 2.0 * ((u[i + 1] - u[i]) / hp - (u[i] - u[i - 1]) / hm) / (hp + hm);
    const double d1 = (hm * hm * u[i + 1] - hp * hp * u[i - 1] + (hp * hp - hm * hm) * u[i]) / (hp * hm * (hp + hm));
    worst = std::max(worst, std::abs(d2 + w.c * d1 + f.value(u[i])));
  }
  return worst;
}

}  // namespace terracelab

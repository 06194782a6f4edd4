#include "terracelab/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "terracelab/errors.hpp"

namespace terracelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool in_band(const std::vector<double>& floors, double u, double eps) {
  for (double q : floors)
    if (std::abs(u - q) <= eps) return true;
  return false;
}

// min over floors of -max f' on [q - w, q + w]
double floor_gap(const Nonlinearity& f, const std::vector<double>& floors, double w, int samples) {
  double eta = kInf;
  for (double q : floors) eta = std::min(eta, -f.max_derivative(q - w, q + w, samples));
  return eta;
}

void check_terrace(const Terrace& t) {
  if (t.waves.empty() || t.floors.size() != t.waves.size() + 1) throw PreconditionError("terrace is empty or malformed");
}

}  // namespace

SupersubConstants compute_constants(const Nonlinearity& f, const Terrace& terrace, const ConstantsOptions& opts) {
  check_terrace(terrace);
  const double eps = opts.epsilon_nbhd;
  if (!(eps > 0.0)) throw DomainError("epsilon_nbhd must be positive");
  SupersubConstants k;
  k.form = SupersubConstants::Form::Wave;
  k.epsilon_nbhd = eps;
  k.eta0 = floor_gap(f, terrace.floors, 2.0 * eps, opts.samples);
  if (!(k.eta0 > 0.0)) throw ExtractionError("f' is not negative on the 2*eps floor neighbourhoods; shrink epsilon_nbhd");
  k.beta0 = 0.5 * k.eta0;
  k.M0 = f.max_derivative(terrace.floors.back() - eps, terrace.floors.front() + eps, opts.samples) + k.beta0;
  double eta1 = kInf;
  for (const auto& w : terrace.waves)
    for (std::size_t i = 0; i < w.u_samples.size(); ++i)
      if (!in_band(terrace.floors, w.u_samples[i], eps)) eta1 = std::min(eta1, -(1.0 + w.c) * w.du_samples[i]);
  if (!(eta1 > 0.0) || !std::isfinite(eta1)) throw ExtractionError("interface slope floor eta1 is not positive");
  k.interface = eta1;
  k.sigma0 = std::min(eps, k.eta0 * eta1 / (2.0 * k.M0));
  return k;
}

SupersubConstants compute_constants(const Nonlinearity& f, const Terrace& terrace, const RadialTrajectory& V,
                                    const ConstantsOptions& opts) {
  check_terrace(terrace);
  const double eps = opts.epsilon_nbhd;
  if (!(eps > 0.0)) throw DomainError("epsilon_nbhd must be positive");
  SupersubConstants k;
  k.form = SupersubConstants::Form::Radial;
  k.epsilon_nbhd = eps;
  k.t_min = opts.t_min;
  k.eta0 = floor_gap(f, terrace.floors, eps, opts.samples);
  if (!(k.eta0 > 0.0)) throw ExtractionError("f' is not negative on the eps floor neighbourhoods; shrink epsilon_nbhd");
  k.beta0 = k.eta0;
  k.M0 = f.max_derivative(terrace.floors.back() - eps, terrace.floors.front() + eps, opts.samples) + k.beta0;
  double delta0 = kInf;
  std::vector<double> vt;
  for (std::size_t s = 0; s < V.snapshots.size(); ++s) {
    if (V.times[s] < opts.t_min) continue;
    const auto& v = V.snapshots[s];
    radial_rhs(f, V.grid, v, vt);
    for (std::size_t j = 0; j < v.size(); ++j)
      if (!in_band(terrace.floors, v[j], 0.5 * eps)) delta0 = std::min(delta0, vt[j]);
  }
  if (!std::isfinite(delta0)) throw ExtractionError("no trajectory values outside the floor bands after t_min");
  if (!(delta0 > 0.0)) throw ExtractionError("discrete V_t is not positive on the interface bands");
  k.interface = delta0;
  k.sigma0 = std::min(eps / (2.0 * k.beta0), delta0 / k.M0);
  return k;
}

double inequality_tolerance(const Nonlinearity& f, double h, double k) {
  const Landmarks& lm = f.require_landmarks();
  return 10.0 * (h * h + k * k) * f.max_abs_derivative(0.0, lm.p);
}

ViolationReport verify_wave_supersub(const Nonlinearity& f, const WaveProfile& w, const SupersubConstants& kc,
                                     const WaveCheckOptions& o) {
  const double beta = o.beta >= 0.0 ? o.beta : kc.beta0;
  const double sigma = o.shift_terms ? (o.sigma >= 0.0 ? o.sigma : kc.sigma0) : 0.0;
  const auto nr = static_cast<std::size_t>(std::llround((o.r_hi - o.r_lo) / o.h));
  const auto nt = static_cast<std::size_t>(std::llround(o.t_hi / o.k));
  if (nr < 2 || nt < 2) throw DomainError("verification grid too small");

  // Super (+1) and sub (-1) solutions on the space-time grid.
  auto field = [&](int sign, double t, std::vector<double>& out) {
    const double e = o.shift_terms ? std::exp(-beta * t) : 0.0;
    const double rs = sign * e;                    // space shift of W's first argument
    const double ts = -sign * e;                   // time shift of W's second argument
    for (std::size_t i = 0; i <= nr; ++i) {
      const double r = o.r_lo + static_cast<double>(i) * o.h;
      out[i] = w.value((r - o.r0 + rs) - w.c * (t - o.t0 + ts)) + sign * sigma * e;
    }
  };

  ViolationReport rep;
  rep.tol = inequality_tolerance(f, o.h, o.k);
  rep.min_super = kInf;
  rep.min_sub = kInf;
  for (int sign : {+1, -1}) {
    std::vector<double> prev(nr + 1), cur(nr + 1), next(nr + 1);
    field(sign, 0.0, prev);
    field(sign, o.k, cur);
    for (std::size_t n = 1; n < nt; ++n) {
      const double t = static_cast<double>(n) * o.k;
      field(sign, t + o.k, next);
      for (std::size_t i = 1; i < nr; ++i) {
        const double ut = (next[i] - prev[i]) / (2.0 * o.k);
        const double urr = (cur[i + 1] - 2.0 * cur[i] + cur[i - 1]) / (o.h * o.h);
        const double res = sign * (ut - urr - f.value(cur[i]));
        const double r = o.r_lo + static_cast<double>(i) * o.h;
        double& best = sign > 0 ? rep.min_super : rep.min_sub;
        if (res < best) {
          best = res;
          (sign > 0 ? rep.super_r : rep.sub_r) = r;
          (sign > 0 ? rep.super_t : rep.sub_t) = t;
        }
        ++rep.points;
      }
      std::swap(prev, cur);
      std::swap(cur, next);
    }
  }
  rep.pass = rep.min_super >= -rep.tol && rep.min_sub >= -rep.tol;
  return rep;
}

ViolationReport verify_radial_supersub(const Nonlinearity& f, const RadialTrajectory& V, const SupersubConstants& kc,
                                       const RadialCheckOptions& o) {
  const double beta = o.beta >= 0.0 ? o.beta : kc.beta0;
  const double sigma = o.sigma >= 0.0 ? o.sigma : kc.sigma0;
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  if (o.t0 < kc.t_min) throw PreconditionError("t0 must be at least the t_min used for the constants");
  ViolationReport rep;
  rep.tol = o.tol;
  rep.min_super = kInf;
  rep.min_sub = kInf;
  std::vector<double> vt;
  for (std::size_t s = 0; s < V.snapshots.size(); ++s) {
    const double tau = V.times[s];
    if (tau < o.t0) continue;
    const auto& v = V.snapshots[s];
    radial_rhs(f, V.grid, v, vt);
    for (int sign : {+1, -1}) {
      // tau = t + t0 + sign (1 - e^{-beta t}); solve for t >= 0 by Newton.
      const double d = tau - o.t0;
      double t = d;
      for (int it = 0; it < 60; ++it) {
        const double e = std::exp(-beta * t);
        const double g = t + sign * (1.0 - e) - d;
        const double dg = 1.0 + sign * beta * e;
        const double step = g / dg;
        t = std::max(0.0, t - step);
        if (std::abs(step) < 1e-15 * (1.0 + t)) break;
      }
      const double e = std::exp(-beta * t);
      const double shift = sigma * beta * e;
      for (std::size_t j = 0; j < v.size(); ++j) {
        const double drift = beta * e * (vt[j] - sigma * beta);
        const double res = sign > 0 ? drift + f.value(v[j]) - f.value(v[j] + shift)
                                    : drift + f.value(v[j] - shift) - f.value(v[j]);
        double& best = sign > 0 ? rep.min_super : rep.min_sub;
        if (res < best) {
          best = res;
          (sign > 0 ? rep.super_r : rep.sub_r) = V.grid.r(j);
          (sign > 0 ? rep.super_t : rep.sub_t) = t;
        }
        ++rep.points;
      }
    }
  }
  if (rep.points == 0) throw PreconditionError("no snapshots at or after t0");
  rep.pass = rep.min_super >= -rep.tol && rep.min_sub >= -rep.tol;
  return rep;
}

namespace {

// u sampled at points with known radius; V interpolated linearly in r.
struct SandwichData {
  std::vector<double> times;
  std::vector<const std::vector<double>*> values;
  std::vector<std::size_t> vj;  // V node below the point's radius
  std::vector<double> vw;       // interpolation weight
  std::vector<double> radius;
  double T_final = 0.0;
};

void attach_radii(SandwichData& d, const RadialGrid& vg) {
  const std::size_t n = vg.nodes();
  d.vj.resize(d.radius.size());
  d.vw.resize(d.radius.size());
  for (std::size_t k = 0; k < d.radius.size(); ++k) {
    const double x = d.radius[k] / vg.dr;
    auto j = static_cast<std::size_t>(x);
    double w = x - static_cast<double>(j);
    if (j + 1 >= n) {
      j = n - 2;
      w = 1.0;
    }
    d.vj[k] = j;
    d.vw[k] = w;
  }
}

SandwichReport run_sandwich(const SandwichData& d, const RadialTrajectory& V, const SupersubConstants& kc,
                            const SandwichOptions& opts) {
  if (V.times.size() < 2) throw PreconditionError("V needs at least two snapshots");
  const double dv = V.times[1] - V.times[0];
  std::vector<long> m(d.times.size());
  for (std::size_t i = 0; i < d.times.size(); ++i) {
    const double q = d.times[i] / dv;
    if (std::abs(q - std::round(q)) > 1e-6) throw PreconditionError("u snapshot times must be multiples of V's interval");
    m[i] = std::lround(q);
  }
  const long v_last = static_cast<long>(V.times.size()) - 1;
  const long m_last = *std::max_element(m.begin(), m.end());
  const double bound = opts.search_bound > 0.0 ? opts.search_bound : 5.0 * d.T_final;
  const long a_max = std::min(static_cast<long>(bound / dv), m_last - 1);
  const long b_max = std::min(static_cast<long>(bound / dv), v_last - m_last);
  const double s0 = kc.sigma0 * kc.beta0;
  auto vat = [&](long idx, std::size_t k) {
    const auto& v = V.snapshots[static_cast<std::size_t>(idx)];
    return (1.0 - d.vw[k]) * v[d.vj[k]] + d.vw[k] * v[d.vj[k] + 1];
  };

  SandwichReport rep;
  // Lower side depends on T only.
  long a_found = -1;
  for (long a = 0; a <= a_max && a_found < 0; ++a) {
    const double T = static_cast<double>(a) * dv;
    double worst = kInf, wr = 0.0, wt = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < d.times.size() && ok; ++i) {
      if (m[i] <= a) continue;
      const double s = s0 * std::exp(-kc.beta0 * (d.times[i] - T));
      const auto& u = *d.values[i];
      for (std::size_t k = 0; k < u.size(); ++k) {
        const double slack = u[k] - (vat(m[i] - a, k) - s);
        if (slack < worst) worst = slack, wr = d.radius[k], wt = d.times[i];
        if (slack < -opts.tol) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      a_found = a;
      rep.worst_lower = worst;
      rep.lower_r = wr;
      rep.lower_t = wt;
    }
  }
  if (a_found < 0) {
    rep.message = "no T within the search bound satisfies the lower inequality";
    return rep;
  }
  const double T = static_cast<double>(a_found) * dv;
  for (long b = 0; b <= b_max; ++b) {
    double worst = kInf, wr = 0.0, wt = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < d.times.size() && ok; ++i) {
      if (m[i] <= a_found) continue;
      const double s = s0 * std::exp(-kc.beta0 * (d.times[i] - T));
      const auto& u = *d.values[i];
      for (std::size_t k = 0; k < u.size(); ++k) {
        const double slack = vat(m[i] + b, k) + s - u[k];
        if (slack < worst) worst = slack, wr = d.radius[k], wt = d.times[i];
        if (slack < -opts.tol) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      rep.found = true;
      rep.T = T;
      rep.T0 = static_cast<double>(b) * dv;
      rep.worst_upper = worst;
      rep.upper_r = wr;
      rep.upper_t = wt;
      return rep;
    }
  }
  std::ostringstream os;
  os << "T=" << T << " found, but no T0 <= " << static_cast<double>(b_max) * dv
     << " satisfies the upper inequality (V may be too short)";
  rep.message = os.str();
  return rep;
}

}  // namespace

SandwichReport sandwich_check(const RadialTrajectory& u, const RadialTrajectory& V, const SupersubConstants& k,
                              const SandwichOptions& opts) {
  SandwichData d;
  d.times = u.times;
  for (const auto& s : u.snapshots) d.values.push_back(&s);
  d.radius.resize(u.grid.nodes());
  for (std::size_t j = 0; j < d.radius.size(); ++j) d.radius[j] = u.grid.r(j);
  d.T_final = u.times.back();
  attach_radii(d, V.grid);
  return run_sandwich(d, V, k, opts);
}

SandwichReport sandwich_check(const Trajectory2D& u, const RadialTrajectory& V, const SupersubConstants& k,
                              const SandwichOptions& opts) {
  SandwichData d;
  d.times = u.times;
  for (const auto& s : u.snapshots) d.values.push_back(&s);
  const int n = u.grid.n;
  d.radius.resize(u.grid.cells());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d.radius[static_cast<std::size_t>(i) * n + j] = std::hypot(u.grid.x(j), u.grid.x(i));
  if (V.grid.R_max < std::sqrt(2.0) * u.grid.L) throw PreconditionError("V's radial grid must cover the 2-D box diagonal");
  d.T_final = u.times.back();
  attach_radii(d, V.grid);
  return run_sandwich(d, V, k, opts);
}

}  // namespace terracelab

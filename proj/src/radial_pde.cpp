#include "terracelab/radial_pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "radial_operator.hpp"
#include "terracelab/errors.hpp"
#include "terracelab/front.hpp"
#include "terracelab/ode.hpp"
#include "terracelab/parallel.hpp"

namespace terracelab {

namespace detail {

RadialOperator::RadialOperator(const Nonlinearity& f, const RadialGrid& grid)
    : f_(f), n_(grid.nodes()), origin_(2.0 * grid.N / (grid.dr * grid.dr)), centre_(-2.0 / (grid.dr * grid.dr)) {
  const double inv = 1.0 / (grid.dr * grid.dr);
  lo_.assign(n_, 0.0);
  hi_.assign(n_, 0.0);
  for (std::size_t j = 1; j + 1 < n_; ++j) {
    const double adv = (grid.N - 1) / (2.0 * grid.r(j) * grid.dr);
    lo_[j] = inv - adv;
    hi_[j] = inv + adv;
  }
  sub_ = lo_;
  super_ = hi_;
  diag_.assign(n_, centre_);
  diag_[0] = -origin_;
  super_[0] = origin_;
  diag_[n_ - 1] = 0.0;
  sub_[n_ - 1] = 0.0;
  if (f.term().kind() == ReactionTerm::Kind::Polynomial && !f.term().coefficients().empty()) {
    poly_.coeffs = f.term().coefficients().data();
    poly_.degree = static_cast<int>(f.term().coefficients().size()) - 1;
  }
}

void RadialOperator::apply(const kernels::Table& k, const double* u, double* out) const {
  out[0] = origin_ * (u[1] - u[0]) + f_.value(u[0]);
  k.radial_rhs(u, lo_.data(), hi_.data(), centre_, poly_, out, 1, n_ - 1);
  if (poly_.degree < 0)
    for (std::size_t j = 1; j + 1 < n_; ++j) out[j] += f_.value(u[j]);
  out[n_ - 1] = f_.value(u[n_ - 1]);
}

void RadialOperator::apply_diffusion(const kernels::Table& k, const double* u, double* out) const {
  out[0] = origin_ * (u[1] - u[0]);
  k.radial_rhs(u, lo_.data(), hi_.data(), centre_, kernels::Poly{}, out, 1, n_ - 1);
  out[n_ - 1] = 0.0;
}

}  // namespace detail

namespace {

using detail::RadialOperator;

// Advances u in place by single steps of the configured scheme.
class Stepper {
 public:
  Stepper(const Nonlinearity& f, const RadialGrid& grid, double dt)
      : op_(f, grid), k_(kernels::active()), dt_(dt), scheme_(grid.scheme) {
    const std::size_t n = op_.size();
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_}) v->assign(n, 0.0);
    if (scheme_ == Scheme::IMEXTrapezoid) {
      // Factor (I - dt/2 L_h) once (Thomas elimination coefficients).
      cp_.assign(n, 0.0);
      m_.assign(n, 0.0);
      const auto& a = op_.sub();
      const auto& b = op_.diag();
      const auto& c = op_.super();
      for (std::size_t j = 0; j < n; ++j) {
        const double aj = j ? -0.5 * dt * a[j] : 0.0;
        const double bj = 1.0 - 0.5 * dt * b[j];
        const double cj = j + 1 < n ? -0.5 * dt * c[j] : 0.0;
        m_[j] = 1.0 / (bj - (j ? aj * cp_[j - 1] : 0.0));
        cp_[j] = cj * m_[j];
      }
    }
  }

  const kernels::Table& table() const { return k_; }

  void step(std::vector<double>& u) {
    const std::size_t n = u.size();
    if (scheme_ == Scheme::RK4) {
      op_.apply(k_, u.data(), k1_.data());
      k_.axpy(u.data(), 0.5 * dt_, k1_.data(), tmp_.data(), n);
      op_.apply(k_, tmp_.data(), k2_.data());
      k_.axpy(u.data(), 0.5 * dt_, k2_.data(), tmp_.data(), n);
      op_.apply(k_, tmp_.data(), k3_.data());
      k_.axpy(u.data(), dt_, k3_.data(), tmp_.data(), n);
      op_.apply(k_, tmp_.data(), k4_.data());
      k_.rk4_combine(u.data(), k1_.data(), k2_.data(), k3_.data(), k4_.data(), dt_ / 6.0, u.data(), n);
      return;
    }
    // Crank-Nicolson diffusion with Heun (trapezoid) reaction.
    op_.apply_diffusion(k_, u.data(), k1_.data());  // L u
    for (std::size_t j = 0; j < n; ++j) {
      k2_[j] = op_.reaction(u[j]);  // f(u^n)
      tmp_[j] = u[j] + 0.5 * dt_ * k1_[j] + dt_ * k2_[j];
    }
    solve(tmp_, k3_);  // predictor u*
    for (std::size_t j = 0; j < n; ++j)
      tmp_[j] = u[j] + 0.5 * dt_ * k1_[j] + 0.5 * dt_ * (k2_[j] + op_.reaction(k3_[j]));
    solve(tmp_, u);
  }

 private:
  void solve(const std::vector<double>& rhs, std::vector<double>& x) {
    const std::size_t n = rhs.size();
    const auto& a = op_.sub();
    k4_[0] = rhs[0] * m_[0];
    for (std::size_t j = 1; j < n; ++j) k4_[j] = (rhs[j] + 0.5 * dt_ * a[j] * k4_[j - 1]) * m_[j];
    x[n - 1] = k4_[n - 1];
    for (std::size_t j = n - 1; j-- > 0;) x[j] = k4_[j] - cp_[j] * x[j + 1];
  }

  RadialOperator op_;
  const kernels::Table& k_;
  double dt_;
  Scheme scheme_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_, cp_, m_;
};

// Number of steps per interval and the matching step size (<= dt_max).
std::pair<long, double> fit_step(double interval, double dt_max) {
  const long m = std::max(1L, static_cast<long>(std::ceil(interval / dt_max - 1e-9)));
  return {m, interval / static_cast<double>(m)};
}

double extended_f(const Nonlinearity& f, double p, double eps0, double u) {
  const double top = p + eps0;
  if (u <= top) return f.value(u);
  const FValue fv = f.term().eval(top);
  return std::min(fv.value + fv.derivative * (u - top), fv.value);
}

}  // namespace

std::size_t RadialGrid::nodes() const {
  return static_cast<std::size_t>(std::llround(R_max / dr)) + 1;
}

void RadialGrid::validate() const {
  if (N < 1) throw ConfigError("grid.N must be >= 1");
  if (!(dr > 0.0) || !(R_max > 0.0)) throw ConfigError("grid.dr and grid.R_max must be positive");
  const double cells = R_max / dr;
  if (std::abs(cells - std::round(cells)) > 1e-9 * cells) throw ConfigError("grid.R_max must be a multiple of grid.dr");
  if (nodes() < 4) throw ConfigError("grid needs at least 4 nodes");
  if (dt < 0.0 || !(cfl > 0.0)) throw ConfigError("grid.dt must be >= 0 and grid.cfl > 0");
  if (scheme == Scheme::RK4 && dt > cfl * dr * dr * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "explicit scheme needs dt <= cfl*dr^2 = " << cfl * dr * dr << " (got " << dt << ")";
    throw ConfigError(os.str());
  }
}

double sample_radial(const RadialGrid& grid, const std::vector<double>& u, double r) {
  if (r <= 0.0) return u.front();
  const double x = r / grid.dr;
  const std::size_t j = static_cast<std::size_t>(x);
  if (j + 1 >= u.size()) return u.back();
  const double w = x - static_cast<double>(j);
  return (1.0 - w) * u[j] + w * u[j + 1];
}

void radial_rhs(const Nonlinearity& f, const RadialGrid& grid, const std::vector<double>& u, std::vector<double>& out) {
  RadialOperator op(f, grid);
  out.resize(u.size());
  op.apply(kernels::active(), u.data(), out.data());
}

std::vector<double> build_bump_initial(const Nonlinearity& f, double theta, double R, const RadialGrid& grid) {
  const Landmarks& lm = f.require_landmarks();
  if (!(theta > lm.b_star_upper && theta < lm.p)) {
    std::ostringstream os;
    os << "bump height " << theta << " outside (b^*, p) = (" << lm.b_star_upper << ", " << lm.p << ")";
    throw DomainError(os.str());
  }
  if (!(R > 0.0)) throw DomainError("bump radius must be positive");
  std::vector<double> u(grid.nodes());
  for (std::size_t j = 0; j < u.size(); ++j)
    u[j] = theta * std::clamp((R - grid.r(j)) / grid.dr + 0.5, 0.0, 1.0);
  return u;
}

double radial_ode_zero(const Nonlinearity& f, double eps, int N, double r_limit) {
  const Landmarks& lm = f.require_landmarks();
  const double p = lm.p;
  const double eps0 = 0.5 * std::min(lm.delta2, 1.0);
  const double v0 = p - eps;
  const double f0 = f.value(v0);
  if (!(f0 > 0.0)) throw ConstructionError("f(p - eps) must be positive; choose a smaller eps");
  // Series start away from the coordinate singularity: v = v0 - f0 r^2 / (2N).
  const double r_start = 1e-4;
  ode::State<2> y{v0 - f0 * r_start * r_start / (2.0 * N), -f0 * r_start / N};
  auto rhs = [&](double r, const ode::State<2>& s) {
    return ode::State<2>{s[1], -(N - 1) / r * s[1] - extended_f(f, p, eps0, s[0])};
  };
  ode::AdaptiveOptions ao;
  ao.rtol = 1e-10;
  ao.atol = 1e-13;
  ao.h_max = 0.5;
  double R0 = std::numeric_limits<double>::quiet_NaN();
  bool turned = false;
  auto observer = [&](const ode::Step<2>& st) {
    if (st.y1[0] <= 0.0) {
      double a = st.t0, b = st.t1;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        (st.interpolate(m)[0] > 0.0 ? a : b) = m;
      }
      R0 = 0.5 * (a + b);
      return false;
    }
    if (st.y1[1] >= 0.0) {
      turned = true;
      return false;
    }
    return true;
  };
  ode::integrate<2>(rhs, r_start, y, r_limit, ao, observer);
  if (std::isnan(R0)) {
    std::ostringstream os;
    os << "radial profile from p - eps (eps=" << eps << ") "
       << (turned ? "turned back before reaching 0" : "did not reach 0 before r=" + std::to_string(r_limit))
       << "; choose a smaller eps";
    throw ConstructionError(os.str());
  }
  return R0;
}

TerraceSeed build_terrace_initial(const Nonlinearity& f, double eps, int N, const RadialGrid& grid) {
  const Landmarks& lm = f.require_landmarks();
  if (!(eps > 0.0 && eps < lm.p)) throw DomainError("eps must lie in (0, p)");
  if (N < 1) throw DomainError("dimension N must be >= 1");
  RadialGrid g = grid;
  g.N = N;
  const std::size_t n = g.nodes();
  const double dr2 = g.dr * g.dr;
  TerraceSeed seed;
  seed.u0.assign(n, 0.0);
  std::vector<double>& v = seed.u0;
  v[0] = lm.p - eps;
  if (!(f.value(v[0]) > 0.0)) throw ConstructionError("f(p - eps) must be positive; choose a smaller eps");
  double next = v[0] - dr2 * f.value(v[0]) / (2.0 * N);
  std::size_t j = 0;
  while (next > 0.0) {
    if (j + 1 >= n - 1) throw ConstructionError("steady profile did not reach 0 before R_max; choose a smaller eps or a larger grid");
    if (!(next < v[j])) throw ConstructionError("steady profile is not decreasing; choose a smaller eps");
    v[++j] = next;
    const double adv = (N - 1) / (2.0 * g.r(j) * g.dr);
    const double lo = 1.0 / dr2 - adv, hi = 1.0 / dr2 + adv;
    next = -((lo * v[j - 1] + (-2.0 / dr2) * v[j]) + f.value(v[j])) / hi;
  }
  seed.R0 = g.r(j) + v[j] / (v[j] - next) * g.dr;
  seed.R0_continuous = radial_ode_zero(f, eps, N, g.R_max);
  return seed;
}

RadialTrajectory simulate(const Nonlinearity& f, const std::vector<double>& u0, const RadialGrid& grid,
                          const SimulateOptions& opts, InitialKind kind, double R0) {
  grid.validate();
  if (u0.size() != grid.nodes()) throw PreconditionError("initial array does not match the grid");
  if (!(opts.snapshot_interval > 0.0) || !(opts.T_final > 0.0)) throw ConfigError("T_final and snapshot interval must be positive");
  const double snaps = opts.T_final / opts.snapshot_interval;
  if (std::abs(snaps - std::round(snaps)) > 1e-9 * snaps) throw ConfigError("T_final must be a multiple of the snapshot interval");
  const Landmarks& lm = f.require_landmarks();
  const double lo = -lm.delta1, hi = lm.p + lm.delta2;
  for (double x : u0)
    if (!(x >= lo - opts.invariant_tol && x <= hi + opts.invariant_tol))
      throw PreconditionError("initial data leaves [-delta1, p + delta2]");

  auto [steps_per_snap, dt] = fit_step(opts.snapshot_interval, grid.time_step());
  RadialTrajectory tr;
  tr.grid = grid;
  tr.dt = dt;
  tr.initial_kind = kind;
  tr.R0 = R0;
  const double cap = speed_cap(f);
  if (grid.R_max < cap * opts.T_final + 20.0) {
    std::ostringstream os;
    os << "R_max=" << grid.R_max << " is below c_max*T_final+20=" << cap * opts.T_final + 20.0
       << "; relying on the far-field decay check";
    tr.warnings.push_back(os.str());
  }
  Stepper stepper(f, grid, dt);
  tr.isa = std::string(kernels::isa_name(stepper.table().isa));

  std::vector<double> u = u0;
  tr.times.push_back(0.0);
  tr.snapshots.push_back(u);
  const long n_snaps = std::lround(snaps);
  long step_index = 0;
  for (long s = 1; s <= n_snaps; ++s) {
    for (long k = 0; k < steps_per_snap; ++k, ++step_index) stepper.step(u);
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (!std::isfinite(u[j])) {
        std::ostringstream os;
        os << "non-finite value at r=" << grid.r(j) << " by step " << step_index;
        throw InstabilityError(os.str());
      }
      if (u[j] < lo - opts.invariant_tol || u[j] > hi + opts.invariant_tol) {
        std::ostringstream os;
        os << "u=" << u[j] << " left the invariant region at r=" << grid.r(j) << " by step " << step_index;
        throw InstabilityError(os.str());
      }
    }
    tr.times.push_back(static_cast<double>(s) * opts.snapshot_interval);
    tr.snapshots.push_back(u);
  }
  double far = 0.0;
  for (const auto& snap : tr.snapshots) far = std::max(far, std::abs(snap.back()));
  if (far > 1e-6) {
    std::ostringstream os;
    os << "far-field value reached " << far << " at R_max";
    tr.warnings.push_back(os.str());
  }
  return tr;
}

SpreadingOutcome classify_bump(const Nonlinearity& f, double theta, double R, const RadialGrid& grid,
                               const SpreadingOptions& opts) {
  const Landmarks& lm = f.require_landmarks();
  grid.validate();
  const double horizon = opts.T_classify > 0.0 ? opts.T_classify : (opts.min_speed > 0.0 ? 50.0 / opts.min_speed : 200.0);
  std::vector<double> u = build_bump_initial(f, theta, R, grid);
  const double dt = grid.time_step();
  Stepper stepper(f, grid, dt);
  const double high = 0.5 * (lm.p + lm.b_star_upper);
  double above_since = -1.0;
  const long steps = static_cast<long>(std::ceil(horizon / dt));
  for (long k = 1; k <= steps; ++k) {
    stepper.step(u);
    const double t = k * dt;
    if (u[0] >= high) {
      if (above_since < 0.0) above_since = t;
      if (t - above_since >= opts.sustain) return SpreadingOutcome::Spreading;
    } else {
      above_since = -1.0;
    }
    if (k % 64 == 0 && *std::max_element(u.begin(), u.end()) < lm.b_star) return SpreadingOutcome::Extinction;
  }
  if (*std::max_element(u.begin(), u.end()) < lm.b_star) return SpreadingOutcome::Extinction;
  return SpreadingOutcome::Unclassified;
}

double estimate_spreading_radius(const Nonlinearity& f, double theta, int N, const RadialGrid& grid,
                                 const SpreadingOptions& opts) {
  RadialGrid g = grid;
  g.N = N;
  auto classify = [&](double R) {
    const auto out = classify_bump(f, theta, R, g, opts);
    if (out == SpreadingOutcome::Unclassified) {
      std::ostringstream os;
      os << "bump theta=" << theta << ", R=" << R << " neither spread nor died out by the horizon; increase T_classify";
      throw InconclusiveError(os.str());
    }
    return out == SpreadingOutcome::Spreading;
  };
  double lo = 0.0, hi = opts.R_hi;
  while (!classify(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 0.5 * g.R_max) throw InconclusiveError("no spreading bump found below R_max/2");
  }
  // Three interior probes per round (quartering). The probe count is fixed so the
  // result does not depend on the worker count.
  constexpr int kProbes = 3;
  while (hi - lo > g.dr) {
    std::vector<double> probe(kProbes);
    std::vector<char> spreads(probe.size());
    for (int i = 0; i < kProbes; ++i) probe[static_cast<std::size_t>(i)] = lo + (hi - lo) * (i + 1) / (kProbes + 1);
    parallel_for(probe.size(), std::max(1, opts.workers), [&](std::size_t i) { spreads[i] = classify(probe[i]); });
    double new_lo = lo, new_hi = hi;
    for (std::size_t i = 0; i < probe.size(); ++i) {
      if (spreads[i]) {
        new_hi = probe[i];
        break;
      }
      new_lo = probe[i];
    }
    lo = new_lo;
    hi = new_hi;
  }
  return hi;
}

MonotonicityReport monotonicity_report(const RadialTrajectory& traj, double tol) {
  MonotonicityReport rep;
  rep.tol = tol;
  const bool seed = traj.initial_kind == InitialKind::TerraceSeed;
  rep.checked_ut = seed;
  const RadialGrid& g = traj.grid;
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    const auto& u = traj.snapshots[s];
    const double t = traj.times[s];
    for (std::size_t j = 0; j + 1 < u.size(); ++j) {
      if (!seed && g.r(j) <= traj.R0) continue;
      const double ur = (u[j + 1] - u[j]) / g.dr;
      if (ur > rep.worst_ur) {
        rep.worst_ur = ur;
        rep.worst_ur_r = g.r(j) + 0.5 * g.dr;
        rep.worst_ur_t = t;
      }
    }
    if (seed && s + 1 < traj.snapshots.size()) {
      const auto& w = traj.snapshots[s + 1];
      const double h = traj.times[s + 1] - t;
      for (std::size_t j = 0; j < u.size(); ++j) {
        const double ut = (w[j] - u[j]) / h;
        if (ut < rep.worst_ut) {
          rep.worst_ut = ut;
          rep.worst_ut_r = g.r(j);
          rep.worst_ut_t = t + 0.5 * h;
        }
      }
    }
  }
  rep.pass = rep.worst_ur <= tol && (!seed || rep.worst_ut >= -tol);
  return rep;
}

}  // namespace terracelab

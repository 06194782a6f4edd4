#include "terracelab/planar2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "terracelab/errors.hpp"
#include "terracelab/kernels.hpp"
#include "terracelab/levelset.hpp"
#include "terracelab/parallel.hpp"

namespace terracelab {

namespace {

class Operator2D {
 public:
  Operator2D(const Nonlinearity& f, const Grid2D& g, int workers)
      : f_(f), n_(static_cast<std::size_t>(g.n)), inv_h2_(1.0 / (g.h() * g.h())), k_(kernels::active()),
        workers_(workers) {
    if (f.term().kind() == ReactionTerm::Kind::Polynomial && !f.term().coefficients().empty()) {
      poly_.coeffs = f.term().coefficients().data();
      poly_.degree = static_cast<int>(f.term().coefficients().size()) - 1;
    }
  }

  const kernels::Table& table() const { return k_; }

  void apply(const double* u, double* out) const {
    const std::size_t n = n_;
    // Row blocks keep per-task overhead small.
    const std::size_t block = 16;
    const std::size_t tasks = (n + block - 1) / block;
    parallel_for(tasks, workers_, [&](std::size_t b) {
      for (std::size_t i = b * block; i < std::min(n, (b + 1) * block); ++i) {
        const double* row = u + i * n;
        double* o = out + i * n;
        if (i == 0 || i + 1 == n) {
          for (std::size_t j = 0; j < n; ++j) o[j] = f_.value(row[j]);
          continue;
        }
        k_.lap2d_row(row - n, row, row + n, inv_h2_, poly_, o, n);
        if (poly_.degree < 0)
          for (std::size_t j = 1; j + 1 < n; ++j) o[j] += f_.value(row[j]);
        o[0] = f_.value(row[0]);
        o[n - 1] = f_.value(row[n - 1]);
      }
    });
  }

 private:
  const Nonlinearity& f_;
  std::size_t n_;
  double inv_h2_;
  const kernels::Table& k_;
  kernels::Poly poly_;
  int workers_;
};

}  // namespace

void Grid2D::validate() const {
  if (n < 8) throw ConfigError("planar2d.n must be >= 8");
  if (!(L > 0.0)) throw ConfigError("planar2d.L must be positive");
  if (dt < 0.0 || !(cfl > 0.0)) throw ConfigError("planar2d.dt must be >= 0 and cfl > 0");
  if (dt > cfl * h() * h() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "explicit 2-D scheme needs dt <= cfl*h^2 = " << cfl * h() * h();
    throw ConfigError(os.str());
  }
}

double Trajectory2D::sample(std::size_t s, double x, double y) const {
  const int n = grid.n;
  const double h = grid.h();
  const double fx = std::clamp((x + grid.L) / h - 0.5, 0.0, n - 1.0);
  const double fy = std::clamp((y + grid.L) / h - 0.5, 0.0, n - 1.0);
  const int j = std::min(static_cast<int>(fx), n - 2);
  const int i = std::min(static_cast<int>(fy), n - 2);
  const double wx = fx - j, wy = fy - i;
  const auto& u = snapshots[s];
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t k = static_cast<std::size_t>(i) * nn + static_cast<std::size_t>(j);
  return (1 - wy) * ((1 - wx) * u[k] + wx * u[k + 1]) + wy * ((1 - wx) * u[k + nn] + wx * u[k + nn + 1]);
}

std::vector<double> elliptical_initial(const Nonlinearity& f, double theta, double a, double b, double angle,
                                       const Grid2D& grid) {
  const Landmarks& lm = f.require_landmarks();
  if (!(theta > lm.b_star_upper && theta < lm.p)) throw DomainError("plateau height outside (b^*, p)");
  if (!(a > 0.0 && b > 0.0)) throw DomainError("ellipse semi-axes must be positive");
  const double ca = std::cos(angle), sa = std::sin(angle), h = grid.h();
  std::vector<double> u(grid.cells());
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j) {
      const double x = grid.x(j), y = grid.x(i);
      const double xr = ca * x + sa * y, yr = -sa * x + ca * y;
      const double q = std::sqrt((xr / a) * (xr / a) + (yr / b) * (yr / b));
      const double rad = std::hypot(x, y);
      // Distance to the boundary along the ray through the origin.
      const double d = q > 0.0 ? rad * (1.0 - 1.0 / q) : -std::min(a, b);
      u[static_cast<std::size_t>(i) * grid.n + j] = theta * std::clamp(0.5 - d / h, 0.0, 1.0);
    }
  return u;
}

std::vector<double> radial_initial_2d(const RadialGrid& rgrid, const std::vector<double>& profile, const Grid2D& grid) {
  std::vector<double> u(grid.cells());
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j)
      u[static_cast<std::size_t>(i) * grid.n + j] = sample_radial(rgrid, profile, std::hypot(grid.x(j), grid.x(i)));
  return u;
}

Trajectory2D simulate2d(const Nonlinearity& f, const std::vector<double>& u0, const Grid2D& grid,
                        const SimulateOptions& opts, int workers) {
  grid.validate();
  if (u0.size() != grid.cells()) throw PreconditionError("initial array does not match the 2-D grid");
  const double snaps = opts.T_final / opts.snapshot_interval;
  if (!(opts.snapshot_interval > 0.0) || std::abs(snaps - std::round(snaps)) > 1e-9 * snaps)
    throw ConfigError("T_final must be a positive multiple of the snapshot interval");
  const Landmarks& lm = f.require_landmarks();
  const double lo = -lm.delta1, hi = lm.p + lm.delta2;
  for (double x : u0)
    if (!(x >= lo - opts.invariant_tol && x <= hi + opts.invariant_tol))
      throw PreconditionError("initial data leaves [-delta1, p + delta2]");

  const long m = std::max(1L, static_cast<long>(std::ceil(opts.snapshot_interval / grid.time_step() - 1e-9)));
  const double dt = opts.snapshot_interval / static_cast<double>(m);
  Operator2D op(f, grid, workers);
  const auto& k = op.table();
  Trajectory2D tr;
  tr.grid = grid;
  tr.dt = dt;
  tr.isa = std::string(kernels::isa_name(k.isa));
  const std::size_t N = grid.cells();
  std::vector<double> u = u0, k1(N), k2(N), k3(N), k4(N), tmp(N);
  tr.times.push_back(0.0);
  tr.snapshots.push_back(u);
  long step_index = 0;
  for (long s = 1; s <= std::lround(snaps); ++s) {
    for (long q = 0; q < m; ++q, ++step_index) {
      op.apply(u.data(), k1.data());
      k.axpy(u.data(), 0.5 * dt, k1.data(), tmp.data(), N);
      op.apply(tmp.data(), k2.data());
      k.axpy(u.data(), 0.5 * dt, k2.data(), tmp.data(), N);
      op.apply(tmp.data(), k3.data());
      k.axpy(u.data(), dt, k3.data(), tmp.data(), N);
      op.apply(tmp.data(), k4.data());
      k.rk4_combine(u.data(), k1.data(), k2.data(), k3.data(), k4.data(), dt / 6.0, u.data(), N);
    }
    for (std::size_t c = 0; c < N; ++c)
      if (!std::isfinite(u[c]) || u[c] < lo - opts.invariant_tol || u[c] > hi + opts.invariant_tol) {
        std::ostringstream os;
        os << "2-D solution left the invariant region (u=" << u[c] << ") by step " << step_index;
        throw InstabilityError(os.str());
      }
    tr.times.push_back(static_cast<double>(s) * opts.snapshot_interval);
    tr.snapshots.push_back(u);
  }
  return tr;
}

RingExtract extract_ring(const Trajectory2D& traj, std::size_t snapshot, double a, const RingOptions& opts) {
  if (snapshot >= traj.snapshots.size()) throw RangeError("snapshot index out of range");
  if (opts.n_directions < 1) throw DomainError("need at least one direction");
  const double step = 0.5 * traj.grid.h();
  const double s_max = traj.grid.L - traj.grid.h();
  const auto n_steps = static_cast<std::size_t>(s_max / step);
  RingExtract ring;
  ring.level = a;
  ring.t = traj.times[snapshot];
  ring.slice_step = step;
  ring.slice_half_width = opts.slice_half_width;
  const std::size_t nd = static_cast<std::size_t>(opts.n_directions);
  ring.angles.resize(nd);
  ring.xi.resize(nd);
  ring.profile_slices.resize(nd);
  std::vector<int> counts(nd, 0);
  parallel_for(nd, opts.workers, [&](std::size_t d) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(d) / static_cast<double>(nd);
    const double cx = std::cos(phi), cy = std::sin(phi);
    ring.angles[d] = phi;
    double prev = traj.sample(snapshot, 0.0, 0.0);
    int count = 0;
    for (std::size_t k = 1; k <= n_steps; ++k) {
      const double s = static_cast<double>(k) * step;
      const double v = traj.sample(snapshot, s * cx, s * cy);
      const bool down = prev >= a && v < a, up = prev < a && v >= a;
      if (down || up) {
        if (count == 0) ring.xi[d] = down ? s - step + (prev - a) / (prev - v) * step : -1.0;
        ++count;
      }
      prev = v;
    }
    counts[d] = count;
    if (count == 1 && ring.xi[d] > 0.0) {
      const auto half = static_cast<long>(std::round(opts.slice_half_width / step));
      auto& sl = ring.profile_slices[d];
      for (long q = -half; q <= half; ++q) {
        const double s = ring.xi[d] + static_cast<double>(q) * step;
        sl.push_back(traj.sample(snapshot, s * cx, s * cy));
      }
    }
  });
  for (std::size_t d = 0; d < nd; ++d)
    if (counts[d] != 1 || ring.xi[d] <= 0.0) {
      std::ostringstream os;
      os << "level " << a << " at t=" << ring.t << ": direction " << d << " has " << counts[d]
         << " crossings (before the time when the level surface is a graph over directions)";
      throw PreTaError(os.str());
    }
  ring.R_bar = *std::max_element(ring.xi.begin(), ring.xi.end());
  ring.R_under = *std::min_element(ring.xi.begin(), ring.xi.end());
  return ring;
}

MetricsReport ring_metrics(const std::vector<RingExtract>& rings, const Terrace& terrace, double thickness_slope_max) {
  if (rings.size() < 5) throw PreconditionError("ring metrics need at least 5 ring times");
  const double a = rings.front().level;
  const WaveProfile* wave = nullptr;
  for (const auto& w : terrace.waves)
    if (a < w.q_top && a > w.q_bot) wave = &w;
  if (!wave) throw PreconditionError("level does not lie inside a terrace wave");
  MetricsReport m;
  m.c = wave->c;
  const std::size_t nd = rings.front().xi.size();
  std::vector<double> t;
  for (const auto& r : rings) t.push_back(r.t);
  m.direction_speeds.resize(nd);
  for (std::size_t d = 0; d < nd; ++d) {
    std::vector<double> x;
    for (const auto& r : rings) x.push_back(r.xi[d]);
    m.direction_speeds[d] = fit_slope(t, x).first;
  }
  m.speed_min = *std::min_element(m.direction_speeds.begin(), m.direction_speeds.end());
  m.speed_max = *std::max_element(m.direction_speeds.begin(), m.direction_speeds.end());
  m.max_rel_speed_error = std::max(std::abs(m.speed_min - m.c), std::abs(m.speed_max - m.c)) / m.c;
  m.speed_spread = (m.speed_max - m.speed_min) / m.c;
  for (const auto& r : rings) {
    m.times.push_back(r.t);
    m.thickness.push_back(r.R_bar - r.R_under);
  }
  m.thickness_slope = fit_slope(m.times, m.thickness).first;
  m.thickness_bounded = m.thickness_slope <= thickness_slope_max;
  m.alpha = wave->coordinate_of(a);
  const RingExtract& last = rings.back();
  for (const auto& sl : last.profile_slices) {
    const long half = static_cast<long>(sl.size() / 2);
    for (long q = -half; q <= half; ++q) {
      const double s = static_cast<double>(q) * last.slice_step;
      m.slice_distance = std::max(m.slice_distance, std::abs(sl[static_cast<std::size_t>(q + half)] - wave->value(s + m.alpha)));
    }
  }
  return m;
}

std::string ring_svg(const std::vector<RingExtract>& rings, double L) {
  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << -L << ' ' << -L << ' ' << 2 * L << ' ' << 2 * L
     << "\" width=\"600\" height=\"600\">\n";
  os << "<rect x=\"" << -L << "\" y=\"" << -L << "\" width=\"" << 2 * L << "\" height=\"" << 2 * L
     << "\" fill=\"white\" stroke=\"black\" stroke-width=\"" << L / 300 << "\"/>\n";
  for (std::size_t k = 0; k < rings.size(); ++k) {
    const auto& r = rings[k];
    os << "<polygon fill=\"none\" stroke=\"hsl(" << (240 * k) / std::max<std::size_t>(1, rings.size() - 1)
       << ",70%,40%)\" stroke-width=\"" << L / 200 << "\" points=\"";
    for (std::size_t d = 0; d < r.xi.size(); ++d)
      os << r.xi[d] * std::cos(r.angles[d]) << ',' << -r.xi[d] * std::sin(r.angles[d]) << ' ';
    os << "\"><title>t=" << r.t << ", level " << r.level << "</title></polygon>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace terracelab

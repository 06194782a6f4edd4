#include "terracelab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "terracelab/errors.hpp"

namespace terracelab {

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Fritsch-Carlson slopes with the harmonic-mean interior rule.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
    return d;
  }
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (sign_of(s) != sign_of(d0)) {
      s = 0.0;
    } else if (sign_of(d0) != sign_of(d1) && std::abs(s) > std::abs(3.0 * d0)) {
      s = 3.0 * d0;
    }
    return s;
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

}  // namespace

ReactionTerm ReactionTerm::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw ConfigError("polynomial needs at least one coefficient");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw ConfigError("polynomial coefficient is not finite");
  ReactionTerm t;
  t.kind_ = Kind::Polynomial;
  t.coeffs_ = std::move(coeffs);
  return t;
}

ReactionTerm ReactionTerm::nodes(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw ConfigError("node interpolant needs at least two points");
  std::sort(points.begin(), points.end());
  ReactionTerm t;
  t.kind_ = Kind::Nodes;
  for (const auto& [u, f] : points) {
    if (!std::isfinite(u) || !std::isfinite(f)) throw ConfigError("node point is not finite");
    if (!t.nodes_u_.empty() && !(u > t.nodes_u_.back()))
      throw ConfigError("node abscissae must be distinct");
    t.nodes_u_.push_back(u);
    t.nodes_f_.push_back(f);
  }
  t.slopes_ = pchip_slopes(t.nodes_u_, t.nodes_f_);
  return t;
}

FValue ReactionTerm::eval(double u) const noexcept {
  if (kind_ == Kind::Polynomial) {
    double v = 0.0, d = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 0;) {
      d = d * u + v;
      v = v * u + coeffs_[k];
    }
    return {v, d};
  }
  const std::size_t n = nodes_u_.size();
  if (u <= nodes_u_.front())
    return {nodes_f_.front() + slopes_.front() * (u - nodes_u_.front()), slopes_.front()};
  if (u >= nodes_u_.back())
    return {nodes_f_.back() + slopes_.back() * (u - nodes_u_.back()), slopes_.back()};
  const auto it = std::upper_bound(nodes_u_.begin(), nodes_u_.end(), u);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - nodes_u_.begin()) - 1, n - 2);
  const double h = nodes_u_[i + 1] - nodes_u_[i];
  const double s = (u - nodes_u_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  const double v = h00 * nodes_f_[i] + h10 * h * slopes_[i] + h01 * nodes_f_[i + 1] +
                   h11 * h * slopes_[i + 1];
  const double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1;
  const double d01 = -6 * s2 + 6 * s, d11 = 3 * s2 - 2 * s;
  const double d = (d00 * nodes_f_[i] + d01 * nodes_f_[i + 1]) / h + d10 * slopes_[i] +
                   d11 * slopes_[i + 1];
  return {v, d};
}

double ReactionTerm::value(double u) const noexcept {
  if (kind_ == Kind::Polynomial) {
    double v = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 0;) v = v * u + coeffs_[k];
    return v;
  }
  return eval(u).value;
}

double ReactionTerm::poly_antiderivative(double u) const noexcept {
  double v = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 0;) v = v * u + coeffs_[k] / static_cast<double>(k + 1);
  return v * u;
}

double ReactionTerm::hermite_piece_integral(std::size_t, double a, double b) const noexcept {
  // Each piece (and each linear tail) is at most cubic, so Simpson is exact.
  return (b - a) / 6.0 * (value(a) + 4.0 * value(0.5 * (a + b)) + value(b));
}

double ReactionTerm::integral(double a, double b) const {
  if (kind_ == Kind::Polynomial) return poly_antiderivative(b) - poly_antiderivative(a);
  if (a == b) return 0.0;
  if (a > b) return -integral(b, a);
  std::vector<double> breaks{a};
  for (double x : nodes_u_)
    if (x > a && x < b) breaks.push_back(x);
  breaks.push_back(b);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    sum += hermite_piece_integral(i, breaks[i], breaks[i + 1]);
  return sum;
}

std::string ReactionTerm::canonical() const {
  std::string s;
  if (kind_ == Kind::Polynomial) {
    s = "poly[";
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (i) s += ",";
      s += format_double(coeffs_[i]);
    }
  } else {
    s = "nodes[";
    for (std::size_t i = 0; i < nodes_u_.size(); ++i) {
      if (i) s += ",";
      s += "(" + format_double(nodes_u_[i]) + "," + format_double(nodes_f_[i]) + ")";
    }
  }
  return s + "]";
}

std::vector<Zero> find_zeros(const ReactionTerm& f, Interval interval, const ZeroSearchOptions& opts) {
  if (!(interval.hi > interval.lo)) throw DomainError("empty search interval");
  if (opts.scan_points < 3) throw DomainError("scan grid needs at least 3 points");

  const int n = opts.scan_points;
  const double h = (interval.hi - interval.lo) / (n - 1);
  std::vector<double> xs(n), fs(n), ds(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = (i == n - 1) ? interval.hi : interval.lo + i * h;
    const FValue e = f.eval(xs[i]);
    fs[i] = e.value;
    ds[i] = e.derivative;
  }

  std::vector<double> roots;
  auto refine = [&](double a, double b) {
    double fa = f.value(a);
    for (int it = 0; it < 200 && b - a > 4 * std::numeric_limits<double>::epsilon() * (1 + std::abs(a)); ++it) {
      const double m = 0.5 * (a + b);
      const double fm = f.value(m);
      if (fm == 0.0) return m;
      if (sign_of(fm) == sign_of(fa)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    double x = 0.5 * (a + b);
    for (int it = 0; it < 3; ++it) {
      const FValue e = f.eval(x);
      if (e.derivative == 0.0) break;
      const double nx = x - e.value / e.derivative;
      if (nx < a || nx > b) break;
      x = nx;
    }
    return x;
  };

  for (int i = 0; i < n; ++i) {
    if (fs[i] == 0.0) roots.push_back(xs[i]);
    if (i + 1 == n) break;
    const int sa = sign_of(fs[i]), sb = sign_of(fs[i + 1]);
    if (sa * sb < 0) roots.push_back(refine(xs[i], xs[i + 1]));
    // A turning point inside the cell can hide a root pair or a double root.
    if (sign_of(ds[i]) * sign_of(ds[i + 1]) < 0) {
      double a = xs[i], b = xs[i + 1];
      const int sda = sign_of(ds[i]);
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        if (sign_of(f.eval(m).derivative) == sda) a = m; else b = m;
      }
      const double xc = 0.5 * (a + b);
      const double fc = f.value(xc);
      if (std::abs(fc) <= opts.tol_zero) {
        throw DegenerateZeroError("zero at u=" + format_double(xc) + " has f'(u)~0 (tangential root)");
      }
      if (sa != 0 && sa == sb && sign_of(fc) == -sa) {
        throw ResolutionError("two roots inside scan cell [" + format_double(xs[i]) + ", " +
                              format_double(xs[i + 1]) + "]; use a finer scan grid");
      }
    }
  }

  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
              roots.end());

  std::vector<Zero> zeros;
  zeros.reserve(roots.size());
  for (double r : roots) {
    const FValue e = f.eval(r);
    if (std::abs(e.value) > opts.tol_zero) {
      throw ResolutionError("root near u=" + format_double(r) + " could not be refined to |f| <= tol_zero");
    }
    if (std::abs(e.derivative) < opts.tol_nondegen) {
      throw DegenerateZeroError("zero at u=" + format_double(r) + " has |f'|=" + format_double(std::abs(e.derivative)) +
                                " < tol_nondegen");
    }
    zeros.push_back({r, e.derivative, e.derivative < 0.0 ? Stability::Stable : Stability::Unstable});
  }
  return zeros;
}

Nonlinearity::Nonlinearity(ReactionTerm term, Interval search, const ZeroSearchOptions& opts)
    : term_(std::move(term)), search_(search), opts_(opts) {
  zeros_ = find_zeros(term_, search_, opts_);

  const Zero* top = nullptr;
  for (const Zero& z : zeros_)
    if (z.stability == Stability::Stable && z.location > 1e-9) top = &z;
  if (!top) return;

  Landmarks lm;
  lm.p = top->location;
  const auto unstable = zeros_in(0.0, lm.p, Stability::Unstable);
  if (unstable.empty()) return;
  lm.b_star = unstable.front();
  lm.b_star_upper = unstable.back();

  double below = search_.lo;
  bool zero_below = false;
  for (const Zero& z : zeros_)
    if (z.location < -1e-9) {
      below = z.location;
      zero_below = true;
    }
  lm.delta1 = zero_below ? 0.5 * (0.0 - below) : (0.0 - search_.lo);

  lm.delta2 = std::numeric_limits<double>::infinity();
  for (const Zero& z : zeros_)
    if (z.location > lm.p + 1e-9) {
      lm.delta2 = 0.5 * (z.location - lm.p);
      break;
    }
  if (std::isinf(lm.delta2)) {
    // No zero above p in the scan; confirm f < 0 on every sample of (p, hi].
    const int n = opts_.scan_points;
    for (int i = 1; i <= n; ++i) {
      const double u = lm.p + (search_.hi - lm.p) * i / n;
      if (!(term_.value(u) < 0.0)) {
        lm.delta2 = 0.5 * (u - lm.p);
        break;
      }
    }
  }
  landmarks_ = lm;
}

FValue Nonlinearity::evaluate(double u) const {
  if (!(u >= search_.lo - 1.0 && u <= search_.hi + 1.0)) {
    throw RangeError("u=" + format_double(u) + " outside evaluation range [" +
                     format_double(search_.lo - 1.0) + ", " + format_double(search_.hi + 1.0) + "]");
  }
  return term_.eval(u);
}

std::vector<double> Nonlinearity::zeros_in(double lo, double hi, Stability s) const {
  std::vector<double> out;
  for (const Zero& z : zeros_)
    if (z.stability == s && z.location >= lo - 1e-9 && z.location <= hi + 1e-9) out.push_back(z.location);
  return out;
}

std::vector<double> Nonlinearity::all_zero_locations_in(double lo, double hi) const {
  std::vector<double> out;
  for (const Zero& z : zeros_)
    if (z.location >= lo - 1e-9 && z.location <= hi + 1e-9) out.push_back(z.location);
  return out;
}

bool Nonlinearity::is_stable_zero(double u, double tol) const {
  for (const Zero& z : zeros_)
    if (z.stability == Stability::Stable && std::abs(z.location - u) <= tol) return true;
  return false;
}

const Landmarks& Nonlinearity::require_landmarks() const {
  if (!landmarks_) throw PreconditionError("f has no positive stable zero p with an unstable zero in (0, p)");
  return *landmarks_;
}

double Nonlinearity::max_abs_derivative(double lo, double hi, int samples) const {
  double m = 0.0;
  for (int i = 0; i < samples; ++i)
    m = std::max(m, std::abs(derivative(lo + (hi - lo) * i / (samples - 1))));
  return m;
}

double Nonlinearity::max_derivative(double lo, double hi, int samples) const {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) m = std::max(m, derivative(lo + (hi - lo) * i / (samples - 1)));
  return m;
}

double Nonlinearity::min_derivative(double lo, double hi, int samples) const {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) m = std::min(m, derivative(lo + (hi - lo) * i / (samples - 1)));
  return m;
}

EnergyCondition energy_condition(const Nonlinearity& f, double q_bot, double q_top) {
  if (!(q_bot < q_top)) throw DomainError("energy condition needs q_bot < q_top");
  if (!f.is_stable_zero(q_bot) || !f.is_stable_zero(q_top))
    throw DomainError("energy condition endpoints must be stable zeros of f");
  const double top = f.integral(q_bot, q_top);
  // F' = f, so the sup of F over [q_bot, q_top) sits at a zero of f (q_bot included).
  double sup_interior = 0.0;
  for (double z : f.all_zero_locations_in(q_bot, q_top))
    if (z < q_top - 1e-9) sup_interior = std::max(sup_interior, f.integral(q_bot, z));
  const double margin = top - sup_interior;
  const double scale = std::max(1.0, std::abs(top)) * 1e-14;
  return {margin > scale, std::abs(margin) <= scale ? 0.0 : margin};
}

AssumptionReport check_assumptions(const Nonlinearity& f) {
  AssumptionReport rep;
  rep.zeros = f.zeros();
  rep.tol_nondegen = f.zero_options().tol_nondegen;
  rep.min_abs_zero_derivative = std::numeric_limits<double>::infinity();
  for (const Zero& z : f.zeros()) rep.min_abs_zero_derivative = std::min(rep.min_abs_zero_derivative, std::abs(z.derivative));
  rep.f1 = rep.min_abs_zero_derivative >= rep.tol_nondegen;
  if (!rep.f1) rep.messages.push_back("(f1) a zero is degenerate under tol_nondegen");

  const FValue at0 = f.term().eval(0.0);
  rep.f2 = std::abs(at0.value) <= f.zero_options().tol_zero && at0.derivative < 0.0;
  if (!rep.f2) rep.messages.push_back("(f2) requires f(0)=0 and f'(0)<0");

  rep.landmarks = f.landmarks();
  if (!rep.landmarks) {
    rep.f3 = false;
    rep.messages.push_back("(f3) no positive stable zero p with an unstable zero below it");
  } else {
    if (rep.f2) {
      rep.gamma = energy_condition(f, 0.0, rep.landmarks->p);
      rep.f3 = rep.gamma->holds;
      if (!rep.f3) rep.messages.push_back("(f3) energy condition fails on [0, p]");
    } else {
      rep.f3 = false;
      rep.messages.push_back("(f3) not evaluated: 0 is not a stable zero");
    }
    if (!(rep.landmarks->delta1 > 0.0)) {
      rep.f2 = false;
      rep.messages.push_back("search interval must extend below 0 to measure delta1");
    }
  }
  return rep;
}

AssumptionReport check_assumptions(const ReactionTerm& term, Interval search, const ZeroSearchOptions& opts) {
  try {
    return check_assumptions(Nonlinearity(term, search, opts));
  } catch (const DegenerateZeroError& e) {
    AssumptionReport rep;
    rep.tol_nondegen = opts.tol_nondegen;
    rep.messages.push_back(std::string("(f1) ") + e.what());
    return rep;
  }
}

}  // namespace terracelab

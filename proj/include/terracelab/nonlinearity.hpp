#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace terracelab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct FValue {
  double value = 0.0;
  double derivative = 0.0;
};

// Evaluable reaction term f: either a polynomial in ascending coefficients or a
// monotone (Fritsch-Carlson) cubic Hermite interpolant through (u, f) nodes.
// Beyond the outer nodes the interpolant continues linearly with the end slope.
class ReactionTerm {
 public:
  enum class Kind { Polynomial, Nodes };

  static ReactionTerm polynomial(std::vector<double> coeffs);
  static ReactionTerm nodes(std::vector<std::pair<double, double>> points);

  Kind kind() const noexcept { return kind_; }

  double value(double u) const noexcept;
  FValue eval(double u) const noexcept;

  // Exact integral of f over [a, b] (Simpson is exact on each cubic piece).
  double integral(double a, double b) const;

  // Ascending coefficients; empty for node interpolants.
  std::span<const double> coefficients() const noexcept { return coeffs_; }

  // Stable textual form used for hashing and reports.
  std::string canonical() const;

 private:
  Kind kind_ = Kind::Polynomial;
  std::vector<double> coeffs_;
  std::vector<double> nodes_u_, nodes_f_, slopes_;

  double poly_antiderivative(double u) const noexcept;
  double hermite_piece_integral(std::size_t i, double a, double b) const noexcept;
};

enum class Stability { Stable, Unstable };

struct Zero {
  double location = 0.0;
  double derivative = 0.0;
  Stability stability = Stability::Stable;
};

struct ZeroSearchOptions {
  int scan_points = 10000;
  double tol_zero = 1e-12;
  double tol_nondegen = 1e-6;
};

// Sign-change roots of f on `interval`, refined by bisection and a Newton polish.
// Throws DegenerateZeroError if a root has |f'| < tol_nondegen and ResolutionError
// if two roots share a scan cell.
std::vector<Zero> find_zeros(const ReactionTerm& f, Interval interval,
                             const ZeroSearchOptions& opts = {});

// Structural constants of a multistable f on [0, p].
struct Landmarks {
  double p = 0.0;             // top stable zero
  double delta1 = 0.0;        // f > 0 on [-delta1, 0)
  double delta2 = 0.0;        // f < 0 on (p, p + delta2]; +inf when f < 0 for all sampled u > p
  double b_star = 0.0;        // smallest unstable zero in [0, p]
  double b_star_upper = 0.0;  // largest unstable zero in [0, p]
};

class Nonlinearity {
 public:
  Nonlinearity(ReactionTerm term, Interval search, const ZeroSearchOptions& opts = {});

  // Range-checked evaluation on [lo - 1, hi + 1].
  FValue evaluate(double u) const;

  double value(double u) const noexcept { return term_.value(u); }
  double derivative(double u) const noexcept { return term_.eval(u).derivative; }
  double integral(double a, double b) const { return term_.integral(a, b); }

  const ReactionTerm& term() const noexcept { return term_; }
  Interval search_interval() const noexcept { return search_; }
  const ZeroSearchOptions& zero_options() const noexcept { return opts_; }
  const std::vector<Zero>& zeros() const noexcept { return zeros_; }

  // Zeros of the given stability in [lo, hi], ascending.
  std::vector<double> zeros_in(double lo, double hi, Stability s) const;
  std::vector<double> all_zero_locations_in(double lo, double hi) const;
  bool is_stable_zero(double u, double tol = 1e-9) const;

  const std::optional<Landmarks>& landmarks() const noexcept { return landmarks_; }
  // Throws PreconditionError when f has no positive stable zero.
  const Landmarks& require_landmarks() const;

  // sup |f'| over [lo, hi] by dense sampling.
  double max_abs_derivative(double lo, double hi, int samples = 4001) const;
  double max_derivative(double lo, double hi, int samples = 4001) const;
  double min_derivative(double lo, double hi, int samples = 4001) const;

 private:
  ReactionTerm term_;
  Interval search_;
  ZeroSearchOptions opts_;
  std::vector<Zero> zeros_;
  std::optional<Landmarks> landmarks_;
};

struct EnergyCondition {
  bool holds = false;
  double margin = 0.0;  // F(q_top) - max F over zeros of f in [q_bot, q_top)
};

// Checks F(q_top) > F(u) on [q_bot, q_top) with F(u) = integral of f from q_bot.
EnergyCondition energy_condition(const Nonlinearity& f, double q_bot, double q_top);

struct AssumptionReport {
  bool f1 = false;  // every zero nondegenerate
  bool f2 = false;  // f(0) = 0 > f'(0)
  bool f3 = false;  // top stable zero p with the energy condition on [0, p]
  std::optional<Landmarks> landmarks;
  std::optional<EnergyCondition> gamma;
  double min_abs_zero_derivative = 0.0;
  double tol_nondegen = 0.0;
  std::vector<Zero> zeros;
  std::vector<std::string> messages;

  bool all_pass() const noexcept { return f1 && f2 && f3; }
};

AssumptionReport check_assumptions(const Nonlinearity& f);
// Same, but starting from a raw term so degenerate zeros are reported instead of thrown.
AssumptionReport check_assumptions(const ReactionTerm& term, Interval search,
                                   const ZeroSearchOptions& opts = {});

}  // namespace terracelab

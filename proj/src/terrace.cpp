#include "terracelab/terrace.hpp"

#include <algorithm>
#include <sstream>

#include "terracelab/errors.hpp"
#include "terracelab/parallel.hpp"

namespace terracelab {

namespace {

PairEntry attempt(const Nonlinearity& f, double q_top, double q_bot, const FrontOptions& fo) {
  PairEntry e;
  e.q_top = q_top;
  e.q_bot = q_bot;
  const auto ec = energy_condition(f, q_bot, q_top);
  e.energy_holds = ec.holds;
  e.energy_margin = ec.margin;
  e.connection = q_bot;
  if (!ec.holds) return e;
  e.profile = find_front(f, q_top, q_bot, fo, &e.connection);
  if (e.profile) {
    e.has_front = true;
    e.c = e.profile->c;
  }
  return e;
}

std::string describe_pairs(const std::vector<PairEntry>& table) {
  std::ostringstream os;
  for (const auto& e : table) {
    os << "\n  " << e.q_top << " -> " << e.q_bot << ": energy " << (e.energy_holds ? "ok" : "fails");
    if (e.has_front) os << ", front c=" << e.c;
    else if (e.energy_holds) os << ", no direct front (reaches " << e.connection << ")";
  }
  return os.str();
}

std::string describe_chain(const std::vector<std::size_t>& chain, const std::vector<double>& s) {
  std::ostringstream os;
  for (std::size_t k = 0; k < chain.size(); ++k) os << (k ? " > " : "") << s[chain[k]];
  return os.str();
}

}  // namespace

Terrace decompose(const Nonlinearity& f, const TerraceOptions& opts) {
  const Landmarks& lm = f.require_landmarks();
  if (!f.is_stable_zero(0.0)) throw PreconditionError("0 must be a stable zero");
  // Stable zeros in [0, p], descending.
  std::vector<double> s = f.zeros_in(0.0, lm.p, Stability::Stable);
  std::reverse(s.begin(), s.end());
  const std::size_t m = s.size();
  if (m < 2) throw PreconditionError("need at least two stable zeros in [0, p]");

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  std::vector<PairEntry> table(pairs.size());
  parallel_for(pairs.size(), opts.workers, [&](std::size_t k) {
    table[k] = attempt(f, s[pairs[k].first], s[pairs[k].second], opts.front);
  });
  auto entry = [&](std::size_t i, std::size_t j) -> const PairEntry& {
    const auto it = std::find(pairs.begin(), pairs.end(), std::make_pair(i, j));
    return table[static_cast<std::size_t>(it - pairs.begin())];
  };

  // Every chain s[0] > ... > s[m-1] is a subset of the interior zeros.
  std::vector<std::vector<std::size_t>> admissible;
  const std::size_t interior = m - 2;
  for (std::size_t mask = 0; mask < (std::size_t{1} << interior); ++mask) {
    std::vector<std::size_t> chain{0};
    for (std::size_t b = 0; b < interior; ++b)
      if (mask & (std::size_t{1} << b)) chain.push_back(b + 1);
    chain.push_back(m - 1);
    bool ok = true;
    double prev = -1.0;
    for (std::size_t k = 0; ok && k + 1 < chain.size(); ++k) {
      const PairEntry& e = entry(chain[k], chain[k + 1]);
      ok = e.has_front && e.c > 0.0 && e.c >= prev - opts.tol_speed;
      prev = e.c;
    }
    if (ok) admissible.push_back(std::move(chain));
  }

  if (admissible.empty())
    throw DecompositionFailure("no admissible chain of fronts from p to 0; pair table:" + describe_pairs(table));
  if (admissible.size() > 1)
    throw AmbiguityError("several admissible chains (numerical speed tie?): " + describe_chain(admissible[0], s) +
                         " and " + describe_chain(admissible[1], s) + "; pair table:" + describe_pairs(table));

  Terrace t;
  const auto& chain = admissible.front();
  for (std::size_t k = 0; k < chain.size(); ++k) t.floors.push_back(s[chain[k]]);
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    const PairEntry& e = entry(chain[k], chain[k + 1]);
    t.waves.push_back(*e.profile);
    t.speeds.push_back(e.c);
  }
  t.pair_table = std::move(table);
  return t;
}

OrderReport speed_order_check(const Nonlinearity& f, double q_top, double q_mid, double q_bot,
                              const TerraceOptions& opts) {
  if (!(q_top > q_mid && q_mid > q_bot)) throw DomainError("need q_top > q_mid > q_bot");
  for (double q : {q_top, q_mid, q_bot})
    if (!f.is_stable_zero(q)) throw DomainError("speed ordering needs three stable zeros");

  const std::pair<double, double> legs[3] = {{q_top, q_bot}, {q_top, q_mid}, {q_mid, q_bot}};
  PairEntry results[3];
  parallel_for(3, opts.workers, [&](std::size_t k) { results[k] = attempt(f, legs[k].first, legs[k].second, opts.front); });
  if (!results[0].has_front) throw PreconditionError("no direct front from q_top to q_bot");

  OrderReport r;
  r.c = results[0].c;
  if (results[1].has_front) {
    r.c_top = results[1].c;
    if (!(*r.c_top > r.c - opts.tol_speed)) {
      r.pass = false;
      r.messages.push_back("upper front not faster than direct front");
    }
  }
  if (results[2].has_front) {
    r.c_bot = results[2].c;
    if (!(*r.c_bot < r.c + opts.tol_speed)) {
      r.pass = false;
      r.messages.push_back("lower front not slower than direct front");
    }
  }
  if (!r.c_top && !r.c_bot) r.messages.push_back("only the direct front exists; ordering vacuous");
  return r;
}

}  // namespace terracelab

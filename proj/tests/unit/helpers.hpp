#pragma once

#include <cmath>
#include <vector>

#include "terracelab/nonlinearity.hpp"

namespace testing_support {

// k u (1 - u)(u - a) in ascending coefficients: front 1 -> 0 has speed sqrt(k/2)(1 - 2a).
inline terracelab::ReactionTerm cubic(double a, double k = 1.0) {
  return terracelab::ReactionTerm::polynomial({0.0, -k * a, k * (1.0 + a), -k});
}

// -8 u (u - a)(u - 1/2)(u - b)(u - 1).
inline terracelab::ReactionTerm quintic(double a, double b) {
  std::vector<double> p{-8.0};
  for (double root : {0.0, a, 0.5, b, 1.0}) {
    std::vector<double> q(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i + 1] += p[i];
      q[i] -= root * p[i];
    }
    p = q;
  }
  return terracelab::ReactionTerm::polynomial(p);
}

inline terracelab::Nonlinearity make(const terracelab::ReactionTerm& t) {
  return terracelab::Nonlinearity(t, {-0.5, 1.5});
}

}  // namespace testing_support

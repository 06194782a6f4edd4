#pragma once

// Method-of-lines operator shared by the radial solver and its analytics.

#include <vector>

#include "terracelab/kernels.hpp"
#include "terracelab/nonlinearity.hpp"
#include "terracelab/radial_pde.hpp"

namespace terracelab::detail {

class RadialOperator {
 public:
  RadialOperator(const Nonlinearity& f, const RadialGrid& grid);

  std::size_t size() const noexcept { return n_; }

  // out = L_h u + f(u); the last node follows the reaction ODE u_t = f(u).
  void apply(const kernels::Table& k, const double* u, double* out) const;
  // Diffusion part only (no reaction), same boundary conventions with f = 0.
  void apply_diffusion(const kernels::Table& k, const double* u, double* out) const;
  double reaction(double u) const { return f_.value(u); }

  // Tridiagonal rows of L_h: sub, diag, super (sub[0], super[n-1] unused).
  const std::vector<double>& sub() const noexcept { return sub_; }
  const std::vector<double>& diag() const noexcept { return diag_; }
  const std::vector<double>& super() const noexcept { return super_; }

 private:
  const Nonlinearity& f_;
  std::size_t n_;
  double origin_;  // 2N/dr^2
  double centre_;  // -2/dr^2
  std::vector<double> lo_, hi_;
  std::vector<double> sub_, diag_, super_;
  kernels::Poly poly_;
};

}  // namespace terracelab::detail

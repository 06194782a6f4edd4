#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace terracelab::kernels {

// Polynomial reaction for the fused stencil kernels. degree < 0 means "no
// reaction term" (the caller adds a non-polynomial f itself).
struct Poly {
  const double* coeffs = nullptr;  // ascending
  int degree = -1;
};

// out[i] = ((lo[i]*u[i-1] + diag*u[i]) + hi[i]*u[i+1]) + P(u[i]),  i in [begin, end)
using RadialRhsFn = void (*)(const double* u, const double* lo, const double* hi, double diag, Poly f,
                             double* out, std::size_t begin, std::size_t end);

// out[i] = (((n[i] + s[i]) + (row[i-1] + row[i+1])) - 4*row[i]) * inv_h2 + P(row[i]),  i in [1, len-1)
using Lap2dRowFn = void (*)(const double* n, const double* row, const double* s, double inv_h2, Poly f,
                            double* out, std::size_t len);

// out[i] = x[i] + a*y[i]
using AxpyFn = void (*)(const double* x, double a, const double* y, double* out, std::size_t len);

// out[i] = u[i] + h6*(((k1[i] + 2*k2[i]) + 2*k3[i]) + k4[i])
using Rk4CombineFn = void (*)(const double* u, const double* k1, const double* k2, const double* k3,
                              const double* k4, double h6, double* out, std::size_t len);

enum class Isa { Scalar, Avx2 };

struct Table {
  Isa isa;
  RadialRhsFn radial_rhs;
  Lap2dRowFn lap2d_row;
  AxpyFn axpy;
  Rk4CombineFn rk4_combine;
};

const Table& scalar_table();
// nullptr when the build or the CPU lacks AVX2.
const Table* avx2_table();

// Best table for this CPU, unless forced via force_isa() or TERRACELAB_ISA=scalar|avx2.
const Table& active();
void force_isa(std::optional<Isa> isa);
std::string_view isa_name(Isa isa);

// Scalar Horner evaluation; the vector kernels use the identical operation order.
inline double horner(Poly f, double u) {
  double p = f.coeffs[f.degree];
  for (int k = f.degree - 1; k >= 0; --k) p = p * u + f.coeffs[k];
  return p;
}

}  // namespace terracelab::kernels

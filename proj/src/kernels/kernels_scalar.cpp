#include "terracelab/kernels.hpp"

namespace terracelab::kernels {

namespace {

void radial_rhs(const double* u, const double* lo, const double* hi, double diag, Poly f, double* out,
                std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    double v = (lo[i] * u[i - 1] + diag * u[i]) + hi[i] * u[i + 1];
    if (f.degree >= 0) v += horner(f, u[i]);
    out[i] = v;
  }
}

void lap2d_row(const double* n, const double* row, const double* s, double inv_h2, Poly f, double* out,
               std::size_t len) {
  for (std::size_t i = 1; i + 1 < len; ++i) {
    double v = (((n[i] + s[i]) + (row[i - 1] + row[i + 1])) - 4.0 * row[i]) * inv_h2;
    if (f.degree >= 0) v += horner(f, row[i]);
    out[i] = v;
  }
}

void axpy(const double* x, double a, const double* y, double* out, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) out[i] = x[i] + a * y[i];
}

void rk4_combine(const double* u, const double* k1, const double* k2, const double* k3, const double* k4,
                 double h6, double* out, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) out[i] = u[i] + h6 * (((k1[i] + 2.0 * k2[i]) + 2.0 * k3[i]) + k4[i]);
}

}  // namespace

const Table& scalar_table() {
  static const Table t{Isa::Scalar, radial_rhs, lap2d_row, axpy, rk4_combine};
  return t;
}

}  // namespace terracelab::kernels

// Compiled with -mavx2 only (no FMA) so results match the scalar kernels bit for bit.
#include <immintrin.h>

#include "terracelab/kernels.hpp"

namespace terracelab::kernels {

namespace {

inline __m256d horner4(Poly f, __m256d u) {
  __m256d p = _mm256_set1_pd(f.coeffs[f.degree]);
  for (int k = f.degree - 1; k >= 0; --k) p = _mm256_add_pd(_mm256_mul_pd(p, u), _mm256_set1_pd(f.coeffs[k]));
  return p;
}

void radial_rhs(const double* u, const double* lo, const double* hi, double diag, Poly f, double* out,
                std::size_t begin, std::size_t end) {
  const __m256d d = _mm256_set1_pd(diag);
  std::size_t i = begin;
  for (; i + 4 <= end; i += 4) {
    const __m256d um = _mm256_loadu_pd(u + i - 1);
    const __m256d uc = _mm256_loadu_pd(u + i);
    const __m256d up = _mm256_loadu_pd(u + i + 1);
    __m256d v = _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(lo + i), um), _mm256_mul_pd(d, uc));
    v = _mm256_add_pd(v, _mm256_mul_pd(_mm256_loadu_pd(hi + i), up));
    if (f.degree >= 0) v = _mm256_add_pd(v, horner4(f, uc));
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < end; ++i) {
    double v = (lo[i] * u[i - 1] + diag * u[i]) + hi[i] * u[i + 1];
    if (f.degree >= 0) v += horner(f, u[i]);
    out[i] = v;
  }
}

void lap2d_row(const double* n, const double* row, const double* s, double inv_h2, Poly f, double* out,
               std::size_t len) {
  const __m256d four = _mm256_set1_pd(4.0), ih = _mm256_set1_pd(inv_h2);
  std::size_t i = 1;
  for (; i + 4 < len; i += 4) {
    const __m256d c = _mm256_loadu_pd(row + i);
    const __m256d ns = _mm256_add_pd(_mm256_loadu_pd(n + i), _mm256_loadu_pd(s + i));
    const __m256d we = _mm256_add_pd(_mm256_loadu_pd(row + i - 1), _mm256_loadu_pd(row + i + 1));
    __m256d v = _mm256_mul_pd(_mm256_sub_pd(_mm256_add_pd(ns, we), _mm256_mul_pd(four, c)), ih);
    if (f.degree >= 0) v = _mm256_add_pd(v, horner4(f, c));
    _mm256_storeu_pd(out + i, v);
  }
  for (; i + 1 < len; ++i) {
    double v = (((n[i] + s[i]) + (row[i - 1] + row[i + 1])) - 4.0 * row[i]) * inv_h2;
    if (f.degree >= 0) v += horner(f, row[i]);
    out[i] = v;
  }
}

void axpy(const double* x, double a, const double* y, double* out, std::size_t len) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4)
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(av, _mm256_loadu_pd(y + i))));
  for (; i < len; ++i) out[i] = x[i] + a * y[i];
}

void rk4_combine(const double* u, const double* k1, const double* k2, const double* k3, const double* k4,
                 double h6, double* out, std::size_t len) {
  const __m256d two = _mm256_set1_pd(2.0), hv = _mm256_set1_pd(h6);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d s = _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_mul_pd(two, _mm256_loadu_pd(k2 + i)));
    s = _mm256_add_pd(s, _mm256_mul_pd(two, _mm256_loadu_pd(k3 + i)));
    s = _mm256_add_pd(s, _mm256_loadu_pd(k4 + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(u + i), _mm256_mul_pd(hv, s)));
  }
  for (; i < len; ++i) out[i] = u[i] + h6 * (((k1[i] + 2.0 * k2[i]) + 2.0 * k3[i]) + k4[i]);
}

}  // namespace

const Table& avx2_table_impl() {
  static const Table t{Isa::Avx2, radial_rhs, lap2d_row, axpy, rk4_combine};
  return t;
}

}  // namespace terracelab::kernels

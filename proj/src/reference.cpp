#include "cwl/kernels.hpp"

#include <cmath>

namespace cwl::ref {

double weighted_power_sum(const double* power, std::size_t n1, std::size_t n2, std::size_t nh, const double* e1,
                          const double* e2, const double* e3, const double* f1, const double* f2, const double* f3,
                          double s) {
  double acc = 0;
  for (std::size_t i = 0; i < n1; ++i) {
    double part = 0;
    for (std::size_t j = 0; j < n2; ++j) {
      const double* row = power + (i * n2 + j) * nh;
      const double w12 = e1[i] * e2[j];
      const double r12 = f1[i] * f1[i] + f2[j] * f2[j];
      if (s == 0) {
        for (std::size_t k = 0; k < nh; ++k) part += row[k] * w12 * e3[k];
      } else {
        for (std::size_t k = 0; k < nh; ++k) part += row[k] * w12 * e3[k] * std::pow(1 + r12 + f3[k] * f3[k], s);
      }
    }
    acc += part;
  }
  return acc;
}

void wave_propagate(cplx* uh, cplx* uth, const double* c, const double* sk, const double* ks, std::size_t n) {
  for (std::size_t q = 0; q < n; ++q) {
    cplx u = uh[q], v = uth[q];
    uh[q] = c[q] * u + sk[q] * v;
    uth[q] = -ks[q] * u + c[q] * v;
  }
}

void poly_source(const double* u, const double* z, const double* a, int degree, double* out, std::size_t n) {
  for (std::size_t q = 0; q < n; ++q) {
    if (z[q] == 0) {
      out[q] = 0;
      continue;
    }
    double acc = a[degree];
    for (int j = degree - 1; j >= 0; --j) acc = acc * u[q] + a[j];
    out[q] = z[q] * acc;
  }
}

void filtered_kick(cplx* uth, const cplx* F, const double* filt, double scale, std::size_t n) {
  for (std::size_t q = 0; q < n; ++q) uth[q] += (scale * filt[q]) * F[q];
}

void add_spectra(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t q = 0; q < n; ++q) out[q] = a[q] + b[q];
}

}  // namespace cwl::ref

#pragma once

#include <cstddef>

#include "cwl/spectral.hpp"

// Hot loops. cwl::kernels uses OpenMP; cwl::ref holds serial references with
// identical semantics used by tests and the benchmark.
namespace cwl {

#define CWL_KERNEL_DECLS                                                                                  \
  /* sum over the half lattice of power * e1*e2*e3 * (1+|eta|^2)^s */                                    \
  double weighted_power_sum(const double* power, std::size_t n1, std::size_t n2, std::size_t nh,          \
                            const double* e1, const double* e2, const double* e3, const double* f1,       \
                            const double* f2, const double* f3, double s);                                \
  /* exact wave multiplier: uh <- c uh + sk uth, uth <- -ks uh + c uth */                                 \
  void wave_propagate(cplx* uh, cplx* uth, const double* c, const double* sk, const double* ks,           \
                      std::size_t n);                                                                      \
  /* out = z * sum_j a[j] u^j */                                                                           \
  void poly_source(const double* u, const double* z, const double* a, int degree, double* out,            \
                   std::size_t n);                                                                         \
  /* uth += scale * filt * F */                                                                            \
  void filtered_kick(cplx* uth, const cplx* F, const double* filt, double scale, std::size_t n);          \
  /* out = a + b */                                                                                        \
  void add_spectra(const cplx* a, const cplx* b, cplx* out, std::size_t n);

namespace kernels {
CWL_KERNEL_DECLS
}
namespace ref {
CWL_KERNEL_DECLS
}

#undef CWL_KERNEL_DECLS

}  // namespace cwl

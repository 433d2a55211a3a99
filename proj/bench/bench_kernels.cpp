// OpenMP kernels against their serial references. Arg is the number of complex modes.
#include <benchmark/benchmark.h>

#include <random>

#include "cwl/kernels.hpp"

using namespace cwl;

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed, double lo = -1, double hi = 1) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = U(rng);
  return v;
}

std::vector<cplx> random_cvec(std::size_t n, unsigned seed) {
  auto re = random_vec(n, seed), im = random_vec(n, seed + 1);
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = {re[i], im[i]};
  return v;
}

template <bool Par>
void BM_wave_propagate(benchmark::State& st) {
  const std::size_t n = st.range(0);
  auto a = random_cvec(n, 1), b = random_cvec(n, 3);
  auto c = random_vec(n, 5), sk = random_vec(n, 6), ks = random_vec(n, 7);
  for (auto _ : st) {
    if constexpr (Par)
      kernels::wave_propagate(a.data(), b.data(), c.data(), sk.data(), ks.data(), n);
    else
      ref::wave_propagate(a.data(), b.data(), c.data(), sk.data(), ks.data(), n);
    benchmark::DoNotOptimize(a.data());
  }
  st.SetItemsProcessed(st.iterations() * n);
}

template <bool Par>
void BM_poly_source(benchmark::State& st) {
  const std::size_t n = st.range(0);
  auto u = random_vec(n, 11), z = random_vec(n, 12);
  std::vector<double> a{0, 0, 0, 1}, out(n);
  for (auto _ : st) {
    if constexpr (Par)
      kernels::poly_source(u.data(), z.data(), a.data(), 3, out.data(), n);
    else
      ref::poly_source(u.data(), z.data(), a.data(), 3, out.data(), n);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * n);
}

template <bool Par>
void BM_filtered_kick(benchmark::State& st) {
  const std::size_t n = st.range(0);
  auto u = random_cvec(n, 21), F = random_cvec(n, 23);
  auto filt = random_vec(n, 25, 0, 1);
  for (auto _ : st) {
    if constexpr (Par)
      kernels::filtered_kick(u.data(), F.data(), filt.data(), 1e-3, n);
    else
      ref::filtered_kick(u.data(), F.data(), filt.data(), 1e-3, n);
    benchmark::DoNotOptimize(u.data());
  }
  st.SetItemsProcessed(st.iterations() * n);
}

template <bool Par>
void BM_weighted_power_sum(benchmark::State& st) {
  const std::size_t n1 = st.range(0), n2 = n1, nh = n1 / 2 + 1;
  auto p = random_vec(n1 * n2 * nh, 31, 0, 1);
  auto e1 = random_vec(n1, 32, 0, 2), e2 = random_vec(n2, 33, 0, 2), e3 = random_vec(nh, 34, 0, 2);
  auto f1 = random_vec(n1, 35, -50, 50), f2 = random_vec(n2, 36, -50, 50), f3 = random_vec(nh, 37, 0, 50);
  for (auto _ : st) {
    double s = Par ? kernels::weighted_power_sum(p.data(), n1, n2, nh, e1.data(), e2.data(), e3.data(), f1.data(),
                                                 f2.data(), f3.data(), -0.7)
                   : ref::weighted_power_sum(p.data(), n1, n2, nh, e1.data(), e2.data(), e3.data(), f1.data(),
                                             f2.data(), f3.data(), -0.7);
    benchmark::DoNotOptimize(s);
  }
  st.SetItemsProcessed(st.iterations() * n1 * n2 * nh);
}

}  // namespace

BENCHMARK(BM_wave_propagate<true>)->Name("wave_propagate/omp")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_wave_propagate<false>)->Name("wave_propagate/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_poly_source<true>)->Name("poly_source/omp")->Arg(1 << 16)->Arg(1 << 21);
BENCHMARK(BM_poly_source<false>)->Name("poly_source/serial")->Arg(1 << 16)->Arg(1 << 21);
BENCHMARK(BM_filtered_kick<true>)->Name("filtered_kick/omp")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_filtered_kick<false>)->Name("filtered_kick/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_weighted_power_sum<true>)->Name("weighted_power_sum/omp")->Arg(64)->Arg(128);
BENCHMARK(BM_weighted_power_sum<false>)->Name("weighted_power_sum/serial")->Arg(64)->Arg(128);

BENCHMARK_MAIN();

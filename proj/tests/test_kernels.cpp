#include <doctest.h>

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

}  // namespace

TEST_CASE("parallel kernels agree with serial references") {
  const std::size_t n = 10007;
  SUBCASE("wave_propagate") {
    auto a = random_cvec(n, 1), b = random_cvec(n, 3);
    auto c = random_vec(n, 5), sk = random_vec(n, 6), ks = random_vec(n, 7);
    auto a2 = a, b2 = b;
    kernels::wave_propagate(a.data(), b.data(), c.data(), sk.data(), ks.data(), n);
    ref::wave_propagate(a2.data(), b2.data(), c.data(), sk.data(), ks.data(), n);
    CHECK(a == a2);
    CHECK(b == b2);
  }
  SUBCASE("poly_source") {
    auto u = random_vec(n, 11), z = random_vec(n, 12);
    std::vector<double> a{0.1, -0.2, 0.3, 1.0, -0.5}, o1(n), o2(n);
    kernels::poly_source(u.data(), z.data(), a.data(), 4, o1.data(), n);
    ref::poly_source(u.data(), z.data(), a.data(), 4, o2.data(), n);
    CHECK(o1 == o2);
    CHECK(o1[17] == doctest::Approx(z[17] * (0.1 - 0.2 * u[17] + 0.3 * u[17] * u[17] + std::pow(u[17], 3) -
                                             0.5 * std::pow(u[17], 4))));
  }
  SUBCASE("filtered_kick and add_spectra") {
    auto u1 = random_cvec(n, 21), F = random_cvec(n, 23);
    auto filt = random_vec(n, 25, 0, 1);
    auto u2 = u1;
    kernels::filtered_kick(u1.data(), F.data(), filt.data(), 0.37, n);
    ref::filtered_kick(u2.data(), F.data(), filt.data(), 0.37, n);
    CHECK(u1 == u2);
    std::vector<cplx> s1(n), s2(n);
    kernels::add_spectra(u1.data(), F.data(), s1.data(), n);
    ref::add_spectra(u1.data(), F.data(), s2.data(), n);
    CHECK(s1 == s2);
  }
  SUBCASE("weighted_power_sum") {
    const std::size_t n1 = 24, n2 = 20, nh = 9;
    auto p = random_vec(n1 * n2 * nh, 31, 0, 1);
    auto e1 = random_vec(n1, 32, 0, 2), e2 = random_vec(n2, 33, 0, 2), e3 = random_vec(nh, 34, 0, 2);
    auto f1 = random_vec(n1, 35, -5, 5), f2 = random_vec(n2, 36, -5, 5), f3 = random_vec(nh, 37, 0, 5);
    double s1 = kernels::weighted_power_sum(p.data(), n1, n2, nh, e1.data(), e2.data(), e3.data(), f1.data(),
                                            f2.data(), f3.data(), -0.7);
    double s2 = ref::weighted_power_sum(p.data(), n1, n2, nh, e1.data(), e2.data(), e3.data(), f1.data(), f2.data(),
                                        f3.data(), -0.7);
    CHECK(s1 == doctest::Approx(s2).epsilon(1e-13));
    // direct triple loop oracle
    double acc = 0;
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j)
        for (std::size_t k = 0; k < nh; ++k)
          acc += p[(i * n2 + j) * nh + k] * e1[i] * e2[j] * e3[k] *
                 std::pow(1 + f1[i] * f1[i] + f2[j] * f2[j] + f3[k] * f3[k], -0.7);
    CHECK(s2 == doctest::Approx(acc).epsilon(1e-13));
  }
}

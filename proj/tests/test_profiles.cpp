#include <doctest.h>

#include <cmath>

#include "cwl/profiles.hpp"

using namespace cwl;

TEST_CASE("bessel symbol is elliptic of its order") {
  auto a = Symbol1D::bessel(-2.6, 3.0);
  CHECK(a(0.0) == doctest::Approx(std::pow(9.0, -1.3)));
  auto c = check_symbol(a);
  CHECK(c.ok);
  CHECK(c.lower_const > 0);
  auto z = check_symbol(Symbol1D::zero());
  CHECK(z.ok);  // symbol of order m, not elliptic
  CHECK(z.lower_const == 0.0);
}

TEST_CASE("profile of (1+eta^2)^-1 is pi exp(-|s|)") {
  Grid1D g{40.0, 4096};
  auto p = synthesize_profile(Symbol1D::bessel(-2.0, 1.0), g);
  double err = 0;
  for (std::size_t j = 0; j < g.n; ++j) err = std::max(err, std::abs(p.samples[j] - pi * std::exp(-std::abs(g.node(j)))));
  CHECK(err <= p.tail_estimate + 1e-6);
  CHECK(err > 0);
  CHECK_THROWS_AS(synthesize_profile(Symbol1D::bessel(-0.5), g), Rejected);
}

TEST_CASE("k_of_m") {
  CHECK(k_of_m(-2.6) == 1);
  CHECK(k_of_m(-1.5) == 0);
  CHECK(k_of_m(-4.2) == 3);
  CHECK_THROWS_AS(k_of_m(-1.0), Rejected);
}

TEST_CASE("piriou split leaves a profile with vanishing low derivatives") {
  Grid1D g{16.0, 4096};
  auto p = synthesize_profile(Symbol1D::bessel(-4.2, 1.0), g);
  auto split = piriou_decompose(p);
  CHECK(split.k == 3);
  // Taylor part plus singular part restores the profile
  for (std::size_t j = 0; j < g.n; j += 97)
    CHECK(split.taylor[j] + split.singular.samples[j] == doctest::Approx(p.samples[j]).epsilon(1e-10));
  auto d = spectral_derivatives_at_zero(split.singular, split.k - 1);
  auto d0 = spectral_derivatives_at_zero(p, split.k - 1);
  for (int i = 0; i < split.k; ++i) CHECK(std::abs(d[i]) < 1e-6 * (1 + std::abs(d0[i])));
}

TEST_CASE("mollifier polynomial matches its boundary conditions exactly") {
  for (long N : {4L, 16L, 100L})
    for (int r : {1, 2, 4}) {
      auto mp = mollifier_polynomial(N, r);
      CHECK(mp.exact(mpq_class(N)) == 1);
      CHECK(mp.exact(mpq_class(2 * N)) == 0);
      for (int d = 1; d <= r; ++d) {
        CHECK(mp.exact(mpq_class(N), d) == 0);
        CHECK(mp.exact(mpq_class(2 * N), d) == 0);
      }
    }
  CHECK_THROWS_AS(mollifier_polynomial(3, 1), Rejected);
  CHECK_THROWS_AS(mollifier_polynomial(8, 0), Rejected);
}

TEST_CASE("psi mollifier is one near the origin scale and vanishes far out") {
  PsiMollifier psi(mollifier_polynomial(16, 2));
  CHECK(psi(200.0) == 0.0);
  double s1 = scaled_derivative_sup(psi, 1);
  CHECK(std::isfinite(s1));
  CHECK(s1 > 0);
}

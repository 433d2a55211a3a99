#include <doctest.h>

#include <cmath>
#include <random>

#include "cwl/spectral.hpp"

using namespace cwl;

TEST_CASE("fft sizes") {
  CHECK(next_fft_size(90) == 96);
  CHECK(next_fft_size(100) == 128);
  CHECK(next_fft_size(1536) == 1536);
  CHECK(is_pow2(1024));
  CHECK_FALSE(is_pow2(96));
}

TEST_CASE("smooth step and bump") {
  CHECK(smooth_step(-0.1) == 0.0);
  CHECK(smooth_step(1.1) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  CHECK(bump(0.0) == 1.0);
  CHECK(bump(1.0) == 0.0);
  CHECK(bump(0.5) == doctest::Approx(std::exp(1 - 1 / 0.75)));
}

TEST_CASE("dft of a gaussian matches its continuous transform") {
  Grid1D g{20.0, 256};
  std::vector<double> f(g.n);
  for (std::size_t j = 0; j < g.n; ++j) f[j] = std::exp(-0.5 * g.node(j) * g.node(j));
  auto F = dft_forward(f, g);
  for (std::size_t k = 0; k < 40; ++k) {
    double eta = g.freq(k);
    CHECK(std::abs(F[k] - cplx(std::sqrt(2 * pi) * std::exp(-0.5 * eta * eta))) < 1e-12);
  }
  auto back = dft_inverse(F, g);
  for (std::size_t j = 0; j < g.n; ++j) CHECK(std::abs(back[j] - cplx(f[j])) < 1e-14);
}

TEST_CASE("2D real transform round trip") {
  Fft2D fft(48, 32);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<double> u(48 * 32), v(48 * 32);
  for (auto& x : u) x = U(rng);
  std::vector<cplx> h(48 * 17);
  fft.r2c(u.data(), h.data());
  fft.c2r(h.data(), v.data());
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(v[i] == doctest::Approx(48.0 * 32.0 * u[i]));
}

TEST_CASE("trigonometric interpolation is exact for a plane wave") {
  Grid2D g{2 * pi, 2 * pi, 32, 16};
  std::vector<double> u(g.size());
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j) u[i * g.ny + j] = std::cos(3 * g.x(i) - 2 * g.y(j));
  Fft2D fft(g.nx, g.ny);
  std::vector<cplx> h(g.half());
  fft.r2c(u.data(), h.data());
  for (double x : {0.123, 1.7, -2.2})
    CHECK(trig_eval(h, g, x, 0.31 * x + 0.4) == doctest::Approx(std::cos(3 * x - 2 * (0.31 * x + 0.4))).epsilon(1e-12));
}

TEST_CASE("least squares recovers an exact line") {
  std::vector<double> x{1, 2, 3, 4}, y{1.5, 3.5, 5.5, 7.5};
  auto f = ols(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(-0.5));
  CHECK(f.rms < 1e-12);
}

TEST_CASE("decay exponent of exp(-|s|) is -2") {
  // transform 2/(1+eta^2)
  Grid1D g{40.0, 4096};
  std::vector<double> f(g.n);
  for (std::size_t j = 0; j < g.n; ++j) f[j] = std::exp(-std::abs(g.node(j)));
  auto fit = decay_exponent(f, g, Band{10, 80});
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(0.02));
  CHECK(fit.n_bins >= 8);
}

TEST_CASE("gaussian window") {
  Window w{WindowKind::Gaussian, 1.2, 0.2};
  CHECK(w(0.0) == doctest::Approx(1.0));
  CHECK(w(1.3) == 0.0);
  CHECK(w(0.2) < w(0.1));
}

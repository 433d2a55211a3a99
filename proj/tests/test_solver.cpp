#include <doctest.h>

#include <cmath>

#include "cwl/solver.hpp"

using namespace cwl;

namespace {

std::vector<double> field(const Grid2D& g, const std::function<double(double, double)>& f) {
  std::vector<double> u(g.size());
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j) u[i * g.ny + j] = f(g.x(i), g.y(j));
  return u;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("linear propagation is the exact plane wave") {
  Grid2D g{2 * pi, 2 * pi, 32, 32};
  const double w = std::sqrt(5.0), t = 0.731;
  auto u0 = field(g, [](double x, double y) { return std::cos(2 * x + y); });
  auto ut0 = field(g, [w](double x, double y) { return w * std::sin(2 * x + y); });
  auto s = to_spectral(g, u0, ut0);
  double e0 = wave_energy(s);
  CHECK(e0 == doctest::Approx(0.5 * (5 * 2 * pi * pi + 5 * 2 * pi * pi)));
  linear_propagate(s, t);
  auto u = to_physical(g, s.uh);
  auto exact = field(g, [&](double x, double y) { return std::cos(2 * x + y - w * t); });
  CHECK(max_diff(u, exact) < 1e-13);
  CHECK(wave_energy(s) == doctest::Approx(e0).epsilon(1e-14));
}

TEST_CASE("constant forcing converges to the closed-form response at second order") {
  // u_tt - lap u = cos x, zero data at t0: u = (1 - cos(t - t0)) cos x
  Grid2D g{2 * pi, 2 * pi, 32, 32};
  Forcing F = [](double, const Grid2D& pg, double* out) {
    for (std::size_t i = 0; i < pg.nx; ++i)
      for (std::size_t j = 0; j < pg.ny; ++j) out[i * pg.ny + j] = std::cos(pg.x(i));
  };
  auto exact = field(g, [](double x, double) { return (1 - std::cos(1.0)) * std::cos(x); });
  std::vector<double> err;
  for (double dt : {0.02, 0.01, 0.005}) {
    SolverConfig cfg;
    cfg.t0 = 0, cfg.t1 = 1.0, cfg.dt = dt;
    err.push_back(max_diff(duhamel_apply(g, F, cfg).u.back(), exact));
  }
  CHECK(err[2] < 1e-5);
  CHECK(std::log2(err[0] / err[1]) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::log2(err[1] / err[2]) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("stepper agrees with Duhamel quadrature for time-dependent forcing") {
  Grid2D g{2 * pi, 2 * pi, 32, 32};
  Forcing F = [](double t, const Grid2D& pg, double* out) {
    for (std::size_t i = 0; i < pg.nx; ++i)
      for (std::size_t j = 0; j < pg.ny; ++j)
        out[i * pg.ny + j] = t * t * std::cos(pg.x(i) + 2 * pg.y(j)) + std::sin(3 * t) * std::sin(3 * pg.x(i));
  };
  SolverConfig cfg;
  cfg.t0 = -0.5, cfg.t1 = 1.0, cfg.dt = 0.005;
  auto sol = duhamel_apply(g, F, cfg);
  auto q = duhamel_quadrature(g, F, -0.5, 1.0, 2000);
  double scale = 0;
  for (double x : q) scale = std::max(scale, std::abs(x));
  CHECK(max_diff(sol.u.back(), q) < 1e-4 * scale);
  CHECK_THROWS_AS(duhamel_quadrature(g, F, 0, 1, 3), Rejected);
}

TEST_CASE("zero nonlinearity leaves no nonlinear part") {
  Grid2D g{2 * pi, 2 * pi, 32, 16};
  auto u0 = field(g, [](double x, double y) { return std::exp(std::cos(x) + std::sin(y)); });
  std::vector<double> ut0(g.size(), 0.0);
  SolverConfig cfg;
  cfg.t0 = 0, cfg.t1 = 0.5, cfg.dt = 0.01;
  auto sol = solve_split(to_spectral(g, u0, ut0), cfg, Source::none());
  for (double x : sol.nonlinear.u.back()) CHECK(x == 0.0);
  CHECK(sol.energy_linear.back() == doctest::Approx(sol.energy_linear.front()).epsilon(1e-13));
}

TEST_CASE("characteristic frame") {
  auto f = CharFrame::from_angles({90, 210, 330});
  CHECK(std::abs(f.det) > 0.1);
  auto y = f.y(1.0, 0.0, 1.0);  // y_j = t - x.omega_j
  CHECK(y[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(y[1] == doctest::Approx(1.5));
  CHECK_THROWS(CharFrame::from_angles({0, 0, 90}));
}

TEST_CASE("Z cutoff switches on in time") {
  ZCutoff z;
  CHECK(z.time_factor(-2.0) == 0.0);
  CHECK(z.time_factor(0.0) == 1.0);
  NonlinearitySpec P{{0, 0, 0, 1}, z};
  CHECK(P.degree() == 3);
  CHECK_FALSE(P.is_zero());
  CHECK(NonlinearitySpec{{0, 0}, z}.is_zero());
}

#include <doctest.h>

#include <cmath>

#include "cwl/interaction.hpp"

using namespace cwl;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.grid = Grid2D{6.0 * std::sqrt(3.0), 6.0, 128, 64};
  c.solver.t0 = -1.2;
  c.solver.t1 = 0.3;
  c.solver.dt = 0.01;
  return c;
}

}  // namespace

TEST_CASE("torus design realises the frame directions") {
  auto frame = CharFrame::from_angles({90, 210, 330});
  Grid2D g{6.0 * std::sqrt(3.0), 6.0, 64, 32};
  auto d = design_torus(frame, g);
  for (int j = 0; j < 3; ++j) {
    double kx = d.lattice[j][0] / g.Lx, ky = d.lattice[j][1] / g.Ly;
    CHECK(std::abs(kx * frame.omega[j][1] - ky * frame.omega[j][0]) < 1e-12);
    CHECK(kx * frame.omega[j][0] + ky * frame.omega[j][1] > 0);
  }
}

TEST_CASE("polarization isolates the trilinear coefficient") {
  // F(x) = 2 x1 + 3 x2 x3 + 5 x1 x2 x3 at the indicator vectors
  std::array<std::vector<double>, 8> by;
  for (int m = 0; m < 8; ++m) {
    double x1 = m & 1, x2 = (m >> 1) & 1, x3 = (m >> 2) & 1;
    by[m] = {2 * x1 + 3 * x2 * x3 + 5 * x1 * x2 * x3};
  }
  CHECK(polarization_combine(by)[0] == doctest::Approx(5.0));
}

TEST_CASE("polarization of a linear source vanishes") {
  auto cfg = small_config();
  NonlinearitySpec P{{0, 0.7}, cfg.P.z};
  auto runs = polarization_runs(cfg, P, 0.3, 1);
  auto v = polarization_combine(runs);
  double scale = 0, m = 0;
  for (double x : runs[7]) scale = std::max(scale, std::abs(x));
  for (double x : v) m = std::max(m, std::abs(x));
  CHECK(scale > 0);
  CHECK(m < 1e-10 * scale);
}

TEST_CASE("cone geometry") {
  auto frame = CharFrame::from_angles({90, 210, 330});
  auto c = locate_cone(frame, 1.5);
  CHECK(c.radius == 1.5);
  CHECK(angular_distance_deg(350, 10) == doctest::Approx(20));
  CHECK(probe_respects_exclusion(frame, ConeProbe{1.5, 270, 20}));
  CHECK_FALSE(probe_respects_exclusion(frame, ConeProbe{1.5, 215, 20}));
  CHECK_THROWS_AS(locate_cone(frame, -1), Rejected);
}

TEST_CASE("amplitude scaling") {
  std::vector<double> eps{0.01, 0.005, 0.0025}, amp;
  for (double e : eps) amp.push_back(7 * e * e * e);
  CHECK(amplitude_scaling(eps, amp).slope == doctest::Approx(3.0));
  CHECK_THROWS(amplitude_scaling(eps, {0, 0, 0}));
  CHECK(coefficient_recovery(2.0, 4.0) == 2.0);
  CHECK_THROWS_AS(coefficient_recovery(0.0, 1.0), Rejected);
}

TEST_CASE("band resolution and bandpass") {
  Grid2D g{2 * pi, 2 * pi, 64, 64};
  auto b = resolve_band(Band{4, 0}, g);
  CHECK(b.hi == doctest::Approx(8.0));
  std::vector<double> u(g.size());
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j) u[i * g.ny + j] = std::cos(g.x(i)) + std::cos(6 * g.x(i));
  auto v = bandpass(u, g, b);
  for (std::size_t i = 0; i < g.nx; ++i) CHECK(v[i * g.ny] == doctest::Approx(std::cos(6 * g.x(i))).epsilon(1e-9));
}

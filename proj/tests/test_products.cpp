#include <doctest.h>

#include <cmath>

#include "cwl/products.hpp"

using namespace cwl;

namespace {

// a = prod exp(-z^2/2 sa^2), b = prod N(0, sb^2): a*b(c) = prod sa/s exp(-c^2/2 s^2), s^2 = sa^2+sb^2
double gauss_conv(double sa, double sb, std::array<double, 3> c) {
  double s2 = sa * sa + sb * sb, v = 1;
  for (double x : c) v *= sa / std::sqrt(s2) * std::exp(-0.5 * x * x / s2);
  return v;
}

}  // namespace

TEST_CASE("r_max") {
  CHECK(r_max(-2.6) == doctest::Approx(1 - 2 / 2.1));
  CHECK(region_name(0) == "GGG");
  CHECK(region_name(5) == "LGL");
}

TEST_CASE("direct quadrature matches the closed-form gaussian convolution") {
  auto a = SeparableA::gaussian(1.0);
  auto b = WeightB::gaussian(0.5);
  std::array<double, 3> c{2.0, 1.5, 2.5};
  double v = convolution_direct_3d(a, b, c, 9.0, 6);
  CHECK(v == doctest::Approx(gauss_conv(1.0, 0.5, c)).epsilon(1e-9));
  CHECK_THROWS_AS(convolution_direct_3d(a, b, c, 9.0, 6, 4), Rejected);
}

TEST_CASE("engine matches closed form and partitions the integral") {
  ConvolutionEngine eng(SeparableA::gaussian(1.0), WeightB::gaussian(0.5), -2.6, 0.3);
  for (double xi : {1.0, 2.5}) {
    auto T = eng.evaluate(xi, 1.2, 0.8, true);
    std::array<double, 3> c{xi, 1.2 * xi, 0.8 * xi};
    CHECK(T.conv == doctest::Approx(gauss_conv(1.0, 0.5, c)).epsilon(1e-8));
    CHECK(T.main == doctest::Approx(gauss_conv(1.0, 0.0, c)).epsilon(1e-12));
    CHECK(T.R == doctest::Approx(T.conv - T.main));
    double sI = 0, sIb = 0;
    for (int r = 0; r < 8; ++r) sI += T.I[r], sIb += T.Ib[r];
    CHECK(sI == doctest::Approx(T.conv).epsilon(1e-10));
    CHECK(sIb == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(T.partition_residual < 1e-8);
  }
}

TEST_CASE("engine matches brute force for the symbol class") {
  ConvolutionEngine eng(SeparableA::bessel(-2.6), WeightB::weighted(-2.6, 0.3), -2.6, 0.3);
  auto T = eng.evaluate(2.0, 1.0, 1.0);
  double v = convolution_direct_3d(eng.a(), eng.b(), {2.0, 2.0, 2.0}, 400.0, 24);
  CHECK(T.conv == doctest::Approx(v).epsilon(1e-5));
}

TEST_CASE("product fields split exactly into leading term and remainder") {
  Grid1D ax{8.0, 32};
  Grid3D g{{ax, ax, ax}};
  auto a = Symbol1D::bessel(-2.6, 3.0);
  std::array<YSymbol, 3> frozen{YSymbol{a, 0}, YSymbol{a, 1}, YSymbol{a, 2}};
  auto F = triple_product_fields(frozen, g);
  double mE = 0, mp = 0;
  for (std::size_t i = 0; i < F.E.data.size(); ++i) {
    mE = std::max(mE, std::abs(F.E.data[i]));
    mp = std::max(mp, std::abs(F.product.data[i]));
  }
  CHECK(mp > 0);
  CHECK(mE < 1e-12 * mp);
  auto v = frozen;
  v[0].q = {1, 0.3, -0.2, 0.1};
  auto G = triple_product_fields(v, g);
  double gap = 0, mE2 = 0;
  for (std::size_t i = 0; i < G.E.data.size(); ++i) {
    gap = std::max(gap, std::abs(G.product.data[i] - G.w.data[i] - G.E.data[i]));
    mE2 = std::max(mE2, std::abs(G.E.data[i]));
  }
  CHECK(gap < 1e-14 * mp);
  CHECK(mE2 > 1e-6 * mp);
}

TEST_CASE("ladder flags") {
  LadderSamples s;
  s.cfg.max_doublings = 3;
  for (int k = 0; k < 3; ++k) {
    s.xi.push_back(1.5 * std::pow(2.0, k));
    s.wxi.push_back(std::pow(2.0, k));
    s.doubling.push_back(k);
  }
  s.kappa = {{1, 1}};
  s.wk = {1};
  s.tables.resize(3);
  for (int k = 0; k < 3; ++k) s.tables[k].R = 1.0;
  auto grow = weighted_ladder(s, 0.0, [](const RegionTable& t) { return t.R; }, "flat");
  CHECK(grow.grows);
  CHECK_FALSE(grow.cauchy);
  auto conv = weighted_ladder(s, -40.0, [](const RegionTable& t) { return t.R; }, "fast");
  CHECK(conv.cauchy);
}

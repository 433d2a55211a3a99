#include <doctest.h>

#include <cmath>

#include "cwl/beals.hpp"

using namespace cwl;

namespace {

std::vector<double> sample(const Grid1D& g, double (*f)(double)) {
  std::vector<double> v(g.n);
  for (std::size_t j = 0; j < g.n; ++j) v[j] = f(g.node(j));
  return v;
}
double gauss(double s) { return std::exp(-s * s); }
double sech(double s) { return 1 / std::cosh(2 * s); }
double kink(double s) { return std::exp(-std::abs(s)); }

}  // namespace

TEST_CASE("separable weights factor into 1D norms") {
  Grid1D a{8.0, 32}, b{8.0, 16}, c{8.0, 24};
  Grid3D g{{a, b, c}};
  auto f1 = sample(a, gauss), f2 = sample(b, sech), f3 = sample(c, kink);
  auto field = outer_product(g, f1, f2, f3);
  auto cut = product_bump_cutoff(3.0);
  auto phi = [](double s) { return bump(s / 3.0); };
  BealsWeight w{0, 0.4, -0.3, 0.7};
  double expect = weighted_norm_1d(f1, a, 0.4, phi) * weighted_norm_1d(f2, b, -0.3, phi) *
                  weighted_norm_1d(f3, c, 0.7, phi);
  CHECK(beals_norm(field, w, cut) == doctest::Approx(expect).epsilon(1e-11));
}

TEST_CASE("plancherel at zero weight") {
  Grid1D a{8.0, 16};
  Grid3D g{{a, a, a}};
  auto f = sample(a, gauss);
  auto field = outer_product(g, f, f, f);
  auto one = [](double, double, double) { return 1.0; };
  double l2 = 0;
  for (double x : field.data) l2 += x * x;
  l2 *= std::pow(a.h(), 3);
  CHECK(beals_norm(field, BealsWeight{}, one) == doctest::Approx(std::sqrt(l2)).epsilon(1e-12));
}

TEST_CASE("axis permutation") {
  Grid1D a{8.0, 8}, b{8.0, 4}, c{8.0, 6};
  Grid3D g{{a, b, c}};
  Field3D f(g);
  for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] = double(i);
  auto p = permute_axes(f, {2, 0, 1});
  CHECK(p.grid.axes[0].n == 6);
  CHECK(p.at(5, 7, 3) == f.at(7, 3, 5));
}

TEST_CASE("membership classification from norm growth") {
  MembershipScan conv;
  conv.resolutions = {32, 64, 128, 256};
  conv.norms = {1.0, 1.5, 1.75, 1.875};  // increments halve: converges
  classify_scan(conv);
  CHECK(conv.member);
  CHECK_FALSE(conv.inconclusive);
  MembershipScan grow = conv;
  grow.norms = {1.0, 2.0, 4.0, 8.0};
  classify_scan(grow);
  CHECK_FALSE(grow.member);
  CHECK(grow.growth_exponent > 0.25);
}

TEST_CASE("kink profile sits below its sobolev threshold") {
  // exp(-|s|) is in H^k iff k < 3/2; the scan sees it
  auto gen = [](std::size_t n) {
    Grid1D a{8.0, n};
    Grid1D s{8.0, 8};
    Grid3D g{{a, s, s}};
    std::vector<double> f1(n), one(8, 1.0);
    for (std::size_t j = 0; j < n; ++j) f1[j] = kink(a.node(j));
    return outer_product(g, f1, one, one);
  };
  auto cut = product_bump_cutoff(3.0);
  auto scans = membership_scan(gen, {BealsWeight{0, 1.0, 0, 0}, BealsWeight{0, 2.0, 0, 0}}, {64, 128, 256, 512, 1024},
                               cut);
  CHECK(scans[0].member);
  CHECK_FALSE(scans[1].member);
}

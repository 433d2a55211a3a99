#include <doctest.h>

#include <cmath>

#include "cwl/normalform.hpp"
#include "cwl/spectral.hpp"

using namespace cwl;

namespace {

using Fn = std::function<double(const Vec3&)>;
Fn one = [](const Vec3&) { return 1.0; };

double sup3(const std::array<double, 3>& a) { return std::max({a[0], a[1], a[2]}); }

}  // namespace

TEST_CASE("jets differentiate polynomials exactly") {
  using J = Jet<2>;
  J x = J::var(1.5, 0), y = J::var(-2.0, 1);
  J f = x * x * y + 3.0 * y + 1.0;
  CHECK(f.v == doctest::Approx(1.5 * 1.5 * -2.0 - 6.0 + 1.0));
  CHECK(f.d[0] == doctest::Approx(2 * 1.5 * -2.0));
  CHECK(f.d[1] == doctest::Approx(1.5 * 1.5 + 3.0));
}

TEST_CASE("coefficient gradients") {
  auto g = Coef::gaussian(0.1, 0.5);
  Vec3 y{0.1, -0.2, 0.05};
  auto d = g.gradient(y);
  CHECK(d[1] == doctest::Approx(-2 * y[1] / 0.5 * g(y)).epsilon(1e-10));
  Coef fd{g.f, nullptr, "fd"};
  auto e = fd.gradient(y);
  for (int i = 0; i < 3; ++i) CHECK(e[i] == doctest::Approx(d[i]).epsilon(1e-8));
}

TEST_CASE("the identity q(grad y_j f) = y_j A_j holds for arbitrary f") {
  auto c = OperatorCoeffs::perturbed();
  c.b22 = Coef::affine(0.05, 0.1, 0.0, -0.1);
  c.b33 = Coef::constant(-0.07);
  Fn f = [](const Vec3& y) { return 1 + 0.1 * y[0] + 0.2 * y[1] * y[2] - 0.05 * y[2] * y[2]; };
  auto r = verify_normal_form(c, {f, f, f}, 0.3, 0.01);
  CHECK(r.n_points > 50);
  CHECK(r.identity_gap < 1e-9);
  CHECK(sup3(r.sup_residual) > 1e-3);  // an arbitrary f does not solve the system
}

TEST_CASE("f = 1 solves the system for the normal form operator") {
  auto r = verify_normal_form(OperatorCoeffs::normal_form(), {one, one, one}, 0.3, 0.01);
  CHECK(sup3(r.sup_residual) < 1e-13);
  CHECK(sup3(r.sup_transformed) < 1e-13);
  CHECK(r.max_dev_from_one == 0.0);
  CHECK(r.pass(1e-8));
}

TEST_CASE("f = 1 fails by the size of the perturbation") {
  auto c = OperatorCoeffs::perturbed(0.1, 0.5);
  auto r = verify_normal_form(c, {one, one, one}, 0.3, 0.01);
  CHECK(r.sup_residual[0] > 0.05);
  CHECK(r.sup_residual[0] < 0.11);
  CHECK_FALSE(r.pass(1e-8));
}

TEST_CASE("characteristic solutions satisfy the equations") {
  NormalFormConfig cfg;
  cfg.delta = 0.2;
  SUBCASE("affine data, normal form operator") {
    auto c = OperatorCoeffs::normal_form();
    auto s = characteristic_solve(c, 1, InitialData::affine(1.0, 0.1, -0.05), cfg);
    CHECK(s.max_drift < 1e-9);
    auto r = verify_normal_form(c, {s.as_function(), one, one}, 0.5 * s.delta, s.delta / 32);
    CHECK(r.sup_residual[0] < 1e-8);
  }
  SUBCASE("perturbed operator, all three equations") {
    auto c = OperatorCoeffs::perturbed();
    std::array<CharacteristicSolution, 3> s{characteristic_solve(c, 1, InitialData::constant(1), cfg),
                                            characteristic_solve(c, 2, InitialData::constant(1), cfg),
                                            characteristic_solve(c, 3, InitialData::constant(1), cfg)};
    double d = std::min({s[0].delta, s[1].delta, s[2].delta});
    auto r = verify_normal_form(c, {s[0].as_function(), s[1].as_function(), s[2].as_function()}, 0.5 * d, d / 32);
    CHECK(r.pass(1e-8));
    CHECK(r.identity_gap < 1e-9);
    // eval reproduces the initial surface
    Vec3 y{0.01, 0.0, -0.02};
    CHECK(s[0].eval(y) == doctest::Approx(1.0).epsilon(1e-10));
    auto cc = interpolation_consistency(s[0], d / 32, 20);
    CHECK(cc.max_native < 1e-9);
    CHECK(cc.max_grad_gap < 1e-6);
  }
}

TEST_CASE("rejections") {
  auto bad = OperatorCoeffs::normal_form();
  bad.b13 = Coef::constant(0);
  CHECK_THROWS_AS(bad.check(), Rejected);
  NormalFormConfig cfg;
  CHECK_THROWS_AS(characteristic_solve(OperatorCoeffs::normal_form(), 4, InitialData::constant(1), cfg), Rejected);
  CHECK_THROWS_AS(characteristic_solve(OperatorCoeffs::normal_form(), 1, InitialData::constant(0), cfg), Rejected);
  CHECK_THROWS_AS(nf_equation(OperatorCoeffs::normal_form(), 0, {0, 0, 0}, 1, {0, 0, 0}), Rejected);
  CHECK_THROWS_AS(OperatorCoeffs::named("nonsense"), Rejected);
  Fn zero = [](const Vec3&) { return 0.0; };
  CHECK_THROWS_AS(verify_normal_form(OperatorCoeffs::normal_form(), {zero, one, one}, 0.3, 0.01), Rejected);
}

#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace cwl {

using Vec3 = std::array<double, 3>;

// Forward-mode dual number with N seeded directions.
template <int N>
struct Jet {
  double v = 0;
  std::array<double, N> d{};
  Jet() = default;
  Jet(double x) : v(x) {}
  static Jet var(double x, int i) {
    Jet j(x);
    j.d[i] = 1;
    return j;
  }
};
template <int N> Jet<N> operator+(Jet<N> a, const Jet<N>& b) {
  a.v += b.v;
  for (int i = 0; i < N; ++i) a.d[i] += b.d[i];
  return a;
}
template <int N> Jet<N> operator-(Jet<N> a, const Jet<N>& b) {
  a.v -= b.v;
  for (int i = 0; i < N; ++i) a.d[i] -= b.d[i];
  return a;
}
template <int N> Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r(a.v * b.v);
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
template <int N> Jet<N> operator+(Jet<N> a, double b) { a.v += b; return a; }
template <int N> Jet<N> operator*(Jet<N> a, double b) {
  a.v *= b;
  for (auto& x : a.d) x *= b;
  return a;
}
template <int N> Jet<N> operator*(double b, Jet<N> a) { return a * b; }

// Smooth coefficient b(y). If grad is empty it is taken by 6th-order central differences.
struct Coef {
  std::function<double(const Vec3&)> f;
  std::function<Vec3(const Vec3&)> grad;
  std::string name;
  double operator()(const Vec3& y) const { return f(y); }
  Vec3 gradient(const Vec3& y) const;
  static Coef constant(double c);
  static Coef affine(double c0, double c1, double c2, double c3);
  static Coef gaussian(double amp, double width2);  // amp exp(-|y|^2/width2)
};

// b11 y1 d1^2 + b12 d1 d2 + b13 d1 d3 + b22 y2 d2^2 + b23 d2 d3 + b33 y3 d3^2 + lower order
struct OperatorCoeffs {
  Coef b11, b12, b13, b22, b23, b33;
  std::array<Coef, 3> b{Coef::constant(0), Coef::constant(0), Coef::constant(0)};  // carried, unused
  Coef b0 = Coef::constant(0);
  void check() const;  // strict hyperbolicity at 0
  static OperatorCoeffs normal_form();               // b11=b22=b33=0, b12=b13=b23=1
  static OperatorCoeffs perturbed(double amp = 0.1, double width2 = 0.5);  // normal_form with b11 = amp bump
  static OperatorCoeffs named(const std::string& name);
};

// A (j=1), B (j=2), C (j=3) evaluated at (y, u, p).
double nf_equation(const OperatorCoeffs& c, int j, const Vec3& y, double u, const Vec3& p);
// Principal symbol q(y, xi) of the operator.
double principal_symbol(const OperatorCoeffs& c, const Vec3& y, const Vec3& xi);

struct InitialData {
  std::function<double(double, double)> u;
  std::function<std::array<double, 2>(double, double)> grad;
  static InitialData constant(double c);
  static InitialData affine(double c0, double ca, double cb);
};

struct NormalFormConfig {
  double delta = 0.25;
  double tol = 1e-10;
  int fan_per_delta = 32;   // initial fan spacing delta/fan_per_delta
  int tau_samples = 16;     // recorded samples per strip half
  double shrink = 0.75;
  int max_shrinks = 8;
  double crossing_ratio = 0.05;  // |det| below this fraction of det at the footpoint counts as crossing
};

using State7 = std::array<double, 7>;  // y1 y2 y3 u p1 p2 p3

struct CharacteristicSolution {
  int which = 1;
  OperatorCoeffs coeffs;
  InitialData initial;
  NormalFormConfig cfg;
  double delta = 0;            // accepted delta
  double delta_requested = 0;
  int shrinks = 0;
  int k = 1;                   // axis of the initial surface {y_k = 0}
  std::array<int, 2> tang{0, 2};
  Vec3 v0{};                   // strip velocity at the origin
  double fan_halfwidth[2]{};
  double tau_max = 0;
  std::size_t n_strips = 0;
  double init_residual = 0;    // max |F| at initialization
  double max_drift = 0;        // max |F| along all strips
  double min_det_ratio = 0;
  // sampled strips: footpoint parameters and states at tau_k
  std::vector<std::array<double, 2>> foot;
  std::vector<double> tau;
  std::vector<std::vector<State7>> states;

  State7 initial_state(double sa, double sb) const;
  State7 flow(double sa, double sb, double t) const;
  // f_j(y) by Newton inversion of (sa, sb, tau) -> y; params used as guess and updated
  double eval(const Vec3& y, std::array<double, 3>* params = nullptr, State7* state = nullptr) const;
  std::function<double(const Vec3&)> as_function() const;
};

CharacteristicSolution characteristic_solve(const OperatorCoeffs& c, int j, const InitialData& u0,
                                            const NormalFormConfig& cfg);

struct NormalFormPoint {
  Vec3 y{};
  std::array<double, 3> f{}, res{}, transformed{};
};

struct NormalFormResiduals {
  std::array<double, 3> sup_residual{};     // sup |A|, |B|, |C| with finite-difference gradients
  std::array<double, 3> sup_transformed{};  // sup |q(y, grad Y_j)|, Y_j = y_j f_j
  double identity_gap = 0;                  // sup |q(y, grad Y_j) - y_j A_j|
  double min_abs_f = 0;
  double max_dev_from_one = 0;
  std::size_t n_points = 0;
  std::vector<NormalFormPoint> points;
  bool pass(double tol) const;
};

// Evaluates on a lattice of spacing radius/3 inside the ball |y| <= radius; gradients by 7-point stencils of step h.
NormalFormResiduals verify_normal_form(const OperatorCoeffs& c, const std::array<std::function<double(const Vec3&)>, 3>& f,
                                       double radius, double h);

// Max |F(y,p_native)| minus FD residual comparison at strip footpoints (interpolation consistency).
struct ConsistencyCheck {
  double max_native = 0, max_fd = 0, max_grad_gap = 0;
};
ConsistencyCheck interpolation_consistency(const CharacteristicSolution& s, double h, int npoints);

}  // namespace cwl

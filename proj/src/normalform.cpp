#include "cwl/normalform.hpp"

#include <boost/numeric/odeint.hpp>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cwl/spectral.hpp"

namespace cwl {

namespace odeint = boost::numeric::odeint;

Vec3 Coef::gradient(const Vec3& y) const {
  if (grad) return grad(y);
  const double h = 1e-3;
  Vec3 g{};
  for (int i = 0; i < 3; ++i) {
    auto at = [&](double s) {
      Vec3 z = y;
      z[i] += s * h;
      return f(z);
    };
    g[i] = (-at(-3) + 9 * at(-2) - 45 * at(-1) + 45 * at(1) - 9 * at(2) + at(3)) / (60 * h);
  }
  return g;
}

Coef Coef::constant(double c) {
  return {[c](const Vec3&) { return c; }, [](const Vec3&) { return Vec3{0, 0, 0}; }, std::to_string(c)};
}

Coef Coef::affine(double c0, double c1, double c2, double c3) {
  return {[=](const Vec3& y) { return c0 + c1 * y[0] + c2 * y[1] + c3 * y[2]; },
          [=](const Vec3&) { return Vec3{c1, c2, c3}; }, "affine"};
}

Coef Coef::gaussian(double amp, double width2) {
  auto f = [=](const Vec3& y) { return amp * std::exp(-(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) / width2); };
  return {f,
          [=](const Vec3& y) {
            double v = f(y), s = -2.0 / width2;
            return Vec3{s * y[0] * v, s * y[1] * v, s * y[2] * v};
          },
          "gaussian(" + std::to_string(amp) + "," + std::to_string(width2) + ")"};
}

void OperatorCoeffs::check() const {
  Vec3 o{0, 0, 0};
  if (std::abs(b12(o) * b13(o) * b23(o)) < 1e-12) throw Rejected("OperatorCoeffs: b12 b13 b23 vanishes at 0");
}

OperatorCoeffs OperatorCoeffs::normal_form() {
  OperatorCoeffs c{Coef::constant(0), Coef::constant(1), Coef::constant(1),
                   Coef::constant(0), Coef::constant(1), Coef::constant(0)};
  return c;
}

OperatorCoeffs OperatorCoeffs::perturbed(double amp, double width2) {
  auto c = normal_form();
  c.b11 = Coef::gaussian(amp, width2);
  return c;
}

OperatorCoeffs OperatorCoeffs::named(const std::string& name) {
  if (name == "normal") return normal_form();
  if (name == "perturbed") return perturbed();
  throw Rejected("unknown operator test case '" + name + "'");
}

namespace {

double lift(const Coef& c, const std::array<double, 3>& y) { return c(y); }

template <int N>
Jet<N> lift(const Coef& c, const std::array<Jet<N>, 3>& y) {
  Vec3 yv{y[0].v, y[1].v, y[2].v};
  Jet<N> r(c(yv));
  Vec3 g = c.gradient(yv);
  for (int i = 0; i < N; ++i) r.d[i] = g[0] * y[0].d[i] + g[1] * y[1].d[i] + g[2] * y[2].d[i];
  return r;
}

template <class T>
T equation(const OperatorCoeffs& c, int j, const std::array<T, 3>& y, const T& u, const std::array<T, 3>& p) {
  const T b11 = lift(c.b11, y), b12 = lift(c.b12, y), b13 = lift(c.b13, y);
  const T b22 = lift(c.b22, y), b23 = lift(c.b23, y), b33 = lift(c.b33, y);
  const auto &y1 = y[0], &y2 = y[1], &y3 = y[2];
  const auto &p1 = p[0], &p2 = p[1], &p3 = p[2];
  switch (j) {
    case 1: {
      T M = u + y1 * p1;
      return b11 * M * M + b12 * M * p2 + b13 * M * p3 + y1 * y2 * b22 * p2 * p2 + y1 * b23 * p2 * p3 +
             y1 * y3 * b33 * p3 * p3;
    }
    case 2: {
      T M = u + y2 * p2;
      return y1 * y2 * b11 * p1 * p1 + b12 * M * p1 + y2 * b13 * p1 * p3 + b22 * M * M + b23 * M * p3 +
             y2 * y3 * b33 * p3 * p3;
    }
    case 3: {
      T M = u + y3 * p3;
      return y1 * y3 * b11 * p1 * p1 + b13 * M * p1 + y3 * b12 * p1 * p2 + y2 * y3 * b22 * p2 * p2 +
             b23 * M * p2 + b33 * M * M;
    }
  }
  throw Rejected("normal form equation index must be 1..3");
}

using J7 = Jet<7>;

J7 equation_jet(const OperatorCoeffs& c, int j, const State7& x) {
  std::array<J7, 3> y{J7::var(x[0], 0), J7::var(x[1], 1), J7::var(x[2], 2)};
  J7 u = J7::var(x[3], 3);
  std::array<J7, 3> p{J7::var(x[4], 4), J7::var(x[5], 5), J7::var(x[6], 6)};
  return equation(c, j, y, u, p);
}

// Charpit: y' = F_p, u' = p.F_p, p' = -F_y - p F_u
void charpit_rhs(const OperatorCoeffs& c, int j, const State7& x, State7& dx) {
  J7 F = equation_jet(c, j, x);
  double pfp = 0;
  for (int i = 0; i < 3; ++i) {
    dx[i] = F.d[4 + i];
    pfp += x[4 + i] * F.d[4 + i];
  }
  dx[3] = pfp;
  for (int i = 0; i < 3; ++i) dx[4 + i] = -F.d[i] - x[4 + i] * F.d[3];
}

double eq_at(const OperatorCoeffs& c, int j, const State7& x) {
  return equation<double>(c, j, {x[0], x[1], x[2]}, x[3], {x[4], x[5], x[6]});
}

int surface_axis(int j) { return j == 1 ? 1 : j == 2 ? 2 : 0; }

double fd7(const std::function<double(double)>& g, double h) {
  return (-g(-3 * h) + 9 * g(-2 * h) - 45 * g(-h) + 45 * g(h) - 9 * g(2 * h) + g(3 * h)) / (60 * h);
}

}  // namespace

double nf_equation(const OperatorCoeffs& c, int j, const Vec3& y, double u, const Vec3& p) {
  return equation<double>(c, j, y, u, p);
}

double principal_symbol(const OperatorCoeffs& c, const Vec3& y, const Vec3& xi) {
  return c.b11(y) * y[0] * xi[0] * xi[0] + c.b12(y) * xi[0] * xi[1] + c.b13(y) * xi[0] * xi[2] +
         c.b22(y) * y[1] * xi[1] * xi[1] + c.b23(y) * xi[1] * xi[2] + c.b33(y) * y[2] * xi[2] * xi[2];
}

InitialData InitialData::constant(double c) {
  return {[c](double, double) { return c; }, [](double, double) { return std::array<double, 2>{0, 0}; }};
}

InitialData InitialData::affine(double c0, double ca, double cb) {
  return {[=](double a, double b) { return c0 + ca * a + cb * b; },
          [=](double, double) { return std::array<double, 2>{ca, cb}; }};
}

State7 CharacteristicSolution::initial_state(double sa, double sb) const {
  State7 x{};
  x[tang[0]] = sa;
  x[tang[1]] = sb;
  x[k] = 0;
  x[3] = initial.u(sa, sb);
  auto g = initial.grad(sa, sb);
  x[4 + tang[0]] = g[0];
  x[4 + tang[1]] = g[1];
  x[4 + k] = 0;
  // F is linear in p_k on {y_k = 0}; Newton converges in one step, the rest guards round-off
  for (int it = 0; it < 4; ++it) {
    J7 F = equation_jet(coeffs, which, x);
    double dk = F.d[4 + k];
    if (std::abs(dk) < 1e-8)
      throw Rejected("characteristic_solve: dF/dp" + std::to_string(k + 1) + " vanishes at (" + std::to_string(x[0]) +
                     "," + std::to_string(x[1]) + "," + std::to_string(x[2]) + ")");
    x[4 + k] -= F.v / dk;
    if (std::abs(F.v) < 1e-15) break;
  }
  return x;
}

State7 CharacteristicSolution::flow(double sa, double sb, double t) const {
  State7 x = initial_state(sa, sb);
  if (t == 0) return x;
  auto sys = [this](const State7& s, State7& ds, double) { charpit_rhs(coeffs, which, s, ds); };
  auto st = odeint::make_controlled(cfg.tol, cfg.tol, odeint::runge_kutta_dopri5<State7>());
  odeint::integrate_adaptive(st, sys, x, 0.0, t, t / 8);
  return x;
}

double CharacteristicSolution::eval(const Vec3& y, std::array<double, 3>* params, State7* state) const {
  std::array<double, 3> q;
  bool guess = false;
  if (params) {
    q = *params;
    State7 x = flow(q[0], q[1], q[2]);
    double d = std::abs(x[0] - y[0]) + std::abs(x[1] - y[1]) + std::abs(x[2] - y[2]);
    guess = d < 0.1 * delta;
  }
  if (!guess) {
    double t = y[k] / v0[k];
    q = {y[tang[0]] - v0[tang[0]] * t, y[tang[1]] - v0[tang[1]] * t, t};
  }
  const double e = 1e-6;
  for (int it = 0; it < 30; ++it) {
    State7 x = flow(q[0], q[1], q[2]);
    Eigen::Vector3d r(x[0] - y[0], x[1] - y[1], x[2] - y[2]);
    if (r.lpNorm<Eigen::Infinity>() < 1e-14) {
      if (params) *params = q;
      if (state) *state = x;
      return x[3];
    }
    Eigen::Matrix3d Jm;
    State7 ap = flow(q[0] + e, q[1], q[2]), am = flow(q[0] - e, q[1], q[2]);
    State7 bp = flow(q[0], q[1] + e, q[2]), bm = flow(q[0], q[1] - e, q[2]);
    State7 dx;
    charpit_rhs(coeffs, which, x, dx);
    for (int i = 0; i < 3; ++i) {
      Jm(i, 0) = (ap[i] - am[i]) / (2 * e);
      Jm(i, 1) = (bp[i] - bm[i]) / (2 * e);
      Jm(i, 2) = dx[i];
    }
    Eigen::Vector3d s = Jm.partialPivLu().solve(r);
    for (int i = 0; i < 3; ++i) q[i] -= s[i];
    // the last iterations stall at round-off of the adaptive flow
    if (it >= 6 && r.lpNorm<Eigen::Infinity>() < 1e-12) {
      State7 z = flow(q[0], q[1], q[2]);
      if (params) *params = q;
      if (state) *state = z;
      return z[3];
    }
  }
  throw Rejected("characteristic inversion did not converge at (" + std::to_string(y[0]) + "," +
                 std::to_string(y[1]) + "," + std::to_string(y[2]) + ")");
}

std::function<double(const Vec3&)> CharacteristicSolution::as_function() const {
  return [this](const Vec3& y) {
    // reuse the last inversion of this thread as the Newton start
    thread_local const CharacteristicSolution* owner = nullptr;
    thread_local std::array<double, 3> last{};
    if (owner != this) {
      owner = this;
      double t = y[k] / v0[k];
      last = {y[tang[0]] - v0[tang[0]] * t, y[tang[1]] - v0[tang[1]] * t, t};
    }
    return eval(y, &last);
  };
}

namespace {

// One attempt at a given delta; returns false on strip crossing.
bool build_fan(CharacteristicSolution& s) {
  const double d = s.delta;
  State7 x0 = s.initial_state(0, 0);
  State7 dx;
  charpit_rhs(s.coeffs, s.which, x0, dx);
  for (int i = 0; i < 3; ++i) s.v0[i] = dx[i];
  if (std::abs(s.v0[s.k]) < 1e-8) throw Rejected("characteristic_solve: strips tangent to the initial surface");
  s.tau_max = 1.5 * d / std::abs(s.v0[s.k]);
  const double h = d / s.cfg.fan_per_delta;
  int n[2];
  for (int a = 0; a < 2; ++a) {
    s.fan_halfwidth[a] = d * (1 + 1.5 * std::abs(s.v0[s.tang[a]] / s.v0[s.k]));
    n[a] = int(std::ceil(s.fan_halfwidth[a] / h));
  }
  const int na = 2 * n[0] + 1, nb = 2 * n[1] + 1, ns = s.cfg.tau_samples;
  s.tau.clear();
  for (int i = -ns; i <= ns; ++i) s.tau.push_back(s.tau_max * i / ns);
  s.foot.assign(std::size_t(na) * nb, {0, 0});
  s.states.assign(s.foot.size(), {});
  double drift = 0, init = 0;
#pragma omp parallel for schedule(dynamic) reduction(max : drift, init)
  for (int q = 0; q < na * nb; ++q) {
    const double sa = (q / nb - n[0]) * h, sb = (q % nb - n[1]) * h;
    s.foot[q] = {sa, sb};
    State7 x = s.initial_state(sa, sb);
    init = std::max(init, std::abs(eq_at(s.coeffs, s.which, x)));
    std::vector<State7> out(2 * ns + 1);
    out[ns] = x;
    auto sys = [&s](const State7& a, State7& da, double) { charpit_rhs(s.coeffs, s.which, a, da); };
    for (int dir : {1, -1}) {
      State7 z = x;
      std::vector<double> times;
      for (int i = 0; i <= ns; ++i) times.push_back(dir * s.tau_max * i / ns);
      std::size_t idx = 0;
      auto st = odeint::make_controlled(s.cfg.tol, s.cfg.tol, odeint::runge_kutta_dopri5<State7>());
      odeint::integrate_times(st, sys, z, times.begin(), times.end(), dir * s.tau_max / ns / 4,
                              [&](const State7& w, double) {
                                out[ns + dir * int(idx++)] = w;
                                drift = std::max(drift, std::abs(eq_at(s.coeffs, s.which, w)));
                              });
    }
    s.states[q] = std::move(out);
  }
  s.init_residual = init;
  s.max_drift = drift;
  s.n_strips = s.foot.size();
  // Jacobian of (sa, sb, tau) -> y from fan neighbours, restricted to the delta-ball
  double worst = 1e300;
  for (int ia = 1; ia + 1 < na; ++ia)
    for (int ib = 1; ib + 1 < nb; ++ib) {
      const auto& c = s.states[ia * nb + ib];
      const auto& ap = s.states[(ia + 1) * nb + ib];
      const auto& am = s.states[(ia - 1) * nb + ib];
      const auto& bp = s.states[ia * nb + ib + 1];
      const auto& bm = s.states[ia * nb + ib - 1];
      auto jac = [&](int ti) {
        State7 v;
        charpit_rhs(s.coeffs, s.which, c[ti], v);
        Eigen::Matrix3d J;
        for (int i = 0; i < 3; ++i) {
          J(i, 0) = (ap[ti][i] - am[ti][i]) / (2 * h);
          J(i, 1) = (bp[ti][i] - bm[ti][i]) / (2 * h);
          J(i, 2) = v[i];
        }
        return J.determinant();
      };
      const double det0 = jac(ns);
      for (int ti = 0; ti < 2 * ns + 1; ++ti) {
        const auto& x = c[ti];
        if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] > d * d) continue;
        worst = std::min(worst, jac(ti) / det0);
      }
    }
  s.min_det_ratio = worst;
  return worst >= s.cfg.crossing_ratio;
}

}  // namespace

CharacteristicSolution characteristic_solve(const OperatorCoeffs& c, int j, const InitialData& u0,
                                            const NormalFormConfig& cfg) {
  if (j < 1 || j > 3) throw Rejected("characteristic_solve: j must be 1..3");
  c.check();
  CharacteristicSolution s;
  s.which = j;
  s.coeffs = c;
  s.initial = u0;
  s.cfg = cfg;
  s.k = surface_axis(j);
  s.tang = j == 1 ? std::array<int, 2>{0, 2} : j == 2 ? std::array<int, 2>{0, 1} : std::array<int, 2>{1, 2};
  if (std::abs(u0.u(0, 0)) < 1e-12) throw Rejected("characteristic_solve: initial data vanishes at 0");
  s.delta_requested = cfg.delta;
  s.delta = cfg.delta;
  while (!build_fan(s)) {
    if (++s.shrinks > cfg.max_shrinks) throw Rejected("characteristic_solve: strips cross for every tried delta");
    s.delta *= cfg.shrink;
  }
  return s;
}

bool NormalFormResiduals::pass(double tol) const {
  for (int j = 0; j < 3; ++j)
    if (!(sup_residual[j] < tol) || !(sup_transformed[j] < tol)) return false;
  return true;
}

NormalFormResiduals verify_normal_form(const OperatorCoeffs& c, const std::array<std::function<double(const Vec3&)>, 3>& f,
                                       double radius, double h) {
  std::vector<Vec3> pts;
  const int n = 3;
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b)
      for (int d = -n; d <= n; ++d) {
        Vec3 y{radius * a / n, radius * b / n, radius * d / n};
        if (y[0] * y[0] + y[1] * y[1] + y[2] * y[2] <= radius * radius * (1 + 1e-12)) pts.push_back(y);
      }
  NormalFormResiduals out;
  out.points.resize(pts.size());
  out.n_points = pts.size();
#pragma omp parallel for schedule(dynamic)
  for (std::size_t q = 0; q < pts.size(); ++q) {
    NormalFormPoint P;
    P.y = pts[q];
    for (int j = 0; j < 3; ++j) {
      double u = f[j](P.y);
      Vec3 g;
      for (int i = 0; i < 3; ++i)
        g[i] = fd7(
            [&](double s) {
              Vec3 z = P.y;
              z[i] += s;
              return f[j](z);
            },
            h);
      P.f[j] = u;
      P.res[j] = nf_equation(c, j + 1, P.y, u, g);
      Vec3 dY;
      for (int i = 0; i < 3; ++i) dY[i] = P.y[j] * g[i] + (i == j ? u : 0.0);
      P.transformed[j] = principal_symbol(c, P.y, dY);
    }
    out.points[q] = P;
  }
  out.min_abs_f = 1e300;
  for (const auto& P : out.points)
    for (int j = 0; j < 3; ++j) {
      out.min_abs_f = std::min(out.min_abs_f, std::abs(P.f[j]));
      out.max_dev_from_one = std::max(out.max_dev_from_one, std::abs(P.f[j] - 1));
      out.sup_residual[j] = std::max(out.sup_residual[j], std::abs(P.res[j]));
      out.sup_transformed[j] = std::max(out.sup_transformed[j], std::abs(P.transformed[j]));
      out.identity_gap = std::max(out.identity_gap, std::abs(P.transformed[j] - P.y[j] * P.res[j]));
    }
  if (out.min_abs_f < 1e-6) throw Rejected("verify_normal_form: f_j vanishes on the ball");
  return out;
}

ConsistencyCheck interpolation_consistency(const CharacteristicSolution& s, double h, int npoints) {
  ConsistencyCheck cc;
  auto f = s.as_function();
  const std::size_t nf = s.foot.size(), nt = s.tau.size();
  int used = 0;
  for (std::size_t q = nf / 2; q < nf && used < npoints; q += std::max<std::size_t>(1, nf / (4 * npoints) + 1))
    for (std::size_t t = nt / 4; t < nt && used < npoints; t += nt / 4) {
      const State7& x = s.states[q][t];
      Vec3 y{x[0], x[1], x[2]};
      if (y[0] * y[0] + y[1] * y[1] + y[2] * y[2] > 0.25 * s.delta * s.delta) continue;
      ++used;
      cc.max_native = std::max(cc.max_native, std::abs(eq_at(s.coeffs, s.which, x)));
      Vec3 g;
      for (int i = 0; i < 3; ++i) {
        g[i] = fd7(
            [&](double d) {
              Vec3 z = y;
              z[i] += d;
              return f(z);
            },
            h);
        cc.max_grad_gap = std::max(cc.max_grad_gap, std::abs(g[i] - x[4 + i]));
      }
      cc.max_fd = std::max(cc.max_fd, std::abs(nf_equation(s.coeffs, s.which, y, f(y), g)));
    }
  return cc;
}

}  // namespace cwl

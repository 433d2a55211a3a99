#include "cwl/profiles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>

namespace cwl {

Symbol1D Symbol1D::bessel(double m, double lambda) {
  Symbol1D s;
  s.order = m;
  s.elliptic = true;
  const double l2 = lambda * lambda;
  s.eval = [m, l2](double eta) { return std::pow(l2 + eta * eta, 0.5 * m); };
  s.name = "bessel";
  return s;
}

Symbol1D Symbol1D::zero(double m) {
  Symbol1D s;
  s.order = m;
  s.elliptic = false;
  s.eval = [](double) { return 0.0; };
  s.name = "zero";
  return s;
}

SymbolCheck check_symbol(const Symbol1D& a, double eta_max) {
  SymbolCheck c;
  double lo = std::numeric_limits<double>::infinity();
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    double eta = std::exp(std::log(eta_max) * i / n);
    double w = std::pow(1 + eta, a.order);
    double v = std::abs(a(eta));
    double hd = 1e-6 * eta;
    double d = std::abs(a(eta + hd) - a(eta - hd)) / (2 * hd);
    c.upper_const = std::max(c.upper_const, v / w);
    c.deriv_const = std::max(c.deriv_const, d / (w / (1 + eta)));
    lo = std::min(lo, v / w);
  }
  c.lower_const = lo;
  c.ok = std::isfinite(c.upper_const) && std::isfinite(c.deriv_const);
  if (a.elliptic && !(lo > 0)) c.ok = false;
  return c;
}

double spectral_taper(double eta, double K, double width) {
  return smooth_step((K - std::abs(eta)) / (width * K));
}

ConormalProfile synthesize_profile(const Symbol1D& a, const Grid1D& g, SynthOptions opt) {
  if (!(a.order < -1)) throw Rejected("synthesize_profile: symbol order must be < -1");
  const double K = opt.cutoff > 0 ? std::min(opt.cutoff, g.nyquist()) : g.nyquist();
  std::vector<cplx> F(g.n);
  for (std::size_t k = 0; k < g.n; ++k) {
    double eta = g.freq(k);
    if (std::abs(eta) > K) continue;
    double w = opt.taper_width > 0 ? spectral_taper(eta, K, opt.taper_width) : 1.0;
    F[k] = 2 * pi * a(eta) * w;
  }
  auto f = dft_inverse(F, g);
  ConormalProfile p;
  p.grid = g;
  p.order = a.order;
  p.samples.resize(g.n);
  for (std::size_t j = 0; j < g.n; ++j) p.samples[j] = f[j].real();
  p.tail_estimate = 2 * std::abs(a(K)) * K / (-a.order - 1);
  p.coarse = g.nyquist() < 32;
  return p;
}

int k_of_m(double m) {
  if (!(m < -1)) throw Rejected("k_of_m: requires m < -1");
  int k = int(std::ceil(-m - 2));
  return std::max(k, 0);
}

double piriou_cutoff(double s) { return bump(s); }

std::vector<double> spectral_derivatives_at_zero(const ConormalProfile& p, int jmax) {
  auto F = dft_forward(p.samples, p.grid);
  const double s = 1.0 / (double(p.grid.n) * p.grid.h());
  std::vector<double> d(jmax + 1, 0.0);
  for (int j = 0; j <= jmax; ++j) {
    cplx acc = 0;
    for (std::size_t k = 0; k < p.grid.n; ++k) acc += F[k] * std::pow(cplx(0, p.grid.freq(k)), j);
    d[j] = (acc * s).real();
  }
  return d;
}

namespace {

// Taylor coefficients of exp(-s^2/(1-s^2)) up to s^n.
std::vector<double> cutoff_series(int n) {
  std::vector<double> q(n + 1, 0.0), e(n + 1, 0.0);
  for (int i = 2; i <= n; i += 2) q[i] = -1.0;
  e[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    double acc = 0;
    for (int k = 1; k <= i; ++k) acc += k * q[k] * e[i - k];
    e[i] = acc / i;
  }
  return e;
}

}  // namespace

PiriouSplit piriou_decompose(const ConormalProfile& p) {
  if (!(p.order < -1)) throw Rejected("piriou_decompose: order must be < -1");
  if (p.grid.h() > 1.0 / 32) throw Rejected("piriou_decompose: grid too coarse to resolve the Taylor cutoff");
  if (p.grid.origin() > -1.0) throw Rejected("piriou_decompose: grid must contain [-1,1]");
  PiriouSplit out;
  out.k = k_of_m(p.order);
  const int k = out.k;

  auto F = dft_forward(p.samples, p.grid);
  const double s = 1.0 / (double(p.grid.n) * p.grid.h());
  std::vector<double> moment(k + 1);
  for (int j = 0; j <= k; ++j) {
    cplx acc = 0;
    double scale = 0;
    for (std::size_t q = 0; q < p.grid.n; ++q) {
      cplx t = F[q] * std::pow(cplx(0, p.grid.freq(q)), j);
      acc += t;
      scale += std::abs(t);
    }
    moment[j] = (acc * s).real();
    if (std::abs(moment[j]) <= 1e-12 * scale * s) moment[j] = 0.0;
  }

  std::vector<double> T(k + 1);
  double fact = 1;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) fact *= j;
    T[j] = moment[j] / fact;
  }
  auto chi = cutoff_series(k);
  out.taylor_coeffs.assign(k + 1, 0.0);
  for (int n = 0; n <= k; ++n) {
    double v = T[n];
    for (int i = 1; i <= n; ++i) v -= chi[i] * out.taylor_coeffs[n - i];
    out.taylor_coeffs[n] = v;
  }

  out.taylor.assign(p.grid.n, 0.0);
  out.singular = p;
  for (std::size_t j = 0; j < p.grid.n; ++j) {
    double x = p.grid.node(j), c = piriou_cutoff(x);
    if (c != 0) {
      double poly = 0;
      for (int i = k; i >= 0; --i) poly = poly * x + out.taylor_coeffs[i];
      out.taylor[j] = poly * c;
    }
    out.singular.samples[j] = p.samples[j] - out.taylor[j];
  }
  return out;
}

PowerProfile profile_power(const PiriouSplit& split, int j) {
  if (j < 1) throw Rejected("profile_power: power must be >= 1");
  PowerProfile out;
  out.profile = split.singular;
  for (auto& v : out.profile.samples) v = std::pow(v, j);
  out.predicted_order = split.singular.order - double(j - 1) * split.k;
  out.profile.order = out.predicted_order;
  return out;
}

// ---- exact rational polynomials ----

namespace {

using Poly = std::vector<mpq_class>;

Poly pmul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, mpq_class(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

void padd(Poly& a, const Poly& b, const mpq_class& s) {
  if (a.size() < b.size()) a.resize(b.size(), mpq_class(0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += s * b[i];
}

Poly ppow_linear(const mpq_class& root, int e) {
  Poly r{mpq_class(1)};
  Poly lin{-root, mpq_class(1)};
  for (int i = 0; i < e; ++i) r = pmul(r, lin);
  return r;
}

mpq_class factorial(int n) {
  mpz_class f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return mpq_class(f);
}

// p(x) -> p(x + a)
Poly pshift(const Poly& p, const mpq_class& a) {
  Poly out{mpq_class(0)};
  Poly xa{a, mpq_class(1)};
  for (std::size_t i = p.size(); i-- > 0;) {
    out = pmul(out, xa);
    out[0] += p[i];
  }
  return out;
}

Poly pderiv(const Poly& p) {
  if (p.size() <= 1) return {mpq_class(0)};
  Poly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * mpq_class(long(i));
  return d;
}

}  // namespace

mpq_class RationalPoly::operator()(const mpq_class& x) const {
  mpq_class acc = 0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

double RationalPoly::eval(double x) const {
  double acc = 0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i].get_d();
  return acc;
}

RationalPoly RationalPoly::derivative() const { return RationalPoly{pderiv(c)}; }

mpq_class MollifierPoly::exact(const mpq_class& s, int deriv) const {
  RationalPoly p = g;
  for (int i = 0; i < deriv; ++i) p = p.derivative();
  return p(s);
}

double MollifierPoly::operator()(double s, int deriv) const { return exact(mpq_class(s), deriv).get_d(); }

MollifierPoly mollifier_polynomial(long N, int r) {
  if (N < 4) throw Rejected("mollifier_polynomial: N must be >= 4");
  if (r < 1) throw Rejected("mollifier_polynomial: r must be >= 1");
  if (r > 20) throw Rejected("mollifier_polynomial: r > 20 rejected (factorial growth)");
  MollifierPoly mp;
  mp.N = N;
  mp.r = r;
  mpq_class sign = (r + 1) % 2 == 0 ? 1 : -1;
  mp.A = sign * factorial(2 * r + 2) / (mpq_class(3 * (r + 1)) * factorial(r) * factorial(r));
  for (int j = 0; j <= r + 1; ++j) {
    mpq_class sj = j % 2 == 0 ? 1 : -1;
    mp.C.push_back(sj * factorial(r + 1) / factorial(r + 1 - j) * factorial(r) / factorial(r + j + 1));
  }
  for (int j = 0; j <= r; ++j) {
    mpq_class sj = j % 2 == 0 ? 1 : -1;
    mp.D.push_back(sj * factorial(r) / factorial(r - j) * factorial(r) / factorial(r + j + 1));
  }
  // G(sigma), sigma = s/N
  Poly G{mpq_class(0)};
  for (int j = 0; j <= r + 1; ++j)
    padd(G, pmul(ppow_linear(1, r + 1 - j), ppow_linear(2, r + j + 1)), mp.A * mp.C[j]);
  for (int j = 0; j <= r; ++j)
    padd(G, pmul(ppow_linear(1, r - j), ppow_linear(2, r + j + 1)), mp.A * mp.D[j]);
  mp.g.c.resize(G.size());
  mpq_class Nk = 1;
  for (std::size_t k = 0; k < G.size(); ++k) {
    mp.g.c[k] = G[k] / Nk;
    Nk *= N;
  }
  return mp;
}

namespace {

double chi_norm() {
  static const double c = [] {
    auto f = [](double t) { return bump(t / 2); };
    return 1.0 / boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -2.0, 2.0, 15, 1e-14);
  }();
  return c;
}

}  // namespace

PsiMollifier::PsiMollifier(MollifierPoly mp) : mp_(std::move(mp)) {
  // G in sigma, re-centred at sigma = 3/2 for stable double evaluation
  Poly G(mp_.g.c.size());
  mpq_class Nk = 1;
  for (std::size_t k = 0; k < G.size(); ++k) {
    G[k] = mp_.g.c[k] * Nk;
    Nk *= mp_.N;
  }
  Poly cur = G;
  for (int m = 0; m <= mp_.r; ++m) {
    Poly sh = pshift(cur, mpq_class(3, 2));
    std::vector<double> d(sh.size());
    for (std::size_t i = 0; i < sh.size(); ++i) d[i] = sh[i].get_d();
    dg_.push_back(std::move(d));
    cur = pderiv(cur);
  }
}

double PsiMollifier::operator()(double eta, int deriv) const {
  if (deriv < 0 || deriv > mp_.r) throw Rejected("psi_mollifier: derivative order must be in [0, r]");
  const double N = double(mp_.N);
  if (eta <= N - 2) return deriv == 0 ? 1.0 : 0.0;
  if (eta >= 2 * N + 2) return 0.0;
  const auto& c = dg_[deriv];
  const double scale = std::pow(N, -deriv);
  auto gt = [&](double s) {
    if (s < N) return deriv == 0 ? 1.0 : 0.0;
    if (s > 2 * N) return 0.0;
    double t = s / N - 1.5, acc = 0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
    return acc * scale;
  };
  auto f = [&](double t) { return bump(t / 2) * gt(eta - t); };
  // panel breaks where eta - t hits N or 2N
  std::vector<double> br{-2.0, 2.0};
  for (double b : {eta - N, eta - 2 * N})
    if (b > -2 && b < 2) br.push_back(b);
  std::sort(br.begin(), br.end());
  double acc = 0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i)
    acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, br[i], br[i + 1], 12, 1e-13);
  return acc * chi_norm();
}

double scaled_derivative_sup(const PsiMollifier& psi, int m, int samples) {
  const double N = double(psi.poly().N);
  double lo = N - 2, hi = 2 * N + 2, best = 0;
#pragma omp parallel for reduction(max : best)
  for (int i = 0; i <= samples; ++i) {
    double eta = lo + (hi - lo) * i / samples;
    best = std::max(best, std::abs(std::pow(eta, m) * psi(eta, m)));
  }
  return best;
}

}  // namespace cwl

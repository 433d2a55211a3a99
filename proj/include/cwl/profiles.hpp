#pragma once

#include <gmpxx.h>

#include <functional>
#include <string>
#include <vector>

#include "cwl/spectral.hpp"

namespace cwl {

struct Symbol1D {
  double order = -2.6;
  std::function<double(double)> eval;
  bool elliptic = true;
  std::string name;

  double operator()(double eta) const { return eval(eta); }

  // (lambda^2 + eta^2)^{m/2}
  static Symbol1D bessel(double m, double lambda = 1.0);
  static Symbol1D zero(double m = -2.0);
};

struct SymbolCheck {
  bool ok = true;
  double upper_const = 0, deriv_const = 0, lower_const = 0;
};
// Sample the S^m bounds on a log grid of |eta| in [1, eta_max].
SymbolCheck check_symbol(const Symbol1D& a, double eta_max = 1e6);

// Smooth spectral taper: 1 below (1-width)*K, 0 above K.
double spectral_taper(double eta, double K, double width = 0.2);

struct ConormalProfile {
  Grid1D grid;
  std::vector<double> samples;
  double order = 0;
  double tail_estimate = 0;  // bound on the discarded |eta| > cutoff part
  bool coarse = false;
};

struct SynthOptions {
  double cutoff = 0;        // 0: grid Nyquist
  double taper_width = 0;  // >0: smooth taper of that relative width below the cutoff
};

ConormalProfile synthesize_profile(const Symbol1D& a, const Grid1D& g, SynthOptions opt = {});

int k_of_m(double m);

struct PiriouSplit {
  int k = 0;
  std::vector<double> taylor_coeffs;  // p(s) = sum c_j s^j, Taylor part p(s)*cutoff(s)
  std::vector<double> taylor;         // sampled Taylor part
  ConormalProfile singular;
};

// exp(1 - 1/(1-s^2)) on |s|<1
double piriou_cutoff(double s);
// f^{(j)}(0) of the trigonometric interpolant, j = 0..jmax
std::vector<double> spectral_derivatives_at_zero(const ConormalProfile& p, int jmax);
PiriouSplit piriou_decompose(const ConormalProfile& p);

struct PowerProfile {
  ConormalProfile profile;
  double predicted_order = 0;
};
PowerProfile profile_power(const PiriouSplit& split, int j);

// Polynomial with exact rational coefficients, c[k] multiplies x^k.
struct RationalPoly {
  std::vector<mpq_class> c;
  mpq_class operator()(const mpq_class& x) const;
  double eval(double x) const;
  RationalPoly derivative() const;
};

struct MollifierPoly {
  long N = 4;
  int r = 1;
  mpq_class A;
  std::vector<mpq_class> C;  // C_{j,r}, j = 0..r+1
  std::vector<mpq_class> D;  // D_{j,r}, j = 0..r
  RationalPoly g;            // g_{N,r}(s) in the variable s

  mpq_class exact(const mpq_class& s, int deriv = 0) const;
  double operator()(double s, int deriv = 0) const;
};

MollifierPoly mollifier_polynomial(long N, int r);

// psi = chi * gtilde with gtilde = 1 (s<N), g (N<=s<=2N), 0 (s>2N); chi a
// normalized bump on |s|<2.
class PsiMollifier {
 public:
  explicit PsiMollifier(MollifierPoly mp);
  double operator()(double eta, int deriv = 0) const;
  const MollifierPoly& poly() const { return mp_; }

 private:
  MollifierPoly mp_;
  std::vector<std::vector<double>> dg_;  // double coefficients of g^{(m)} in s/N
};

// max over eta of |eta^m psi^{(m)}(eta)|
double scaled_derivative_sup(const PsiMollifier& psi, int m, int samples = 4000);

}  // namespace cwl

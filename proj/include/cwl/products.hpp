#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "cwl/beals.hpp"
#include "cwl/profiles.hpp"

namespace cwl {

// ---- conormal products ----

// v(y) = (c0 + c1 y1 + c2 y2 + c3 y3) * f(y_axis), f synthesized from the symbol.
struct YSymbol {
  Symbol1D a;
  int axis = 0;
  std::array<double, 4> q{1, 0, 0, 0};
  bool frozen() const { return q[1] == 0 && q[2] == 0 && q[3] == 0; }
};

Field3D triple_product_leading(const Symbol1D& a1, const Symbol1D& a2, const Symbol1D& a3, const Grid3D& g);

struct ProductFields {
  Field3D product;  // v1 v2 v3 (or v1 v2)
  Field3D w;        // leading term with symbols frozen at y = 0
  Field3D E;        // product - w
};
ProductFields triple_product_fields(const std::array<YSymbol, 3>& v, const Grid3D& g);
ProductFields pairwise_product_fields(const YSymbol& v1, const YSymbol& v2, const Grid3D& g);

struct ProductScan {
  std::string label;
  BealsWeight weight;
  MembershipScan E_scan, w_scan;
  bool pass() const { return E_scan.member && !w_scan.member && !E_scan.inconclusive && !w_scan.inconclusive; }
};

struct ProductScanConfig {
  double extent = 8.0;
  double cutoff_radius = 3.0;
  std::vector<std::size_t> resolutions{32, 64, 128, 256};
  double threshold = 0.25;
};

// E against weight (s, k) where slot `improved` carries -m+0.4 and the others -m-0.6.
ProductScan triple_product_remainder(const std::array<YSymbol, 3>& v, int improved, double m,
                                     const ProductScanConfig& cfg, const std::string& label);
ProductScan pairwise_product(const YSymbol& v1, const YSymbol& v2, int improved, double m,
                             const ProductScanConfig& cfg, const std::string& label);

// ---- convolution asymptotics ----

// a(eta) = prod a_j(eta_j)
struct SeparableA {
  std::array<std::function<double(double)>, 3> f;
  double operator()(double e1, double e2, double e3) const { return f[0](e1) * f[1](e2) * f[2](e3); }
  static SeparableA bessel(double m);
  static SeparableA gaussian(double width);
};

// b(eta) = prod beta_j(eta_j) * <eta>^{-gamma} / norm
struct WeightB {
  std::array<std::function<double(double)>, 3> beta;
  double gamma = 0;
  double norm = 1;
  double scale = 1;  // smallest feature width, sets the quadrature mesh
  double operator()(double e1, double e2, double e3) const;
  static WeightB weighted(double m, double delta_b);  // prod <eta_j>^{m+1/2-delta_b} <eta>^{-1-delta_b}
  static WeightB gaussian(double width);
  static WeightB zero();
};

struct ConvolutionProbe {
  double kappa2 = 1, kappa3 = 1;
  double delta = 0.3;
  double alpha = 0.5, beta = 2.0;
};

// Region index: bit j set means axis j is L (|eta_j - xi theta_j| <= delta |xi|).
// Order GGG, LGG, GLG, LLG, GGL, LGL, GLL, LLL.
std::string region_name(int mask);

struct RegionTable {
  double xi = 0;
  double conv = 0;        // a*b(xi theta)
  double conv_check = 0;  // same on an independent mesh without region breakpoints
  double main = 0;        // a(xi theta) int b
  double R = 0;           // conv - main
  std::array<double, 8> I{};  // int over A_region of a(xi theta - eta) b
  std::array<double, 8> Ib{};  // int over A_region of b
  double ggg_diff = 0;    // int_GGG (a(xi theta - eta) - a(xi theta)) b
  double gggc_main = 0;   // a(xi theta) int_{GGG^c} b
  std::array<double, 8> E1{}, E2{};  // split of two->= regions
  double partition_residual = 0;
  double quad_change = 0;  // relative change of R under mesh refinement (when checked)
};

class ConvolutionEngine {
 public:
  ConvolutionEngine(SeparableA a, WeightB b, double m, double delta);
  RegionTable evaluate(double xi, double kappa2, double kappa3, bool refine_check = false) const;
  double b_integral() const { return 1.0; }  // b is normalized on construction
  const WeightB& b() const { return b_; }
  const SeparableA& a() const { return a_; }
  double mu() const { return mu_; }

 private:
  struct Axis;
  SeparableA a_;
  WeightB b_;
  double m_, delta_, mu_;
  std::vector<double> tn_, tw_;  // Laplace variable nodes/weights (with t^{gamma/2-1} e^{-t}/Gamma folded in)
  RegionTable eval_mesh(double xi, const std::array<double, 3>& c, double h0, int subdiv, bool split) const;
};

// Brute-force tensor Gauss-Legendre over a box; independent oracle for small problems.
double convolution_direct_3d(const SeparableA& a, const WeightB& b, std::array<double, 3> c, double X, int panels,
                             int order = 8);

struct RayResult {
  std::vector<RegionTable> rows;
};
RayResult convolution_ray(const ConvolutionEngine& eng, const ConvolutionProbe& p, const std::vector<double>& xi,
                          bool refine_check = true);

// Partial integrals over kappa in (alpha,beta)^2, xi in (1, Xi_k) for Xi_k = 2^k.
struct LadderResult {
  std::string label;
  double exponent = 0;  // weight |xi|^exponent |.|^2
  std::vector<double> cutoffs, partials;
  double last_tail = 0;  // relative increase over the final doubling
  bool cauchy = false;   // last_tail < 1%
  bool grows = false;    // last_tail >= 10%
};

struct WeightedIntegrals {
  LadderResult R;
  std::array<LadderResult, 8> region;  // GGG unused
  std::array<LadderResult, 8> E1, E2;  // two->= regions only
};

struct LadderConfig {
  int max_doublings = 10;
  int xi_nodes_per_doubling = 6;
  int kappa_nodes = 4;
  double eps = 0.05;
};

// Evaluate region tables on the kappa/xi quadrature once; weights are applied per exponent.
struct LadderSamples {
  LadderConfig cfg;
  double alpha = 0.5, beta = 2.0;
  std::vector<double> xi, wxi;           // nodes and dxi weights
  std::vector<int> doubling;             // which doubling [2^k, 2^{k+1}] each xi node belongs to
  std::vector<std::array<double, 2>> kappa;
  std::vector<double> wk;
  std::vector<RegionTable> tables;       // xi-major
};
LadderSamples sample_ladder(const ConvolutionEngine& eng, const ConvolutionProbe& p, const LadderConfig& cfg);
LadderResult weighted_ladder(const LadderSamples& s, double exponent, const std::function<double(const RegionTable&)>& pick,
                             const std::string& label);
WeightedIntegrals remainder_weighted_integrals(const LadderSamples& s, double m, double r);

double r_max(double m);

}  // namespace cwl

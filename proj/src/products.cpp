#include "cwl/products.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>

namespace cwl {

namespace {

std::vector<double> synth_on(const Symbol1D& a, const Grid1D& g) { return synthesize_profile(a, g).samples; }

double qeval(const std::array<double, 4>& q, double y1, double y2, double y3) {
  return q[0] + q[1] * y1 + q[2] * y2 + q[3] * y3;
}

// Builds w and E (and optionally the full product) for any number of factors.
ProductFields build_product(const std::vector<YSymbol>& v, const Grid3D& g, bool keep_product) {
  std::vector<std::vector<double>> f;
  for (const auto& s : v) {
    if (s.axis < 0 || s.axis > 2) throw Rejected("product: factor axis must be 0..2");
    f.push_back(synth_on(s.a, g.axes[s.axis]));
  }
  ProductFields out;
  out.w = Field3D(g);
  out.E = Field3D(g);
  if (keep_product) out.product = Field3D(g);
  const std::size_t n1 = g.axes[0].n, n2 = g.axes[1].n, n3 = g.axes[2].n;
  double q0 = 1;
  for (const auto& s : v) q0 *= s.q[0];
#pragma omp parallel for
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j)
      for (std::size_t k = 0; k < n3; ++k) {
        const std::size_t idx[3] = {i, j, k};
        double y1 = g.axes[0].node(i), y2 = g.axes[1].node(j), y3 = g.axes[2].node(k);
        double fp = 1, qp = 1;
        for (std::size_t a = 0; a < v.size(); ++a) {
          fp *= f[a][idx[v[a].axis]];
          qp *= qeval(v[a].q, y1, y2, y3);
        }
        std::size_t q = (i * n2 + j) * n3 + k;
        out.w.data[q] = q0 * fp;
        // (qp - q0) fp, not qp fp - q0 fp, so that frozen symbols give E == 0 exactly
        out.E.data[q] = (qp - q0) * fp;
        if (keep_product) out.product.data[q] = qp * fp;
      }
  return out;
}

BealsWeight improved_weight(int improved, double m, bool pair) {
  std::array<double, 3> k;
  for (int j = 0; j < 3; ++j) k[j] = j == improved ? -m + 0.4 : -m - 0.6;
  if (pair) {
    // the slot not carrying a factor stays unweighted
    for (int j = 0; j < 3; ++j)
      if (j == 2) k[j] = 0;
  }
  return BealsWeight{0, k[0], k[1], k[2]};
}

ProductScan scan_product(const std::vector<YSymbol>& v, int improved, double m, const ProductScanConfig& cfg,
                         const std::string& label, bool pair) {
  ProductScan ps;
  ps.label = label;
  ps.weight = improved_weight(improved, m, pair);
  auto cutoff = product_bump_cutoff(cfg.cutoff_radius);
  for (auto* s : {&ps.E_scan, &ps.w_scan}) {
    s->weight = ps.weight;
    s->resolutions = cfg.resolutions;
    s->threshold = cfg.threshold;
  }
  for (auto N : cfg.resolutions) {
    Grid3D g{{Grid1D{cfg.extent, N}, Grid1D{cfg.extent, N}, Grid1D{cfg.extent, N}}};
    auto pf = build_product(v, g, false);
    ps.w_scan.norms.push_back(BealsSpectrum(pf.w, cutoff).norm(ps.weight));
    pf.w.data.clear();
    pf.w.data.shrink_to_fit();
    ps.E_scan.norms.push_back(BealsSpectrum(pf.E, cutoff).norm(ps.weight));
  }
  classify_scan(ps.E_scan);
  classify_scan(ps.w_scan);
  return ps;
}

}  // namespace

Field3D triple_product_leading(const Symbol1D& a1, const Symbol1D& a2, const Symbol1D& a3, const Grid3D& g) {
  return outer_product(g, synth_on(a1, g.axes[0]), synth_on(a2, g.axes[1]), synth_on(a3, g.axes[2]));
}

ProductFields triple_product_fields(const std::array<YSymbol, 3>& v, const Grid3D& g) {
  return build_product({v[0], v[1], v[2]}, g, true);
}

ProductFields pairwise_product_fields(const YSymbol& v1, const YSymbol& v2, const Grid3D& g) {
  return build_product({v1, v2}, g, true);
}

ProductScan triple_product_remainder(const std::array<YSymbol, 3>& v, int improved, double m,
                                     const ProductScanConfig& cfg, const std::string& label) {
  return scan_product({v[0], v[1], v[2]}, improved, m, cfg, label, false);
}

ProductScan pairwise_product(const YSymbol& v1, const YSymbol& v2, int improved, double m,
                             const ProductScanConfig& cfg, const std::string& label) {
  if (improved > 1) throw Rejected("pairwise_product: improved slot must be 0 or 1");
  return scan_product({v1, v2}, improved, m, cfg, label, true);
}

// ---- convolution ----

SeparableA SeparableA::bessel(double m) {
  SeparableA a;
  for (auto& f : a.f) f = [m](double z) { return std::pow(1 + z * z, 0.5 * m); };
  return a;
}

SeparableA SeparableA::gaussian(double width) {
  SeparableA a;
  for (auto& f : a.f) f = [width](double z) { return std::exp(-0.5 * z * z / (width * width)); };
  return a;
}

double WeightB::operator()(double e1, double e2, double e3) const {
  double v = beta[0](e1) * beta[1](e2) * beta[2](e3);
  if (gamma != 0) v *= std::pow(1 + e1 * e1 + e2 * e2 + e3 * e3, -0.5 * gamma);
  return v / norm;
}

WeightB WeightB::weighted(double m, double delta_b) {
  if (!(delta_b > 0)) throw Rejected("WeightB: delta_b must be positive");
  WeightB b;
  const double p = m + 0.5 - delta_b;
  for (auto& f : b.beta) f = [p](double z) { return std::pow(1 + z * z, 0.5 * p); };
  b.gamma = 1 + delta_b;
  return b;
}

WeightB WeightB::gaussian(double width) {
  WeightB b;
  const double c = 1.0 / (std::sqrt(2 * pi) * width);
  for (auto& f : b.beta) f = [width, c](double z) { return c * std::exp(-0.5 * z * z / (width * width)); };
  b.gamma = 0;
  b.scale = width;
  return b;
}

WeightB WeightB::zero() {
  WeightB b;
  for (auto& f : b.beta) f = [](double) { return 0.0; };
  return b;
}

std::string region_name(int mask) {
  std::string s;
  for (int j = 0; j < 3; ++j) s += (mask >> j) & 1 ? 'L' : 'G';
  return s;
}

namespace {

using GL = boost::math::quadrature::gauss<double, 10>;

// Full set of Gauss-Legendre nodes/weights on [-1,1].
const std::vector<std::array<double, 2>>& gl10() {
  static const std::vector<std::array<double, 2>> nodes = [] {
    std::vector<std::array<double, 2>> v;
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
      v.push_back({x[i], w[i]});
      if (x[i] != 0) v.push_back({-x[i], w[i]});
    }
    return v;
  }();
  return nodes;
}

// Panel boundaries on [-X, X]: geometric grading away from features, plus hard breakpoints.
std::vector<double> graded_mesh(const std::vector<double>& features, std::vector<double> breaks, double X, double h0,
                                int subdiv) {
  std::vector<double> pts = std::move(breaks);
  pts.push_back(-X);
  pts.push_back(X);
  for (double f : features) {
    pts.push_back(f);
    for (double d = h0; d < 2 * X; d *= 2) {
      pts.push_back(f + d);
      pts.push_back(f - d);
    }
  }
  std::vector<double> in;
  for (double p : pts)
    if (p >= -X && p <= X) in.push_back(p);
  std::sort(in.begin(), in.end());
  std::vector<double> u;
  for (double p : in)
    if (u.empty() || p - u.back() > 1e-13 * std::max(1.0, std::abs(p))) u.push_back(p);
  if (subdiv <= 1) return u;
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < u.size(); ++i)
    for (int s = 0; s < subdiv; ++s) out.push_back(u[i] + (u[i + 1] - u[i]) * s / subdiv);
  out.push_back(u.back());
  return out;
}

struct Nodes {
  std::vector<double> x, w;
};

Nodes quad_nodes(const std::vector<double>& mesh) {
  Nodes n;
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    double a = mesh[i], b = mesh[i + 1], h = 0.5 * (b - a), c = 0.5 * (a + b);
    for (const auto& [x, w] : gl10()) {
      n.x.push_back(c + h * x);
      n.w.push_back(h * w);
    }
  }
  return n;
}

}  // namespace

ConvolutionEngine::ConvolutionEngine(SeparableA a, WeightB b, double m, double delta)
    : a_(std::move(a)), b_(std::move(b)), m_(m), delta_(delta) {
  if (!(m < -0.5)) throw Rejected("ConvolutionEngine: need m < -1/2");
  mu_ = 1.0 / (-m - 0.5);
  if (b_.gamma == 0) {
    tn_ = {0.0};
    tw_ = {1.0};
  } else {
    // <eta>^{-gamma} = Gamma(gamma/2)^{-1} int_0^inf t^{gamma/2-1} e^{-t} e^{-t|eta|^2} dt, t = e^u
    const double g2 = 0.5 * b_.gamma, lg = boost::math::lgamma(g2);
    const double u0 = std::log(1e-14), u1 = std::log(120.0);
    const int panels = int(std::ceil((u1 - u0) / 0.5));
    const double hu = (u1 - u0) / panels;
    for (int p = 0; p < panels; ++p)
      for (const auto& [x, w] : gl10()) {
        double u = u0 + hu * (p + 0.5 + 0.5 * x);
        double t = std::exp(u);
        tn_.push_back(t);
        tw_.push_back(0.5 * hu * w * std::exp(g2 * u - t - lg));
      }
  }
  // normalize int b = 1
  b_.norm = 1.0;
  auto tab = eval_mesh(1.0, {1.0, 1.0, 1.0}, std::min(1.0 / 16, b_.scale / 4), 1, false);
  double ib = 0;
  for (double v : tab.Ib) ib += v;
  if (ib != 0) b_.norm = ib;
}

RegionTable ConvolutionEngine::eval_mesh(double xi, const std::array<double, 3>& c, double h0, int subdiv,
                                         bool split) const {
  RegionTable T;
  T.xi = xi;
  const double dx = delta_ * std::abs(xi), xs = std::pow(std::abs(xi), mu_);
  const std::size_t nt = tn_.size();
  // per axis, per t: integrals over the classes L, G-small, G-big, for a*beta and beta
  std::array<std::vector<std::array<double, 3>>, 3> Ja, Jb;
  for (int j = 0; j < 3; ++j) {
    const double X = 1e5 * (1 + std::abs(c[j]));
    std::vector<double> br;
    if (split) br = {c[j] - dx, c[j] + dx, -xs, xs};
    auto nodes = quad_nodes(graded_mesh({0.0, c[j]}, br, X, h0, subdiv));
    const std::size_t nn = nodes.x.size();
    std::vector<double> va(nn), vb(nn), e2(nn);
    std::vector<int> cls(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      double e = nodes.x[i];
      double bj = b_.beta[j](e) * nodes.w[i];
      vb[i] = bj;
      va[i] = a_.f[j](c[j] - e) * bj;
      e2[i] = e * e;
      cls[i] = std::abs(e - c[j]) <= dx ? 0 : (std::abs(e) <= xs ? 1 : 2);
    }
    Ja[j].assign(nt, {0, 0, 0});
    Jb[j].assign(nt, {0, 0, 0});
    for (std::size_t t = 0; t < nt; ++t) {
      const double tt = tn_[t];
      std::array<double, 3> sa{0, 0, 0}, sb{0, 0, 0};
      for (std::size_t i = 0; i < nn; ++i) {
        double ex = tt * e2[i];
        if (ex > 745) continue;
        double w = tt == 0 ? 1.0 : std::exp(-ex);
        sa[cls[i]] += w * va[i];
        sb[cls[i]] += w * vb[i];
      }
      Ja[j][t] = sa;
      Jb[j][t] = sb;
    }
  }
  const double ac = a_(c[0], c[1], c[2]);
  for (int mask = 0; mask < 8; ++mask) {
    double I = 0, Ib = 0, E2 = 0;
    const bool two_ge = __builtin_popcount(unsigned(mask)) == 1;
    for (std::size_t t = 0; t < nt; ++t) {
      double pa = 1, pb = 1, pe = 1;
      for (int j = 0; j < 3; ++j) {
        const auto& A = Ja[j][t];
        const auto& B = Jb[j][t];
        if ((mask >> j) & 1) {
          pa *= A[0], pb *= B[0], pe *= A[0];
        } else {
          pa *= A[1] + A[2], pb *= B[1] + B[2], pe *= A[1];
        }
      }
      I += tw_[t] * pa;
      Ib += tw_[t] * pb;
      if (two_ge) E2 += tw_[t] * pe;
    }
    T.I[mask] = I / b_.norm;
    T.Ib[mask] = Ib / b_.norm;
    if (two_ge) {
      T.E2[mask] = E2 / b_.norm;
      T.E1[mask] = T.I[mask] - T.E2[mask];
    }
  }
  double conv = 0, ib = 0;
  for (int mask = 0; mask < 8; ++mask) conv += T.I[mask], ib += T.Ib[mask];
  T.conv = conv;
  T.main = ac * ib;
  T.R = conv - T.main;
  T.ggg_diff = T.I[0] - ac * T.Ib[0];
  T.gggc_main = ac * (ib - T.Ib[0]);
  return T;
}

RegionTable ConvolutionEngine::evaluate(double xi, double kappa2, double kappa3, bool refine_check) const {
  const std::array<double, 3> c{xi, kappa2 * xi, kappa3 * xi};
  const double h0 = std::min(1.0 / 16, b_.scale / 4);
  RegionTable T = eval_mesh(xi, c, h0, 1, true);
  // independent mesh: no region breakpoints, shifted grading
  RegionTable U = eval_mesh(xi, c, 0.75 * h0, 1, false);
  T.conv_check = U.conv;
  T.partition_residual = std::abs(T.conv - U.conv) / std::max(std::abs(U.conv), 1e-300);
  if (refine_check) {
    RegionTable V = eval_mesh(xi, c, h0, 2, true);
    double scale = std::max({std::abs(V.R), 1e-14 * std::abs(V.conv), 1e-300});
    T.quad_change = std::abs(T.R - V.R) / scale;
  }
  return T;
}

double convolution_direct_3d(const SeparableA& a, const WeightB& b, std::array<double, 3> c, double X, int panels,
                             int order) {
  // uniform panels in arcsinh-stretched coordinates resolve both peaks
  std::array<std::vector<double>, 3> x, w;
  std::vector<double> gx, gw;
  {
    using boost::math::quadrature::gauss;
    if (order != 8) throw Rejected("convolution_direct_3d: only order 8 is provided");
    const auto& ab = gauss<double, 8>::abscissa();
    const auto& wb = gauss<double, 8>::weights();
    for (std::size_t i = 0; i < ab.size(); ++i) {
      gx.push_back(ab[i]), gw.push_back(wb[i]);
      gx.push_back(-ab[i]), gw.push_back(wb[i]);
    }
  }
  for (int j = 0; j < 3; ++j) {
    std::vector<double> mesh;
    for (int f = 0; f < 2; ++f) {
      double center = f == 0 ? 0.0 : c[j];
      double s0 = std::asinh((-X - center) / b.scale), s1 = std::asinh((X - center) / b.scale);
      for (int p = 0; p <= panels; ++p) mesh.push_back(center + b.scale * std::sinh(s0 + (s1 - s0) * p / panels));
    }
    std::sort(mesh.begin(), mesh.end());
    mesh.erase(std::unique(mesh.begin(), mesh.end()), mesh.end());
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
      double h = 0.5 * (mesh[i + 1] - mesh[i]), m = 0.5 * (mesh[i + 1] + mesh[i]);
      if (h <= 0) continue;
      for (std::size_t q = 0; q < gx.size(); ++q) {
        x[j].push_back(m + h * gx[q]);
        w[j].push_back(h * gw[q]);
      }
    }
  }
  double acc = 0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
  for (std::size_t i = 0; i < x[0].size(); ++i) {
    double a1 = a.f[0](c[0] - x[0][i]) * w[0][i];
    double part = 0;
    for (std::size_t j = 0; j < x[1].size(); ++j) {
      double a12 = a1 * a.f[1](c[1] - x[1][j]) * w[1][j];
      for (std::size_t k = 0; k < x[2].size(); ++k)
        part += a12 * a.f[2](c[2] - x[2][k]) * w[2][k] * b(x[0][i], x[1][j], x[2][k]);
    }
    acc += part;
  }
  return acc;
}

RayResult convolution_ray(const ConvolutionEngine& eng, const ConvolutionProbe& p, const std::vector<double>& xi,
                          bool refine_check) {
  RayResult r;
  r.rows.resize(xi.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < xi.size(); ++i) r.rows[i] = eng.evaluate(xi[i], p.kappa2, p.kappa3, refine_check);
  for (const auto& row : r.rows)
    if (refine_check && row.quad_change > 0.01)
      throw Rejected("convolution_ray: quadrature not converged at xi=" + std::to_string(row.xi));
  return r;
}

LadderSamples sample_ladder(const ConvolutionEngine& eng, const ConvolutionProbe& p, const LadderConfig& cfg) {
  LadderSamples s;
  s.cfg = cfg;
  s.alpha = p.alpha;
  s.beta = p.beta;
  auto gl = [](int n) {
    // Gauss-Legendre nodes on [-1,1] via Golub-Welsch would be overkill; reuse the 10-point rule when n=10
    std::vector<std::array<double, 2>> v;
    if (n == 10) return gl10();
    // Gauss rules of other sizes from boost
    auto push = [&](const auto& x, const auto& w) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        v.push_back({x[i], w[i]});
        if (x[i] != 0) v.push_back({-x[i], w[i]});
      }
    };
    using boost::math::quadrature::gauss;
    switch (n) {
      case 2: push(gauss<double, 2>::abscissa(), gauss<double, 2>::weights()); break;
      case 3: push(gauss<double, 3>::abscissa(), gauss<double, 3>::weights()); break;
      case 4: push(gauss<double, 4>::abscissa(), gauss<double, 4>::weights()); break;
      case 5: push(gauss<double, 5>::abscissa(), gauss<double, 5>::weights()); break;
      case 6: push(gauss<double, 6>::abscissa(), gauss<double, 6>::weights()); break;
      case 8: push(gauss<double, 8>::abscissa(), gauss<double, 8>::weights()); break;
      default: throw Rejected("sample_ladder: supported rule sizes are 2,3,4,5,6,8,10");
    }
    return v;
  };
  auto gk = gl(cfg.kappa_nodes);
  const double hk = 0.5 * (p.beta - p.alpha), mk = 0.5 * (p.beta + p.alpha);
  for (const auto& [x2, w2] : gk)
    for (const auto& [x3, w3] : gk) {
      s.kappa.push_back({mk + hk * x2, mk + hk * x3});
      s.wk.push_back(hk * w2 * hk * w3);
    }
  auto gx = gl(cfg.xi_nodes_per_doubling);
  const double l2 = std::log(2.0);
  for (int k = 0; k < cfg.max_doublings; ++k)
    for (const auto& [x, w] : gx) {
      double u = l2 * (k + 0.5 + 0.5 * x);
      double xi = std::exp(u);
      s.xi.push_back(xi);
      s.wxi.push_back(0.5 * l2 * w * xi);
      s.doubling.push_back(k);
    }
  const std::size_t nk = s.kappa.size();
  s.tables.resize(s.xi.size() * nk);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t q = 0; q < s.tables.size(); ++q) {
    std::size_t i = q / nk, k = q % nk;
    s.tables[q] = eng.evaluate(s.xi[i], s.kappa[k][0], s.kappa[k][1], false);
  }
  return s;
}

LadderResult weighted_ladder(const LadderSamples& s, double exponent,
                             const std::function<double(const RegionTable&)>& pick, const std::string& label) {
  LadderResult r;
  r.label = label;
  r.exponent = exponent;
  const std::size_t nk = s.kappa.size();
  std::vector<double> per(s.cfg.max_doublings, 0.0);
  for (std::size_t i = 0; i < s.xi.size(); ++i) {
    double acc = 0;
    for (std::size_t k = 0; k < nk; ++k) {
      double v = pick(s.tables[i * nk + k]);
      acc += s.wk[k] * v * v;
    }
    per[s.doubling[i]] += s.wxi[i] * std::pow(s.xi[i], exponent) * acc;
  }
  double cum = 0;
  for (int k = 0; k < s.cfg.max_doublings; ++k) {
    cum += per[k];
    r.cutoffs.push_back(std::pow(2.0, k + 1));
    r.partials.push_back(cum);
  }
  const std::size_t n = r.partials.size();
  r.last_tail = (n >= 2 && r.partials[n - 1] > 0) ? (r.partials[n - 1] - r.partials[n - 2]) / r.partials[n - 1] : 0.0;
  r.cauchy = r.last_tail < 0.01;
  r.grows = r.last_tail >= 0.10;
  return r;
}

double r_max(double m) { return 1.0 - 2.0 / (-m - 0.5); }

WeightedIntegrals remainder_weighted_integrals(const LadderSamples& s, double m, double r) {
  const double e = s.cfg.eps;
  WeightedIntegrals out;
  out.R = weighted_ladder(s, -6 * m - 1 + r - e, [](const RegionTable& t) { return t.R; }, "R");
  for (int mask = 1; mask < 8; ++mask) {
    int nl = __builtin_popcount(unsigned(mask));
    auto I = [mask](const RegionTable& t) { return t.I[mask]; };
    if (nl == 1) {
      out.E1[mask] = weighted_ladder(s, -6 * m + 1 - 6 * e, [mask](const RegionTable& t) { return t.E1[mask]; },
                                     region_name(mask) + ":E1");
      out.E2[mask] = weighted_ladder(s, -6 * m - 1 - 6 * e + r, [mask](const RegionTable& t) { return t.E2[mask]; },
                                     region_name(mask) + ":E2");
      out.region[mask] = weighted_ladder(s, -6 * m - 1 + r - e, I, region_name(mask));
    } else if (nl == 2) {
      out.region[mask] = weighted_ladder(s, -6 * m - 2 * e, I, region_name(mask));
    } else {
      out.region[mask] = weighted_ladder(s, -6 * m + 1 - e, I, region_name(mask));
    }
  }
  return out;
}

}  // namespace cwl

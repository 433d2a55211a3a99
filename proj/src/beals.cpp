#include "cwl/beals.hpp"

#include <fftw3.h>
#include <omp.h>

#include <cmath>
#include <sstream>

#include "cwl/kernels.hpp"

namespace cwl {

Field3D outer_product(const Grid3D& g, const std::vector<double>& f1, const std::vector<double>& f2,
                      const std::vector<double>& f3) {
  Field3D out(g);
  const std::size_t n1 = g.axes[0].n, n2 = g.axes[1].n, n3 = g.axes[2].n;
  if (f1.size() != n1 || f2.size() != n2 || f3.size() != n3) throw Rejected("outer_product: size mismatch");
#pragma omp parallel for
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      double a = f1[i] * f2[j];
      double* row = &out.data[(i * n2 + j) * n3];
      for (std::size_t k = 0; k < n3; ++k) row[k] = a * f3[k];
    }
  return out;
}

Field3D permute_axes(const Field3D& f, std::array<int, 3> perm) {
  Grid3D g;
  for (int a = 0; a < 3; ++a) g.axes[a] = f.grid.axes[perm[a]];
  Field3D out(g);
  std::array<std::size_t, 3> idx;
  for (idx[0] = 0; idx[0] < g.axes[0].n; ++idx[0])
    for (idx[1] = 0; idx[1] < g.axes[1].n; ++idx[1])
      for (idx[2] = 0; idx[2] < g.axes[2].n; ++idx[2]) {
        std::array<std::size_t, 3> old;
        for (int a = 0; a < 3; ++a) old[perm[a]] = idx[a];
        out.at(idx[0], idx[1], idx[2]) = f.at(old[0], old[1], old[2]);
      }
  return out;
}

std::string BealsWeight::str() const {
  std::ostringstream os;
  os << "(" << s << "," << k1 << "," << k2 << "," << k3 << ")";
  return os.str();
}

Cutoff3D product_bump_cutoff(double radius) {
  return [radius](double a, double b, double c) { return bump(a / radius) * bump(b / radius) * bump(c / radius); };
}

BealsSpectrum::BealsSpectrum(const Field3D& f, const Cutoff3D& cutoff) : g_(f.grid) {
  const std::size_t n1 = g_.axes[0].n, n2 = g_.axes[1].n, n3 = g_.axes[2].n;
  nh_ = n3 / 2 + 1;
  std::vector<double> in(f.data.size());
#pragma omp parallel for
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j)
      for (std::size_t k = 0; k < n3; ++k) {
        std::size_t q = (i * n2 + j) * n3 + k;
        in[q] = cutoff(g_.axes[0].node(i), g_.axes[1].node(j), g_.axes[2].node(k)) * f.data[q];
      }
  std::vector<cplx> out(n1 * n2 * nh_);
  fftw_plan p;
  {
    std::lock_guard lk(fftw_planner_mutex());
    fftw_setup_threads();
    fftw_plan_with_nthreads(omp_get_max_threads());
    p = fftw_plan_dft_r2c_3d(int(n1), int(n2), int(n3), in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                             FFTW_ESTIMATE);
  }
  fftw_execute(p);
  {
    std::lock_guard lk(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
  // |U-hat|^2 with U-hat = h1 h2 h3 * FFT (phases drop out of the modulus)
  const double h3 = g_.axes[0].h() * g_.axes[1].h() * g_.axes[2].h();
  const double dk3 = g_.axes[0].dk() * g_.axes[1].dk() * g_.axes[2].dk();
  const double scale = h3 * h3 * dk3 / std::pow(2 * pi, 3);
  power_.resize(out.size());
#pragma omp parallel for
  for (std::size_t q = 0; q < out.size(); ++q) {
    std::size_t k = q % nh_;
    double mult = (k == 0 || (n3 % 2 == 0 && k == n3 / 2)) ? 1.0 : 2.0;
    power_[q] = std::norm(out[q]) * scale * mult;
  }
}

double BealsSpectrum::norm(const BealsWeight& w) const {
  const std::size_t n1 = g_.axes[0].n, n2 = g_.axes[1].n;
  std::vector<double> e1(n1), e2(n2), e3(nh_), f1(n1), f2(n2), f3(nh_);
  for (std::size_t i = 0; i < n1; ++i) f1[i] = g_.axes[0].freq(i);
  for (std::size_t i = 0; i < n2; ++i) f2[i] = g_.axes[1].freq(i);
  for (std::size_t i = 0; i < nh_; ++i) f3[i] = double(i) * g_.axes[2].dk();
  for (std::size_t i = 0; i < n1; ++i) e1[i] = std::pow(1 + f1[i] * f1[i], w.k1);
  for (std::size_t i = 0; i < n2; ++i) e2[i] = std::pow(1 + f2[i] * f2[i], w.k2);
  for (std::size_t i = 0; i < nh_; ++i) e3[i] = std::pow(1 + f3[i] * f3[i], w.k3);
  return std::sqrt(kernels::weighted_power_sum(power_.data(), n1, n2, nh_, e1.data(), e2.data(), e3.data(),
                                               f1.data(), f2.data(), f3.data(), w.s));
}

double beals_norm(const Field3D& f, const BealsWeight& w, const Cutoff3D& cutoff) {
  return BealsSpectrum(f, cutoff).norm(w);
}

double weighted_norm_1d(const std::vector<double>& f, const Grid1D& g, double k,
                        const std::function<double(double)>& phi) {
  std::vector<double> x(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) x[j] = phi(g.node(j)) * f[j];
  auto F = dft_forward(x, g);
  double acc = 0;
  for (std::size_t q = 0; q < g.n; ++q) {
    double eta = g.freq(q);
    acc += std::norm(F[q]) * std::pow(1 + eta * eta, k);
  }
  return std::sqrt(acc * g.dk() / (2 * pi));
}

std::string MembershipScan::verdict() const {
  if (inconclusive) return "INCONCLUSIVE";
  return member ? "member" : "non-member";
}

void classify_scan(MembershipScan& s) {
  s.inconclusive = false;
  for (std::size_t i = 0; i + 1 < s.norms.size(); ++i)
    if (s.norms[i + 1] < 0.5 * s.norms[i]) s.inconclusive = true;
  std::vector<double> lx, ly;
  const double Elast = s.norms.back() * s.norms.back();
  bool all_small = true;
  for (std::size_t i = 0; i + 1 < s.norms.size(); ++i) {
    double d = std::abs(s.norms[i + 1] * s.norms[i + 1] - s.norms[i] * s.norms[i]);
    if (d > 1e-8 * Elast) all_small = false;
    if (d > 0) {
      lx.push_back(std::log(double(s.resolutions[i + 1])));
      ly.push_back(std::log(d));
    }
  }
  s.converged = all_small;
  if (all_small || lx.size() < 2) {
    s.growth_exponent = -std::numeric_limits<double>::infinity();
  } else {
    s.growth_exponent = ols(lx, ly).slope;
  }
  s.member = !s.inconclusive && (s.converged || s.growth_exponent < s.threshold);
}

std::vector<MembershipScan> membership_scan(const FieldGenerator& gen, const std::vector<BealsWeight>& weights,
                                            const std::vector<std::size_t>& resolutions, const Cutoff3D& cutoff,
                                            double threshold) {
  for (std::size_t i = 0; i + 1 < resolutions.size(); ++i)
    if (resolutions[i + 1] <= resolutions[i]) throw Rejected("membership_scan: resolutions must increase");
  if (resolutions.size() < 3) throw Rejected("membership_scan: need at least 3 resolutions");
  std::vector<MembershipScan> out(weights.size());
  for (std::size_t w = 0; w < weights.size(); ++w) {
    out[w].weight = weights[w];
    out[w].resolutions = resolutions;
    out[w].threshold = threshold;
  }
  for (auto N : resolutions) {
    BealsSpectrum sp(gen(N), cutoff);
    for (std::size_t w = 0; w < weights.size(); ++w) out[w].norms.push_back(sp.norm(weights[w]));
  }
  for (auto& s : out) classify_scan(s);
  return out;
}

double algebra_ratio(const Field3D& u, const Field3D& v, const BealsWeight& w, const Cutoff3D& cutoff) {
  Field3D uv(u.grid);
  for (std::size_t i = 0; i < uv.data.size(); ++i) uv.data[i] = u.data[i] * v.data[i];
  double nu = beals_norm(u, w, cutoff), nv = beals_norm(v, w, cutoff);
  if (nu == 0 || nv == 0) return 0.0;
  return beals_norm(uv, w, cutoff) / (nu * nv);
}

}  // namespace cwl

#include "cwl/spectral.hpp"

#include <fftw3.h>
#include <omp.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace cwl {

bool is_pow2(std::size_t n) { return n && !(n & (n - 1)); }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::size_t next_fft_size(std::size_t n) {
  std::size_t p = next_pow2(n);
  std::size_t q = 3 * (p / 4);
  return (q >= n && q > 0) ? q : p;
}

double smooth_step(double x) {
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double bump(double x) {
  if (std::abs(x) >= 1) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

double Grid1D::freq(std::size_t k) const {
  long kk = k < n / 2 ? long(k) : long(k) - long(n);
  return double(kk) * dk();
}

static double wrap_coord(std::size_t i, std::size_t n, double h) {
  return i < n / 2 ? double(i) * h : (double(i) - double(n)) * h;
}

double Grid2D::x(std::size_t i) const { return wrap_coord(i, nx, hx()); }
double Grid2D::y(std::size_t j) const { return wrap_coord(j, ny, hy()); }
double Grid2D::kx(std::size_t i) const { return wrap_coord(i, nx, 2 * pi / Lx); }
double Grid2D::ky(std::size_t j) const { return double(j) * 2 * pi / Ly; }
double Grid2D::nyquist() const { return std::min(pi / hx(), pi / hy()); }

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

void fftw_setup_threads() {
  static std::once_flag once;
  std::call_once(once, [] { fftw_init_threads(); });
}

namespace {

std::vector<cplx> c2c(std::span<const cplx> in, int sign) {
  std::size_t n = in.size();
  std::vector<cplx> out(n);
  std::vector<cplx> tmp(in.begin(), in.end());
  fftw_plan p;
  {
    std::lock_guard lk(fftw_planner_mutex());
    fftw_setup_threads();
    fftw_plan_with_nthreads(1);
    p = fftw_plan_dft_1d(int(n), reinterpret_cast<fftw_complex*>(tmp.data()),
                         reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
  }
  fftw_execute(p);
  {
    std::lock_guard lk(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
  return out;
}

}  // namespace

std::vector<cplx> dft_forward(std::span<const cplx> f, const Grid1D& g) {
  if (f.size() != g.n) throw Rejected("dft_forward: sample count does not match grid");
  auto F = c2c(f, FFTW_FORWARD);
  const double h = g.h(), o = g.origin();
  for (std::size_t k = 0; k < g.n; ++k) F[k] *= h * std::polar(1.0, -g.freq(k) * o);
  return F;
}

std::vector<cplx> dft_forward(std::span<const double> f, const Grid1D& g) {
  std::vector<cplx> c(f.begin(), f.end());
  return dft_forward(std::span<const cplx>(c), g);
}

std::vector<cplx> dft_inverse(std::span<const cplx> F, const Grid1D& g) {
  if (F.size() != g.n) throw Rejected("dft_inverse: spectrum size does not match grid");
  std::vector<cplx> t(F.begin(), F.end());
  const double o = g.origin();
  for (std::size_t k = 0; k < g.n; ++k) t[k] *= std::polar(1.0, g.freq(k) * o);
  auto f = c2c(t, FFTW_BACKWARD);
  const double s = 1.0 / (double(g.n) * g.h());
  for (auto& v : f) v *= s;
  return f;
}

Fft2D::Fft2D(std::size_t nx, std::size_t ny)
    : nx_(nx), ny_(ny), rbuf_(nx * ny), cbuf_(nx * (ny / 2 + 1)) {
  std::lock_guard lk(fftw_planner_mutex());
  fftw_setup_threads();
  fftw_plan_with_nthreads(omp_get_max_threads());
  auto* c = reinterpret_cast<fftw_complex*>(cbuf_.data());
  fwd_ = fftw_plan_dft_r2c_2d(int(nx), int(ny), rbuf_.data(), c, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_c2r_2d(int(nx), int(ny), c, rbuf_.data(), FFTW_ESTIMATE);
}

Fft2D::~Fft2D() {
  std::lock_guard lk(fftw_planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Fft2D::r2c(const double* in, cplx* out) {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void Fft2D::c2r(const cplx* in, double* out) {
  // c2r destroys its input
  std::copy(in, in + cbuf_.size(), cbuf_.begin());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(bwd_), reinterpret_cast<fftw_complex*>(cbuf_.data()),
                       out);
}

double Window::operator()(double s) const {
  double b = bump(s / half_length);
  if (kind == WindowKind::Bump) return b;
  return b * std::exp(-0.5 * s * s / (sigma * sigma));
}

double trig_eval(std::span<const cplx> H, const Grid2D& g, double x, double y) {
  const std::size_t nyh = g.ny / 2 + 1;
  std::vector<cplx> ey(nyh);
  const double dky = 2 * pi / g.Ly;
  for (std::size_t j = 0; j < nyh; ++j) ey[j] = std::polar(1.0, dky * double(j) * y);
  double acc = 0;
  for (std::size_t i = 0; i < g.nx; ++i) {
    const cplx* row = H.data() + i * nyh;
    cplx s = 0.5 * (row[0] * ey[0] + row[nyh - 1] * ey[nyh - 1]);
    for (std::size_t j = 1; j + 1 < nyh; ++j) s += row[j] * ey[j];
    acc += 2.0 * (s * std::polar(1.0, g.kx(i) * x)).real();
  }
  return acc / double(g.size());
}

Slice windowed_slice(std::span<const double> field, const Grid2D& g, std::array<double, 2> base,
                     std::array<double, 2> dir, const Window& w, double spacing) {
  if (field.size() != g.size()) throw Rejected("windowed_slice: field does not match grid");
  double nd = std::hypot(dir[0], dir[1]);
  if (nd == 0) throw Rejected("windowed_slice: zero direction");
  dir = {dir[0] / nd, dir[1] / nd};
  if (spacing <= 0) spacing = std::min(g.hx(), g.hy());
  // the segment may not wrap around the torus
  double span_x = 2 * w.half_length * std::abs(dir[0]), span_y = 2 * w.half_length * std::abs(dir[1]);
  if (span_x >= g.Lx || span_y >= g.Ly) throw Rejected("windowed_slice: segment exits domain");

  std::size_t n = next_pow2(std::size_t(std::ceil(2 * w.half_length / spacing)) + 1);
  Slice out;
  out.grid = Grid1D{double(n) * spacing, n};
  out.samples.assign(n, 0.0);

  auto on_node = [](double v, double h) {
    double q = v / h;
    return std::abs(q - std::round(q)) < 1e-9;
  };
  bool axis_x = std::abs(dir[1]) < 1e-15 && on_node(spacing, g.hx());
  bool axis_y = std::abs(dir[0]) < 1e-15 && on_node(spacing, g.hy());
  bool fast = (axis_x || axis_y) && on_node(base[0], g.hx()) && on_node(base[1], g.hy());

  auto idx = [](double v, double h, std::size_t nn) {
    long q = std::lround(v / h) % long(nn);
    return std::size_t(q < 0 ? q + long(nn) : q);
  };

  if (fast) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = out.grid.node(j), wv = w(s);
      if (wv == 0) continue;
      double px = base[0] + s * dir[0], py = base[1] + s * dir[1];
      out.samples[j] = wv * field[idx(px, g.hx(), g.nx) * g.ny + idx(py, g.hy(), g.ny)];
    }
    return out;
  }

  std::vector<cplx> H(g.half());
  {
    Fft2D fft(g.nx, g.ny);
    fft.r2c(field.data(), H.data());
  }
#pragma omp parallel for schedule(dynamic)
  for (std::size_t j = 0; j < n; ++j) {
    double s = out.grid.node(j), wv = w(s);
    if (wv == 0) continue;
    out.samples[j] = wv * trig_eval(H, g, base[0] + s * dir[0], base[1] + s * dir[1]);
  }
  return out;
}

LineFit ols(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  LineFit f;
  if (n < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= double(n), my /= double(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = y[i] - f.intercept - f.slope * x[i];
    r += e * e;
  }
  f.rms = std::sqrt(r / double(n));
  return f;
}

DecayFit fit_spectrum(std::span<const double> eta, std::span<const double> mag, Band band) {
  DecayFit fit;
  fit.band = band;
  double mx = 0;
  for (double v : mag) mx = std::max(mx, v);
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * mx;

  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < eta.size(); ++k) {
    if (eta[k] < band.lo || eta[k] > band.hi) continue;
    ++fit.n_band;
    if (mag[k] <= floor) {
      fit.floor_hit = true;
      continue;
    }
    lx.push_back(std::log(eta[k]));
    ly.push_back(std::log(mag[k]));
  }
  if (fit.n_band < 8) throw Rejected("decay_exponent: fewer than 8 frequency bins in band");
  fit.n_bins = int(lx.size());
  if (fit.n_bins < 8) {
    // spectrum fell through the floor inside the band
    fit.super_polynomial = true;
    fit.slope = -std::numeric_limits<double>::infinity();
    return fit;
  }
  auto lf = ols(lx, ly);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.rms_residual = lf.rms;

  Eigen::MatrixXd A(lx.size(), 3);
  Eigen::VectorXd b(lx.size());
  double xm = 0;
  for (double v : lx) xm += v;
  xm /= double(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) {
    double d = lx[i] - xm;
    A(i, 0) = 1, A(i, 1) = d, A(i, 2) = d * d;
    b(i) = ly[i];
  }
  Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
  fit.curvature = c(2);
  fit.super_polynomial = fit.slope < -8.0 && fit.curvature < -1.0;
  return fit;
}

DecayFit decay_exponent(std::span<const double> samples, const Grid1D& g, Band band) {
  auto F = dft_forward(samples, g);
  std::vector<double> eta, mag;
  // k=0 is kept so the floor is relative to the true maximum
  for (std::size_t k = 0; k < g.n / 2; ++k) {
    eta.push_back(g.freq(k));
    mag.push_back(std::abs(F[k]));
  }
  return fit_spectrum(eta, mag, band);
}

}  // namespace cwl

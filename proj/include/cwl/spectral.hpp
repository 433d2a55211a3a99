#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cwl {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

// A precondition was violated; callers map this to a rejected run.
struct Rejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_pow2(std::size_t n);
std::size_t next_pow2(std::size_t n);
// smallest 2^a or 3*2^a that is >= n
std::size_t next_fft_size(std::size_t n);

// C-infinity step: 0 for x<=0, 1 for x>=1.
double smooth_step(double x);
// exp(1 - 1/(1-x^2)) on |x|<1, zero outside; equals 1 at x=0.
double bump(double x);

// Periodic 1D grid, nodes s_j = -extent/2 + j*h so that s=0 is node n/2.
struct Grid1D {
  double extent = 2 * pi;
  std::size_t n = 64;

  double h() const { return extent / double(n); }
  double dk() const { return 2 * pi / extent; }
  double origin() const { return -0.5 * extent; }
  double node(std::size_t j) const { return origin() + double(j) * h(); }
  // FFT order: 0,1,..,n/2-1,-n/2,..,-1
  double freq(std::size_t k) const;
  double nyquist() const { return pi / h(); }
};

// Periodic 2D grid with index 0 at the origin (wrapped coordinates).
struct Grid2D {
  double Lx = 2 * pi, Ly = 2 * pi;
  std::size_t nx = 64, ny = 64;

  double hx() const { return Lx / double(nx); }
  double hy() const { return Ly / double(ny); }
  double x(std::size_t i) const;
  double y(std::size_t j) const;
  double kx(std::size_t i) const;
  double ky(std::size_t j) const;  // j <= ny/2 for half spectra
  std::size_t size() const { return nx * ny; }
  std::size_t half() const { return nx * (ny / 2 + 1); }
  double nyquist() const;  // min over axes
};

struct Grid3D {
  std::array<Grid1D, 3> axes;
  std::size_t size() const { return axes[0].n * axes[1].n * axes[2].n; }
};

// FFTW planning is not thread safe; every plan creation goes through this.
std::mutex& fftw_planner_mutex();
void fftw_setup_threads();

// u-hat(eta_k) = h * sum_j f(s_j) exp(-i s_j eta_k), spectrum in FFT order.
std::vector<cplx> dft_forward(std::span<const double> f, const Grid1D& g);
std::vector<cplx> dft_forward(std::span<const cplx> f, const Grid1D& g);
std::vector<cplx> dft_inverse(std::span<const cplx> F, const Grid1D& g);

// 2D real transforms on a Grid2D, half spectrum of size nx*(ny/2+1).
// Unnormalized: c2r(r2c(u)) = nx*ny*u.
class Fft2D {
 public:
  Fft2D(std::size_t nx, std::size_t ny);
  ~Fft2D();
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;
  void r2c(const double* in, cplx* out);
  void c2r(const cplx* in, double* out);  // preserves input
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }

 private:
  std::size_t nx_, ny_;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
  std::vector<double> rbuf_;
  std::vector<cplx> cbuf_;
};

enum class WindowKind { Bump, Gaussian };

struct Window {
  WindowKind kind = WindowKind::Bump;
  double half_length = 1.0;
  double sigma = 0.2;  // Gaussian only; the bump on half_length still tapers it
  double operator()(double s) const;
};

struct Slice {
  Grid1D grid;  // s=0 at the base point
  std::vector<double> samples;
};

// Samples window*field along base + s*dir. Off-grid points use trigonometric
// interpolation of the full 2D field.
Slice windowed_slice(std::span<const double> field, const Grid2D& g, std::array<double, 2> base,
                     std::array<double, 2> dir, const Window& w, double spacing = 0.0);

// Single-point trigonometric interpolation from a half spectrum (Fft2D layout).
double trig_eval(std::span<const cplx> half, const Grid2D& g, double x, double y);

struct Band {
  double lo = 8.0, hi = 64.0;
};

struct DecayFit {
  double slope = 0, intercept = 0, rms_residual = 0;
  double curvature = 0;  // quadratic coefficient in log-log, <0 means steepening
  Band band;
  int n_bins = 0;
  int n_band = 0;  // bins inside the band before the floor cut
  bool super_polynomial = false;
  bool floor_hit = false;  // some in-band bins fell under the noise floor
};

struct LineFit {
  double slope = 0, intercept = 0, rms = 0;
};
LineFit ols(std::span<const double> x, std::span<const double> y);

// Fit log|F| vs log eta over positive frequencies in the band.
DecayFit fit_spectrum(std::span<const double> eta, std::span<const double> mag, Band band);
DecayFit decay_exponent(std::span<const double> samples, const Grid1D& g, Band band);

}  // namespace cwl

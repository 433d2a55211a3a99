#include "cwl/interaction.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace cwl {

TorusDesign design_torus(const CharFrame& frame, const Grid2D& grid) {
  TorusDesign d;
  d.grid = grid;
  d.frame = frame;
  for (int j = 0; j < 3; ++j) {
    const Vec2& w = frame.omega[j];
    double best = std::numeric_limits<double>::infinity();
    for (int p = -64; p <= 64; ++p)
      for (int q = -64; q <= 64; ++q) {
        if (!p && !q) continue;
        double kx = 2 * pi * p / grid.Lx, ky = 2 * pi * q / grid.Ly;
        double nk = std::hypot(kx, ky);
        if (std::abs(kx * w[1] - ky * w[0]) > 1e-9 * nk || kx * w[0] + ky * w[1] <= 0) continue;
        if (nk < best) {
          best = nk;
          d.lattice[j] = {p, q};
        }
      }
    if (!std::isfinite(best))
      throw Rejected("design_torus: direction " + std::to_string(frame.angles_deg[j]) +
                     " deg is not a lattice direction of the torus");
    d.period[j] = 2 * pi / best;
  }
  return d;
}

Band resolve_band(Band b, const Grid2D& g) {
  if (b.hi <= 0) b.hi = g.nyquist() / 4;
  return b;
}

SpectralData make_three_wave_data(const TorusDesign& d, const Symbol1D& a, std::array<double, 3> eps, double t0,
                                  double K, double taper_width) {
  const Grid2D& g = d.grid;
  const std::size_t nyh = g.ny / 2 + 1;
  SpectralData s{g, std::vector<cplx>(g.half()), std::vector<cplx>(g.half())};
  for (int j = 0; j < 3; ++j) {
    if (eps[j] == 0) continue;
    const int p = d.lattice[j][0], q = d.lattice[j][1];
    const double dk = 2 * pi / d.period[j];
    const long nmax = long(std::floor(K / dk));
    for (long n = -nmax; n <= nmax; ++n) {
      long ia = -n * p, ib = -n * q;
      if (ib < 0) continue;
      if (std::size_t(ib) >= nyh - 1 || std::size_t(std::abs(ia)) >= g.nx / 2)
        throw Rejected("make_three_wave_data: profile band exceeds the grid");
      const double eta = double(n) * dk;
      const cplx c = eps[j] * dk * a(eta) * spectral_taper(eta, K, taper_width) * std::polar(1.0, eta * t0);
      std::size_t q_ = std::size_t((ia % long(g.nx) + long(g.nx)) % long(g.nx)) * nyh + std::size_t(ib);
      s.uh[q_] += c;
      s.uth[q_] += cplx(0, eta) * c;
    }
  }
  return s;
}

SpectralData make_three_wave_data(const ExperimentConfig& cfg, std::array<double, 3> eps) {
  auto d = design_torus(CharFrame::from_angles(cfg.angles), cfg.grid);
  if (!(cfg.solver.t0 < cfg.P.z.t_on))
    throw Rejected("make_three_wave_data: waves at t0 overlap the support of Z (need t0 < Z onset)");
  return make_three_wave_data(d, Symbol1D::bessel(cfg.m, cfg.lambda), eps, cfg.solver.t0,
                              cfg.profile_cutoff * cfg.grid.nyquist(), cfg.profile_taper);
}

double angular_distance_deg(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180 ? 360 - d : d;
}

ConeGeometry locate_cone(const CharFrame& frame, double t_probe) {
  if (!(t_probe > 0)) throw Rejected("locate_cone: t_probe must be positive");
  ConeGeometry c;
  c.radius = t_probe;  // unit speed
  // {x.omega_j = t} touches |x| = t at x = t omega_j
  for (int j = 0; j < 3; ++j) c.trace_angles_deg[j] = std::fmod(frame.angles_deg[j] + 360.0, 360.0);
  return c;
}

bool probe_respects_exclusion(const CharFrame& frame, const ConeProbe& p) {
  auto c = locate_cone(frame, p.t_probe);
  for (double a : c.trace_angles_deg)
    if (angular_distance_deg(a, p.angle_deg) < p.exclusion_deg) return false;
  return true;
}

const std::vector<double>& Response::at(double t) const {
  for (std::size_t i = 0; i < sol.nonlinear.times.size(); ++i)
    if (std::abs(sol.nonlinear.times[i] - t) < 1e-9) return sol.nonlinear.u[i];
  throw Rejected("Response: time " + std::to_string(t) + " was not recorded");
}

Response nonlinear_response(const ExperimentConfig& cfg, std::array<double, 3> eps, const NonlinearitySpec& P,
                            const std::vector<double>& record_times) {
  SolverConfig sc = cfg.solver;
  sc.record_times = record_times;
  sc.record_ut = false;
  auto init = make_three_wave_data(cfg, eps);
  Response r;
  r.eps = eps;
  r.sol = solve_split(init, sc, Source::from_spec(P));
  return r;
}

void run_parallel(std::size_t njobs, int workers, const std::function<void(std::size_t)>& job) {
  if (workers <= 1 || njobs <= 1) {
    for (std::size_t i = 0; i < njobs; ++i) job(i);
    return;
  }
  const int nw = std::min<int>(workers, int(njobs));
  const int inner = std::max(1, omp_get_max_threads() / nw);
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int w = 0; w < nw; ++w)
    pool.emplace_back([&] {
      omp_set_num_threads(inner);
      for (std::size_t i; (i = next.fetch_add(1)) < njobs;) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lk(m);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::vector<double> polarization_combine(const std::array<std::vector<double>, 8>& u) {
  std::vector<double> out(u[7].size(), 0.0);
  for (int mask = 1; mask < 8; ++mask) {
    int bits = __builtin_popcount(unsigned(mask));
    double sgn = ((3 - bits) % 2) ? -1.0 : 1.0;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += sgn * u[mask][i];
  }
  return out;
}

std::array<std::vector<double>, 8> polarization_runs(const ExperimentConfig& cfg, const NonlinearitySpec& P, double t,
                                                     int workers) {
  std::array<std::vector<double>, 8> out;
  run_parallel(7, workers, [&](std::size_t i) {
    int mask = int(i) + 1;
    std::array<double, 3> e{};
    for (int j = 0; j < 3; ++j) e[j] = (mask >> j) & 1 ? cfg.eps[j] : 0.0;
    out[mask] = nonlinear_response(cfg, e, P, {t}).at(t);
  });
  return out;
}

std::vector<double> bandpass(const std::vector<double>& field, const Grid2D& g, Band band) {
  const std::size_t nyh = g.ny / 2 + 1;
  std::vector<cplx> H(g.half());
  std::vector<double> out(g.size());
  Fft2D fft(g.nx, g.ny);
  fft.r2c(field.data(), H.data());
  const double sc = 1.0 / double(g.size());
#pragma omp parallel for
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < nyh; ++j) {
      double k = std::hypot(g.kx(i), g.ky(j));
      double w = smooth_step((k - 0.8 * band.lo) / (0.2 * band.lo)) * spectral_taper(k, band.hi, 0.2);
      H[i * nyh + j] *= w * sc;
    }
  fft.c2r(H.data(), out.data());
  return out;
}

Slice cone_slice(const std::vector<double>& field, const Grid2D& g, const ConeProbe& p, const Window& w) {
  const double a = p.angle_deg * pi / 180.0;
  Vec2 dir{std::cos(a), std::sin(a)};
  if (std::abs(dir[0]) < 1e-14) dir[0] = 0;
  if (std::abs(dir[1]) < 1e-14) dir[1] = 0;
  return windowed_slice(field, g, {p.t_probe * dir[0], p.t_probe * dir[1]}, dir, w);
}

DecayFit cone_order_estimate(const std::vector<double>& u_nl, const Grid2D& g, const CharFrame& frame,
                             const ConeProbe& p, const Window& w, Band band) {
  if (!probe_respects_exclusion(frame, p)) throw Rejected("cone_order_estimate: probe too close to a plane trace");
  auto s = cone_slice(u_nl, g, p, w);
  return decay_exponent(s.samples, s.grid, band);
}

double slice_band_energy(const Slice& s, Band band) {
  auto F = dft_forward(s.samples, s.grid);
  double e = 0;
  for (std::size_t k = 0; k < s.grid.n; ++k) {
    double eta = std::abs(s.grid.freq(k));
    if (eta >= band.lo && eta <= band.hi) e += std::norm(F[k]);
  }
  return e * s.grid.dk() / (2 * pi);
}

namespace {

template <class F>
void for_tube(const Grid2D& g, const ConeProbe& p, double hw, double arc, F&& f) {
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j) {
      double x = g.x(i), y = g.y(j), r = std::hypot(x, y);
      if (std::abs(r - p.t_probe) > hw) continue;
      double ang = std::atan2(y, x) * 180.0 / pi;
      if (angular_distance_deg(ang, p.angle_deg) > arc) continue;
      f(i * g.ny + j);
    }
}

}  // namespace

double cone_amplitude(const std::vector<double>& u_nl, const Grid2D& g, const ConeProbe& p, Band band,
                      double tube_halfwidth, double arc_halfwidth_deg) {
  auto bp = bandpass(u_nl, g, band);
  double best = 0;
  for_tube(g, p, tube_halfwidth, arc_halfwidth_deg, [&](std::size_t q) { best = std::max(best, std::abs(bp[q])); });
  return best;
}

double tube_correlation(const std::vector<double>& a, const std::vector<double>& b, const Grid2D& g,
                        const ConeProbe& p, Band band, double tube_halfwidth, double arc_halfwidth_deg) {
  auto ba = bandpass(a, g, band), bb = bandpass(b, g, band);
  double sab = 0, saa = 0, sbb = 0;
  for_tube(g, p, tube_halfwidth, arc_halfwidth_deg, [&](std::size_t q) {
    sab += ba[q] * bb[q];
    saa += ba[q] * ba[q];
    sbb += bb[q] * bb[q];
  });
  if (saa == 0 || sbb == 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double cone_ridge_radius(const std::vector<double>& u_nl, const Grid2D& g, const ConeProbe& p, Band band,
                         double r_lo, double r_hi) {
  auto bp = bandpass(u_nl, g, band);
  const double a = p.angle_deg * pi / 180.0;
  const Vec2 dir{std::cos(a), std::sin(a)};
  const double lateral = 0.75 * std::max(g.hx(), g.hy());
  double best = -1, rbest = 0;
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j) {
      double x = g.x(i), y = g.y(j);
      double along = x * dir[0] + y * dir[1];
      if (along < r_lo || along > r_hi) continue;
      if (std::abs(-x * dir[1] + y * dir[0]) > lateral) continue;
      double v = std::abs(bp[i * g.ny + j]);
      if (v > best) best = v, rbest = std::hypot(x, y);
    }
  return rbest;
}

double trace_energy(const std::vector<double>& f, const Grid2D& g, const CharFrame& frame, double t, Band band,
                    double halfwidth) {
  auto bp = bandpass(f, g, band);
  double e = 0;
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j) {
      double x = g.x(i), y = g.y(j);
      bool near = false;
      for (const auto& w : frame.omega) near |= std::abs(t - x * w[0] - y * w[1]) <= halfwidth;
      if (near) e += bp[i * g.ny + j] * bp[i * g.ny + j];
    }
  return e * g.hx() * g.hy();
}

LineFit amplitude_scaling(const std::vector<double>& eps, const std::vector<double>& amps) {
  if (eps.size() != amps.size() || eps.size() < 3) throw Rejected("amplitude_scaling: need >= 3 eps values");
  double lo = *std::min_element(eps.begin(), eps.end()), hi = *std::max_element(eps.begin(), eps.end());
  if (hi < 4 * lo * (1 - 1e-12)) throw Rejected("amplitude_scaling: eps values must span >= 4x");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!std::isfinite(amps[i]) || !(amps[i] > 1e-300)) continue;
    lx.push_back(std::log(eps[i]));
    ly.push_back(std::log(amps[i]));
  }
  if (lx.size() < 3) throw Rejected("amplitude_scaling: amplitudes at noise floor, regression refused");
  return ols(lx, ly);
}

double coefficient_recovery(double base_amp, double trial_amp) {
  if (!(base_amp > 1e-300)) throw Rejected("coefficient_recovery: base amplitude at noise floor");
  return trial_amp / base_amp;
}

}  // namespace cwl

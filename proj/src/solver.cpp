#include "cwl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cwl/kernels.hpp"
#include "cwl/profiles.hpp"

namespace cwl {

CharFrame CharFrame::from_angles(std::array<double, 3> deg) {
  CharFrame f;
  f.angles_deg = deg;
  for (int j = 0; j < 3; ++j) {
    double a = deg[j] * pi / 180.0;
    f.omega[j] = {std::cos(a), std::sin(a)};
    f.map[j] = {1.0, -f.omega[j][0], -f.omega[j][1]};
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::hypot(f.omega[i][0] - f.omega[j][0], f.omega[i][1] - f.omega[j][1]) < 1e-9)
        throw Rejected("CharFrame: directions must be pairwise distinct");
  const auto& m = f.map;
  f.det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
          m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (std::abs(f.det) < 1e-12) throw Rejected("CharFrame: characteristic map is singular");
  return f;
}

std::array<double, 3> CharFrame::y(double t, double x1, double x2) const {
  std::array<double, 3> out;
  for (int j = 0; j < 3; ++j) out[j] = t - x1 * omega[j][0] - x2 * omega[j][1];
  return out;
}

double ZCutoff::time_factor(double t) const { return smooth_step((t - t_on) / (t_full - t_on)); }

double ZCutoff::operator()(double t, double x, double y) const {
  return time_factor(t) * std::exp(-(x * x + y * y) / (2 * width * width));
}

int NonlinearitySpec::degree() const {
  for (int j = int(a.size()) - 1; j >= 0; --j)
    if (a[j] != 0) return j;
  return 0;
}

bool NonlinearitySpec::is_zero() const {
  return std::all_of(a.begin(), a.end(), [](double v) { return v == 0; });
}

std::string NonlinearitySpec::str() const {
  std::ostringstream os;
  os << "P=Z*(";
  for (std::size_t j = 0; j < a.size(); ++j) os << (j ? "," : "") << a[j];
  os << ") Z=ramp[" << z.t_on << "," << z.t_full << "]*gauss(" << z.width << ")";
  return os.str();
}

Source Source::from_spec(const NonlinearitySpec& P) {
  Source s;
  if (P.is_zero()) return none();
  s.degree = P.degree();
  s.t_on = P.z.t_on;
  std::vector<double> coeffs(P.a.begin(), P.a.begin() + s.degree + 1);
  ZCutoff z = P.z;
  s.eval = [coeffs, z, zs = std::vector<double>(), zx = std::size_t(0), zy = std::size_t(0)](
               double t, const Grid2D& g, const double* u, double* out) mutable {
    if (zx != g.nx || zy != g.ny) {
      zs.resize(g.size());
      for (std::size_t i = 0; i < g.nx; ++i)
        for (std::size_t j = 0; j < g.ny; ++j) {
          double x = g.x(i), y = g.y(j);
          zs[i * g.ny + j] = std::exp(-(x * x + y * y) / (2 * z.width * z.width));
        }
      zx = g.nx, zy = g.ny;
    }
    const double chi = z.time_factor(t);
    std::vector<double> a(coeffs);
    for (auto& v : a) v *= chi;
    kernels::poly_source(u, zs.data(), a.data(), int(a.size()) - 1, out, g.size());
  };
  return s;
}

Source Source::none() {
  Source s;
  s.degree = 0;
  s.t_on = std::numeric_limits<double>::infinity();
  s.eval = [](double, const Grid2D& g, const double*, double* out) { std::fill(out, out + g.size(), 0.0); };
  return s;
}

SpectralData to_spectral(const Grid2D& g, const std::vector<double>& u, const std::vector<double>& ut) {
  if (u.size() != g.size() || ut.size() != g.size()) throw Rejected("to_spectral: size mismatch");
  SpectralData s{g, std::vector<cplx>(g.half()), std::vector<cplx>(g.half())};
  Fft2D fft(g.nx, g.ny);
  fft.r2c(u.data(), s.uh.data());
  fft.r2c(ut.data(), s.uth.data());
  const double sc = 1.0 / double(g.size());
  for (auto& v : s.uh) v *= sc;
  for (auto& v : s.uth) v *= sc;
  return s;
}

std::vector<double> to_physical(const Grid2D& g, const std::vector<cplx>& h) {
  std::vector<double> u(g.size());
  Fft2D fft(g.nx, g.ny);
  fft.c2r(h.data(), u.data());
  return u;
}

namespace {

struct Multipliers {
  std::vector<double> c, sk, ks;
};

Multipliers multipliers(const Grid2D& g, double tau) {
  const std::size_t nyh = g.ny / 2 + 1;
  Multipliers m;
  m.c.resize(g.half()), m.sk.resize(g.half()), m.ks.resize(g.half());
#pragma omp parallel for
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < nyh; ++j) {
      double k = std::hypot(g.kx(i), g.ky(j));
      std::size_t q = i * nyh + j;
      double s = std::sin(k * tau);
      m.c[q] = std::cos(k * tau);
      m.sk[q] = k > 0 ? s / k : tau;
      m.ks[q] = k * s;
    }
  return m;
}

double half_weight(std::size_t j, std::size_t ny) { return (j == 0 || j == ny / 2) ? 1.0 : 2.0; }

}  // namespace

void linear_propagate(SpectralData& s, double tau) {
  auto m = multipliers(s.grid, tau);
  kernels::wave_propagate(s.uh.data(), s.uth.data(), m.c.data(), m.sk.data(), m.ks.data(), s.uh.size());
}

double wave_energy(const SpectralData& s) {
  const Grid2D& g = s.grid;
  const std::size_t nyh = g.ny / 2 + 1;
  double e = 0;
#pragma omp parallel for reduction(+ : e)
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < nyh; ++j) {
      std::size_t q = i * nyh + j;
      double k2 = g.kx(i) * g.kx(i) + g.ky(j) * g.ky(j);
      e += half_weight(j, g.ny) * (std::norm(s.uth[q]) + k2 * std::norm(s.uh[q]));
    }
  return 0.5 * g.Lx * g.Ly * e;
}

std::vector<double> kick_filter(const Grid2D& g, double K, double width) {
  const std::size_t nyh = g.ny / 2 + 1;
  std::vector<double> f(g.half());
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < nyh; ++j) f[i * nyh + j] = spectral_taper(std::hypot(g.kx(i), g.ky(j)), K, width);
  return f;
}

SemilinearStepper::SemilinearStepper(const Grid2D& g, const SolverConfig& cfg, const Source& src)
    : g_(g), cfg_(cfg), src_(src) {
  const double K = cfg.filter_K > 0 ? cfg.filter_K : g.nyquist() / 2;
  mx_ = g.nx, my_ = g.ny;
  if (cfg.dealias && src.degree >= 2) {
    // products of degree d stay alias free in the retained band when M > (d+1) kc
    const double d1 = src.degree + 1;
    std::size_t kcx = std::size_t(std::ceil(K * g.Lx / (2 * pi)));
    std::size_t kcy = std::size_t(std::ceil(K * g.Ly / (2 * pi)));
    mx_ = std::max(g.nx, next_fft_size(std::size_t(d1 * double(kcx)) + 2));
    my_ = std::max(g.ny, next_fft_size(std::size_t(d1 * double(kcy)) + 2));
  }
  pg_ = Grid2D{g.Lx, g.Ly, mx_, my_};
  auto m = multipliers(g, 0.5 * cfg.dt);
  c_ = std::move(m.c), sk_ = std::move(m.sk), ks_ = std::move(m.ks);
  filt_ = kick_filter(g, K, cfg.filter_width);
  tot_.resize(g.half());
  F_.resize(g.half());
  ptot_.resize(pg_.half());
  pF_.resize(pg_.half());
  pu_.resize(pg_.size());
  pP_.resize(pg_.size());
  pfft_ = std::make_unique<Fft2D>(mx_, my_);
}

SemilinearStepper::~SemilinearStepper() = default;

void SemilinearStepper::step(SpectralData& lin, SpectralData& nl, double t) {
  const std::size_t n = g_.half();
  kernels::wave_propagate(lin.uh.data(), lin.uth.data(), c_.data(), sk_.data(), ks_.data(), n);
  kernels::wave_propagate(nl.uh.data(), nl.uth.data(), c_.data(), sk_.data(), ks_.data(), n);
  const double tm = t + 0.5 * cfg_.dt;
  if (tm > src_.t_on) {
    kernels::add_spectra(lin.uh.data(), nl.uh.data(), tot_.data(), n);
    const std::size_t nyh = g_.ny / 2 + 1, myh = my_ / 2 + 1;
    std::fill(ptot_.begin(), ptot_.end(), cplx(0));
    // embed, dropping the Nyquist row/column of the small grid
    for (std::size_t i = 0; i < g_.nx; ++i) {
      if (g_.nx % 2 == 0 && i == g_.nx / 2 && mx_ != g_.nx) continue;
      std::size_t pi_ = i < g_.nx / 2 ? i : mx_ - (g_.nx - i);
      std::size_t jmax = (my_ != g_.ny) ? nyh - 1 : nyh;
      std::copy(tot_.begin() + i * nyh, tot_.begin() + i * nyh + jmax, ptot_.begin() + pi_ * myh);
    }
    pfft_->c2r(ptot_.data(), pu_.data());
    src_.eval(tm, pg_, pu_.data(), pP_.data());
    pfft_->r2c(pP_.data(), pF_.data());
    const double sc = 1.0 / double(mx_ * my_);
    double check = 0;
    for (std::size_t i = 0; i < g_.nx; ++i) {
      std::size_t pi_ = i < g_.nx / 2 ? i : mx_ - (g_.nx - i);
      for (std::size_t j = 0; j < nyh; ++j) {
        cplx v = pF_[pi_ * myh + j] * sc;
        F_[i * nyh + j] = v;
      }
      check += std::abs(F_[i * nyh]);
    }
    if (!std::isfinite(check)) {
      std::ostringstream os;
      os << "blow-up in nonlinear kick at t=" << tm << " (smallness assumption violated)";
      throw BlowUp(os.str());
    }
    kernels::filtered_kick(nl.uth.data(), F_.data(), filt_.data(), cfg_.dt, n);
  }
  kernels::wave_propagate(lin.uh.data(), lin.uth.data(), c_.data(), sk_.data(), ks_.data(), n);
  kernels::wave_propagate(nl.uh.data(), nl.uth.data(), c_.data(), sk_.data(), ks_.data(), n);
}

namespace {

void record(SplitSolution& out, const SpectralData& lin, const SpectralData& nl, double t, bool with_ut, Fft2D& fft) {
  const Grid2D& g = lin.grid;
  std::vector<cplx> tot(g.half());
  std::vector<double> buf(g.size());
  auto phys = [&](const std::vector<cplx>& h) {
    fft.c2r(h.data(), buf.data());
    return buf;
  };
  kernels::add_spectra(lin.uh.data(), nl.uh.data(), tot.data(), tot.size());
  out.total.times.push_back(t);
  out.nonlinear.times.push_back(t);
  out.total.u.push_back(phys(tot));
  out.nonlinear.u.push_back(phys(nl.uh));
  if (with_ut) {
    kernels::add_spectra(lin.uth.data(), nl.uth.data(), tot.data(), tot.size());
    out.total.ut.push_back(phys(tot));
    out.nonlinear.ut.push_back(phys(nl.uth));
  }
  out.energy_linear.push_back(wave_energy(lin));
}

}  // namespace

SplitSolution solve_split(const SpectralData& init, const SolverConfig& cfg, const Source& src) {
  if (!(cfg.dt > 0)) throw Rejected("solve: dt must be positive");
  if (!(cfg.t0 < cfg.t1)) throw Rejected("solve: t0 must be < t1");
  const Grid2D& g = init.grid;
  const double t_start = std::clamp(src.t_on, cfg.t0, cfg.t1);
  const double span = cfg.t1 - t_start;
  const std::size_t nsteps = std::size_t(std::llround(span / cfg.dt));
  const double tol = 1e-9 * std::max(1.0, std::abs(cfg.t1));
  if (std::abs(t_start + double(nsteps) * cfg.dt - cfg.t1) > tol)
    throw Rejected("solve: t1 - max(t0, source onset) must be a multiple of dt");

  std::vector<double> rec = cfg.record_times.empty() ? std::vector<double>{cfg.t1} : cfg.record_times;
  std::sort(rec.begin(), rec.end());
  for (double r : rec)
    if (r < cfg.t0 - tol || r > cfg.t1 + tol) throw Rejected("solve: record time outside [t0, t1]");

  SplitSolution out;
  out.total.grid = out.nonlinear.grid = g;
  Fft2D fft(g.nx, g.ny);
  SpectralData zero{g, std::vector<cplx>(g.half()), std::vector<cplx>(g.half())};

  std::size_t ri = 0;
  // records before any kick are exact linear evolutions of the data
  for (; ri < rec.size() && rec[ri] < t_start - tol; ++ri) {
    SpectralData lin = init;
    linear_propagate(lin, rec[ri] - cfg.t0);
    record(out, lin, zero, rec[ri], cfg.record_ut, fft);
  }
  SpectralData lin = init;
  if (t_start > cfg.t0) linear_propagate(lin, t_start - cfg.t0);
  SpectralData nl = zero;

  std::vector<std::size_t> rec_step;
  for (std::size_t q = ri; q < rec.size(); ++q) {
    double x = (rec[q] - t_start) / cfg.dt;
    std::size_t k = std::size_t(std::llround(x));
    if (std::abs(x - double(k)) * cfg.dt > tol) throw Rejected("solve: record time not on the step grid");
    rec_step.push_back(k);
  }

  SemilinearStepper stepper(g, cfg, src);
  out.padded = stepper.padded();
  std::size_t next = 0;
  for (std::size_t n = 0; n <= nsteps; ++n) {
    while (next < rec_step.size() && rec_step[next] == n) {
      record(out, lin, nl, t_start + double(n) * cfg.dt, cfg.record_ut, fft);
      ++next;
    }
    if (n == nsteps) break;
    stepper.step(lin, nl, t_start + double(n) * cfg.dt);
  }
  out.steps = nsteps;
  return out;
}

SpaceTimeField solve(const SpectralData& init, const SolverConfig& cfg, const NonlinearitySpec& P) {
  return solve_split(init, cfg, Source::from_spec(P)).total;
}

SpaceTimeField duhamel_apply(const Grid2D& g, const Forcing& F, const SolverConfig& cfg) {
  Source s;
  s.degree = 0;
  s.eval = [F](double t, const Grid2D& pg, const double*, double* out) { F(t, pg, out); };
  SpectralData zero{g, std::vector<cplx>(g.half()), std::vector<cplx>(g.half())};
  return solve_split(zero, cfg, s).nonlinear;
}

std::vector<double> duhamel_quadrature(const Grid2D& g, const Forcing& F, double t0, double t, int intervals) {
  if (intervals < 2 || intervals % 2) throw Rejected("duhamel_quadrature: need an even number of intervals");
  const std::size_t nyh = g.ny / 2 + 1;
  const double ds = (t - t0) / intervals;
  std::vector<cplx> acc(g.half()), Fh(g.half());
  std::vector<double> buf(g.size());
  Fft2D fft(g.nx, g.ny);
  for (int i = 0; i <= intervals; ++i) {
    double s = t0 + i * ds;
    double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    w *= ds / 3.0 / double(g.size());
    F(s, g, buf.data());
    fft.r2c(buf.data(), Fh.data());
    for (std::size_t a = 0; a < g.nx; ++a)
      for (std::size_t b = 0; b < nyh; ++b) {
        double k = std::hypot(g.kx(a), g.ky(b));
        double ker = k > 0 ? std::sin(k * (t - s)) / k : (t - s);
        acc[a * nyh + b] += w * ker * Fh[a * nyh + b];
      }
  }
  return to_physical(g, acc);
}

}  // namespace cwl

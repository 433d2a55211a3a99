#pragma once

#include <array>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "cwl/spectral.hpp"

namespace cwl {

using Vec2 = std::array<double, 2>;

struct CharFrame {
  std::array<double, 3> angles_deg{};
  std::array<Vec2, 3> omega{};
  std::array<std::array<double, 3>, 3> map{};  // rows: y_j = t - x.omega_j
  double det = 0;

  static CharFrame from_angles(std::array<double, 3> deg);
  std::array<double, 3> y(double t, double x1, double x2) const;
};

// Z(t,x) = chi(t) exp(-|x|^2 / (2 width^2)), chi a smooth ramp from 0 at t_on to 1 at t_full.
struct ZCutoff {
  double t_on = -1.0, t_full = -0.4, width = 0.4;
  double time_factor(double t) const;
  double operator()(double t, double x, double y) const;
};

// P(y,u) = Z(y) sum_j a_j u^j
struct NonlinearitySpec {
  std::vector<double> a;
  ZCutoff z;
  int degree() const;
  bool is_zero() const;
  std::string str() const;
};

// Physical-space source evaluated on a (possibly padded) grid at time t.
struct Source {
  int degree = 0;  // polynomial degree in u, drives dealiasing
  double t_on = -std::numeric_limits<double>::infinity();  // identically zero before
  std::function<void(double t, const Grid2D& g, const double* u, double* out)> eval;

  static Source from_spec(const NonlinearitySpec& P);
  static Source none();
};

struct SolverConfig {
  double dt = 0.005;
  double t0 = -1.2, t1 = 1.5;
  std::vector<double> record_times;  // empty: t1 only
  double filter_K = 0;               // kick filter radius; 0 means Nyquist/2
  double filter_width = 0.2;
  bool dealias = true;
  bool record_ut = true;
};

// u = c2r(uh): coefficients of exp(i k.x) in the half-spectrum layout.
struct SpectralData {
  Grid2D grid;
  std::vector<cplx> uh, uth;
};

struct SpaceTimeField {
  Grid2D grid;
  std::vector<double> times;
  std::vector<std::vector<double>> u, ut;
};

struct SplitSolution {
  SpaceTimeField total;
  SpaceTimeField nonlinear;  // u - u_lin, evolved directly
  std::vector<double> energy_linear;  // at record times
  std::size_t steps = 0;
  std::array<std::size_t, 2> padded{};
};

struct BlowUp : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SpectralData to_spectral(const Grid2D& g, const std::vector<double>& u, const std::vector<double>& ut);
std::vector<double> to_physical(const Grid2D& g, const std::vector<cplx>& h);

void linear_propagate(SpectralData& s, double tau);
double wave_energy(const SpectralData& s);

// Smooth radial kick filter for the grid.
std::vector<double> kick_filter(const Grid2D& g, double K, double width);

class SemilinearStepper {
 public:
  SemilinearStepper(const Grid2D& g, const SolverConfig& cfg, const Source& src);
  ~SemilinearStepper();
  // one Strang step of (lin, nl) from t to t+dt; lin carries the free solution
  void step(SpectralData& lin, SpectralData& nl, double t);
  std::array<std::size_t, 2> padded() const { return {mx_, my_}; }

 private:
  Grid2D g_;
  Grid2D pg_;
  SolverConfig cfg_;
  Source src_;
  std::size_t mx_, my_;
  std::vector<double> c_, sk_, ks_, filt_;
  std::vector<cplx> tot_, ptot_, pF_, F_;
  std::vector<double> pu_, pP_;
  std::unique_ptr<Fft2D> pfft_;
};

// Semilinear solve in split form: u_lin evolves exactly, u_nl from zero is kicked by P(u_lin + u_nl).
SplitSolution solve_split(const SpectralData& init, const SolverConfig& cfg, const Source& src);
SpaceTimeField solve(const SpectralData& init, const SolverConfig& cfg, const NonlinearitySpec& P);

// E+ by the splitting integrator with zero data.
using Forcing = std::function<void(double t, const Grid2D& g, double* out)>;
SpaceTimeField duhamel_apply(const Grid2D& g, const Forcing& F, const SolverConfig& cfg);
// Independent check: composite Simpson in time of sin(|k|(t-s))/|k| F-hat(s), returns u at t.
std::vector<double> duhamel_quadrature(const Grid2D& g, const Forcing& F, double t0, double t, int intervals);

}  // namespace cwl

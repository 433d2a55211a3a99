#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "cwl/profiles.hpp"
#include "cwl/solver.hpp"

namespace cwl {

// Frame directions realised as lattice directions of the torus, so plane waves are exact mode sums.
struct TorusDesign {
  Grid2D grid;
  CharFrame frame;
  std::array<std::array<int, 2>, 3> lattice{};  // (p,q): wavevector 2pi(p/Lx, q/Ly) parallel to omega
  std::array<double, 3> period{};               // spatial period of each plane wave along omega
};

TorusDesign design_torus(const CharFrame& frame, const Grid2D& grid);

struct ConeProbe {
  double t_probe = 1.5;
  double angle_deg = 270;
  double exclusion_deg = 20;
};

struct ExperimentConfig {
  double m = -2.6;
  double lambda = 3.0;
  std::array<double, 3> eps{0.01, 0.01, 0.01};
  std::array<double, 3> angles{90, 210, 330};
  Grid2D grid{6.0 * 1.7320508075688772, 6.0, 2048, 1024};
  double profile_cutoff = 0.5;  // fraction of grid Nyquist
  double profile_taper = 0.2;
  NonlinearitySpec P{{0, 0, 0, 1}, {}};
  SolverConfig solver{};
  ConeProbe probe{};
  Window window{WindowKind::Gaussian, 1.2, 0.2};
  Band cone_band{60, 0};  // hi = 0 means Nyquist/4
  Band amp_band{8, 0};
  double tube_halfwidth_h = 4;  // tube of width 8h around the probe circle
  double arc_halfwidth_deg = 30;
  std::vector<double> eps_factors{1.0, 0.5, 0.25};
  double ridge_time = 0.5;
  double membership_threshold = 0.25;
};

Band resolve_band(Band b, const Grid2D& g);  // fills hi = Nyquist/4

SpectralData make_three_wave_data(const TorusDesign& d, const Symbol1D& a, std::array<double, 3> eps, double t0,
                                  double K, double taper_width);
SpectralData make_three_wave_data(const ExperimentConfig& cfg, std::array<double, 3> eps);

struct ConeGeometry {
  double radius = 0;
  std::array<double, 3> trace_angles_deg{};  // tangency points of the plane traces on the circle
};
ConeGeometry locate_cone(const CharFrame& frame, double t_probe);
double angular_distance_deg(double a, double b);
bool probe_respects_exclusion(const CharFrame& frame, const ConeProbe& p);

// Nonlinear response u - u_lin at the configured record times.
struct Response {
  std::array<double, 3> eps{};
  SplitSolution sol;
  const std::vector<double>& at(double t) const;  // u_nl slice
};
Response nonlinear_response(const ExperimentConfig& cfg, std::array<double, 3> eps, const NonlinearitySpec& P,
                            const std::vector<double>& record_times);

// Runs jobs across a worker pool; each job owns its state.
void run_parallel(std::size_t njobs, int workers, const std::function<void(std::size_t)>& job);

// Sum over nonempty S of (-1)^{3-|S|} u_nl[S]; mask bit j selects wave j.
std::vector<double> polarization_combine(const std::array<std::vector<double>, 8>& by_mask);
std::array<std::vector<double>, 8> polarization_runs(const ExperimentConfig& cfg, const NonlinearitySpec& P,
                                                     double t, int workers);

std::vector<double> bandpass(const std::vector<double>& field, const Grid2D& g, Band band);
Slice cone_slice(const std::vector<double>& field, const Grid2D& g, const ConeProbe& p, const Window& w);
DecayFit cone_order_estimate(const std::vector<double>& u_nl, const Grid2D& g, const CharFrame& frame,
                             const ConeProbe& p, const Window& w, Band band);
double slice_band_energy(const Slice& s, Band band);
double cone_amplitude(const std::vector<double>& u_nl, const Grid2D& g, const ConeProbe& p, Band band,
                      double tube_halfwidth, double arc_halfwidth_deg);
double tube_correlation(const std::vector<double>& a, const std::vector<double>& b, const Grid2D& g,
                        const ConeProbe& p, Band band, double tube_halfwidth, double arc_halfwidth_deg);
// Radius of max |band-pass| along the probe ray.
double cone_ridge_radius(const std::vector<double>& u_nl, const Grid2D& g, const ConeProbe& p, Band band,
                         double r_lo, double r_hi);
// Energy of the band-passed field within a distance of the plane traces at time t.
double trace_energy(const std::vector<double>& f, const Grid2D& g, const CharFrame& frame, double t, Band band,
                    double halfwidth);

// log-log slope of amplitudes vs eps; rejects all-zero input
LineFit amplitude_scaling(const std::vector<double>& eps, const std::vector<double>& amps);
double coefficient_recovery(double base_amp, double trial_amp);

}  // namespace cwl

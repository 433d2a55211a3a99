#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cwl/spectral.hpp"

namespace cwl {

struct Field3D {
  Grid3D grid;
  std::vector<double> data;  // row-major, axis 2 fastest

  Field3D() = default;
  explicit Field3D(const Grid3D& g) : grid(g), data(g.size(), 0.0) {}
  double& at(std::size_t i, std::size_t j, std::size_t k) {
    return data[(i * grid.axes[1].n + j) * grid.axes[2].n + k];
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return data[(i * grid.axes[1].n + j) * grid.axes[2].n + k];
  }
};

// Outer product f1(y1) f2(y2) f3(y3).
Field3D outer_product(const Grid3D& g, const std::vector<double>& f1, const std::vector<double>& f2,
                      const std::vector<double>& f3);
Field3D permute_axes(const Field3D& f, std::array<int, 3> perm);  // new axis a = old axis perm[a]

struct BealsWeight {
  double s = 0, k1 = 0, k2 = 0, k3 = 0;
  std::string str() const;
};

using Cutoff3D = std::function<double(double, double, double)>;
// prod_j bump(y_j / radius)
Cutoff3D product_bump_cutoff(double radius);

// |DFT(cutoff*field)|^2 on the full frequency lattice; several weights reuse it.
class BealsSpectrum {
 public:
  BealsSpectrum(const Field3D& f, const Cutoff3D& cutoff);
  double norm(const BealsWeight& w) const;

 private:
  Grid3D g_;
  std::size_t nh_;
  std::vector<double> power_;  // half spectrum along axis 2, multiplicity folded in
};

double beals_norm(const Field3D& f, const BealsWeight& w, const Cutoff3D& cutoff);

// (1/2pi) sum |DFT(phi f)|^2 <eta>^{2k} d_eta, square-rooted; 1D oracle for separable fields
double weighted_norm_1d(const std::vector<double>& f, const Grid1D& g, double k,
                        const std::function<double(double)>& phi);

struct MembershipScan {
  BealsWeight weight;
  std::vector<std::size_t> resolutions;
  std::vector<double> norms;
  double growth_exponent = 0;
  double threshold = 0.25;
  bool converged = false;
  bool inconclusive = false;
  bool member = false;
  std::string verdict() const;
};

using FieldGenerator = std::function<Field3D(std::size_t)>;

// Growth exponent: OLS slope of log|E_{i+1}-E_i| against log N_{i+1}, E = norm^2.
void classify_scan(MembershipScan& scan);
std::vector<MembershipScan> membership_scan(const FieldGenerator& gen, const std::vector<BealsWeight>& weights,
                                            const std::vector<std::size_t>& resolutions, const Cutoff3D& cutoff,
                                            double threshold = 0.25);

double algebra_ratio(const Field3D& u, const Field3D& v, const BealsWeight& w, const Cutoff3D& cutoff);

}  // namespace cwl

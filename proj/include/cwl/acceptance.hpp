#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cwl/config.hpp"
#include "cwl/interaction.hpp"
#include "cwl/normalform.hpp"
#include "cwl/products.hpp"

namespace cwl {

enum class Status { Pass, Fail, Inconclusive };
std::string status_name(Status s);

struct CriterionResult {
  int id = 0;
  std::string title;
  Status status = Status::Fail;
  std::string detail;
  std::vector<std::pair<std::string, double>> metrics;
  std::string line() const;  // "[PASS] 3 cone order: ..."
  double metric(const std::string& name) const;
};
CriterionResult make_result(int id, const std::string& title);

struct AcceptanceSettings {
  ExperimentConfig exp;
  Grid2D doubled_grid{6.0 * 1.7320508075688772, 6.0, 4096, 2048};
  Grid2D linear_grid{6.0 * 1.7320508075688772, 6.0, 512, 256};
  int energy_steps = 10000;
  double linear_dt = 0.005;
  // piriou
  double piriou_extent = 16.0;
  std::size_t piriou_n = 16384;
  Band piriou_band{512, 1536};
  // mollifier
  std::vector<long> mollifier_N{16, 32, 64, 128, 256, 512, 1024};
  int mollifier_r = 2;
  // beals
  double beals_extent = 8.0, beals_cutoff = 3.0;
  std::vector<std::size_t> beals_resolutions{32, 64, 128, 256};
  std::array<double, 2> beals_k1{2.0, 2.3};
  // products
  ProductScanConfig scan;
  LadderConfig ladder;
  ConvolutionProbe conv;
  std::vector<double> ggg_xi{16, 32, 64, 128, 256, 512, 1024};
  // normal form
  NormalFormConfig nf;
  int workers = 1;
  std::string out_dir;  // empty: no CSV output
  std::string hash;
  std::function<void(const std::string&)> log;
};

AcceptanceSettings acceptance_settings(const Config& c, const std::string& hash);

// Shares expensive runs between criteria 2-5.
class ExperimentCache {
 public:
  explicit ExperimentCache(const AcceptanceSettings& s) : s_(s) {}
  // u - u_lin at t_probe
  const std::vector<double>& response(const std::string& label, std::array<double, 3> eps, const NonlinearitySpec& P,
                                      const Grid2D* grid = nullptr);
  // runs any missing jobs of the list concurrently
  struct Job {
    std::string label;
    std::array<double, 3> eps;
    NonlinearitySpec P;
    const Grid2D* grid = nullptr;
  };
  void prefetch(const std::vector<Job>& jobs);

 private:
  const AcceptanceSettings& s_;
  std::map<std::string, std::vector<double>> cache_;
  std::vector<double> compute(const Job& j) const;
};

CriterionResult criterion_null(const AcceptanceSettings& s);                           // 1
CriterionResult criterion_two_wave(const AcceptanceSettings& s, ExperimentCache& c);   // 2
CriterionResult criterion_cone_order(const AcceptanceSettings& s, ExperimentCache& c); // 3
CriterionResult criterion_amplitude(const AcceptanceSettings& s, ExperimentCache& c);  // 4
CriterionResult criterion_quartic(const AcceptanceSettings& s, ExperimentCache& c);    // 5
CriterionResult criterion_piriou(const AcceptanceSettings& s);                         // 6
CriterionResult criterion_mollifier(const AcceptanceSettings& s);                      // 7
CriterionResult criterion_beals(const AcceptanceSettings& s);                          // 8
CriterionResult criterion_convolution(const AcceptanceSettings& s);                    // 9
CriterionResult criterion_triple_product(const AcceptanceSettings& s);                 // 10
CriterionResult criterion_normal_form(const AcceptanceSettings& s);                    // 11

// Runs the selected criteria (all when empty) in order; on_result fires as each completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceSettings& s, const std::vector<int>& ids,
                                            const std::function<void(const CriterionResult&)>& on_result);

// Case definitions shared with the products command.
std::array<std::array<YSymbol, 3>, 3> triple_product_cases(double m);

}  // namespace cwl

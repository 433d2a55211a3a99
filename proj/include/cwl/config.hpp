#pragma once

#include <boost/property_tree/ptree.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "cwl/interaction.hpp"
#include "cwl/normalform.hpp"
#include "cwl/products.hpp"

namespace cwl {

// key = value with [section] headers.
class Config {
 public:
  Config() = default;
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  double get(const std::string& key, double def) const;
  int get_int(const std::string& key, int def) const;
  std::string get_str(const std::string& key, const std::string& def) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& def) const;
  void set(const std::string& key, const std::string& value);

  // SHA-256 over the canonical (sorted, trimmed) key=value listing plus the seed.
  std::string hash(std::uint64_t seed) const;
  std::string canonical() const;
  const boost::property_tree::ptree& tree() const { return tree_; }

 private:
  boost::property_tree::ptree tree_;
  std::string origin_;
  double number(const std::string& key, const std::string& text) const;
};

ExperimentConfig experiment_config(const Config& c);
NonlinearitySpec nonlinearity(const Config& c, const std::string& key, const NonlinearitySpec& def);
ProductScanConfig product_scan_config(const Config& c);
LadderConfig ladder_config(const Config& c);
ConvolutionProbe convolution_probe(const Config& c);
NormalFormConfig normal_form_config(const Config& c);

}  // namespace cwl

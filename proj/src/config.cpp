#include "cwl/config.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <charconv>
#include <iomanip>
#include <map>
#include <sstream>

#include "cwl/spectral.hpp"

namespace cwl {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r\n"), b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::istringstream in(text);
  try {
    pt::read_ini(in, c.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw Rejected("config " + origin + ": line " + std::to_string(e.line()) + ": " + e.message());
  }
  return c;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Rejected("config: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_string(ss.str(), path);
}

bool Config::has(const std::string& key) const { return bool(tree_.get_optional<std::string>(key)); }

double Config::number(const std::string& key, const std::string& text) const {
  std::string t = trim(text);
  double v = 0;
  auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw Rejected("config " + origin_ + ": field '" + key + "': '" + t + "' is not a number");
  return v;
}

double Config::get(const std::string& key, double def) const {
  auto v = tree_.get_optional<std::string>(key);
  return v ? number(key, *v) : def;
}

int Config::get_int(const std::string& key, int def) const {
  double v = get(key, def);
  if (v != double(long(v))) throw Rejected("config " + origin_ + ": field '" + key + "' must be an integer");
  return int(v);
}

std::string Config::get_str(const std::string& key, const std::string& def) const {
  auto v = tree_.get_optional<std::string>(key);
  return v ? trim(*v) : def;
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& def) const {
  auto v = tree_.get_optional<std::string>(key);
  if (!v) return def;
  std::string s = *v;
  for (char& ch : s)
    if (ch == ',') ch = ' ';
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(number(key, tok));
  return out;
}

void Config::set(const std::string& key, const std::string& value) { tree_.put(key, value); }

std::string Config::canonical() const {
  std::map<std::string, std::string> flat;
  for (const auto& [sec, node] : tree_) {
    if (node.empty()) {
      flat[sec] = trim(node.data());
      continue;
    }
    for (const auto& [k, v] : node) flat[sec + "." + k] = trim(v.data());
  }
  std::string out;
  for (const auto& [k, v] : flat) out += k + "=" + v + "\n";
  return out;
}

std::string Config::hash(std::uint64_t seed) const {
  std::string text = canonical() + "seed=" + std::to_string(seed) + "\n";
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream h;
  for (unsigned i = 0; i < len; ++i) h << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return h.str().substr(0, 16);
}

NonlinearitySpec nonlinearity(const Config& c, const std::string& key, const NonlinearitySpec& def) {
  NonlinearitySpec P = def;
  P.a = c.get_list(key, def.a);
  P.z.t_on = c.get("nonlinearity.z_on", def.z.t_on);
  P.z.t_full = c.get("nonlinearity.z_full", def.z.t_full);
  P.z.width = c.get("nonlinearity.z_width", def.z.width);
  return P;
}

ExperimentConfig experiment_config(const Config& c) {
  ExperimentConfig e;
  e.m = c.get("experiment.m", e.m);
  e.lambda = c.get("experiment.lambda", e.lambda);
  auto eps = c.get_list("experiment.eps", {e.eps[0], e.eps[1], e.eps[2]});
  auto ang = c.get_list("experiment.angles", {e.angles[0], e.angles[1], e.angles[2]});
  if (eps.size() != 3 || ang.size() != 3) throw Rejected("config: experiment.eps and experiment.angles need 3 entries");
  e.eps = {eps[0], eps[1], eps[2]};
  e.angles = {ang[0], ang[1], ang[2]};
  e.grid = Grid2D{c.get("experiment.Lx", e.grid.Lx), c.get("experiment.Ly", e.grid.Ly),
                  std::size_t(c.get_int("experiment.nx", int(e.grid.nx))),
                  std::size_t(c.get_int("experiment.ny", int(e.grid.ny)))};
  e.profile_cutoff = c.get("experiment.profile_cutoff", e.profile_cutoff);
  e.profile_taper = c.get("experiment.profile_taper", e.profile_taper);
  e.eps_factors = c.get_list("experiment.eps_factors", e.eps_factors);
  e.membership_threshold = c.get("experiment.membership_threshold", e.membership_threshold);
  e.ridge_time = c.get("experiment.ridge_time", e.ridge_time);
  e.P = nonlinearity(c, "nonlinearity.a", e.P);
  e.solver.dt = c.get("solver.dt", e.solver.dt);
  e.solver.t0 = c.get("solver.t0", e.solver.t0);
  e.solver.t1 = c.get("solver.t1", e.solver.t1);
  e.solver.filter_K = c.get("solver.filter_K", e.solver.filter_K);
  e.solver.filter_width = c.get("solver.filter_width", e.solver.filter_width);
  e.solver.dealias = c.get_int("solver.dealias", e.solver.dealias ? 1 : 0) != 0;
  e.probe.t_probe = c.get("probe.t_probe", e.probe.t_probe);
  e.probe.angle_deg = c.get("probe.angle", e.probe.angle_deg);
  e.probe.exclusion_deg = c.get("probe.exclusion", e.probe.exclusion_deg);
  e.window.half_length = c.get("probe.window_half_length", e.window.half_length);
  e.window.sigma = c.get("probe.window_sigma", e.window.sigma);
  std::string wk = c.get_str("probe.window", e.window.kind == WindowKind::Gaussian ? "gaussian" : "bump");
  if (wk != "gaussian" && wk != "bump") throw Rejected("config: probe.window must be gaussian or bump");
  e.window.kind = wk == "gaussian" ? WindowKind::Gaussian : WindowKind::Bump;
  e.cone_band = {c.get("probe.cone_band_lo", e.cone_band.lo), c.get("probe.cone_band_hi", e.cone_band.hi)};
  e.amp_band = {c.get("probe.amp_band_lo", e.amp_band.lo), c.get("probe.amp_band_hi", e.amp_band.hi)};
  e.tube_halfwidth_h = c.get("probe.tube_halfwidth_h", e.tube_halfwidth_h);
  e.arc_halfwidth_deg = c.get("probe.arc_halfwidth_deg", e.arc_halfwidth_deg);
  return e;
}

ProductScanConfig product_scan_config(const Config& c) {
  ProductScanConfig p;
  p.extent = c.get("products.extent", p.extent);
  p.cutoff_radius = c.get("products.cutoff_radius", p.cutoff_radius);
  p.threshold = c.get("products.threshold", p.threshold);
  std::vector<double> def(p.resolutions.begin(), p.resolutions.end());
  auto r = c.get_list("products.resolutions", def);
  p.resolutions.assign(r.begin(), r.end());
  return p;
}

LadderConfig ladder_config(const Config& c) {
  LadderConfig l;
  l.max_doublings = c.get_int("products.max_doublings", l.max_doublings);
  l.xi_nodes_per_doubling = c.get_int("products.xi_nodes", l.xi_nodes_per_doubling);
  l.kappa_nodes = c.get_int("products.kappa_nodes", l.kappa_nodes);
  l.eps = c.get("products.eps", l.eps);
  return l;
}

ConvolutionProbe convolution_probe(const Config& c) {
  ConvolutionProbe p;
  p.kappa2 = c.get("products.kappa2", p.kappa2);
  p.kappa3 = c.get("products.kappa3", p.kappa3);
  p.delta = c.get("products.delta", p.delta);
  p.alpha = c.get("products.alpha", p.alpha);
  p.beta = c.get("products.beta", p.beta);
  return p;
}

NormalFormConfig normal_form_config(const Config& c) {
  NormalFormConfig n;
  n.delta = c.get("normalform.delta", n.delta);
  n.tol = c.get("normalform.tol", n.tol);
  n.fan_per_delta = c.get_int("normalform.fan_per_delta", n.fan_per_delta);
  n.tau_samples = c.get_int("normalform.tau_samples", n.tau_samples);
  n.shrink = c.get("normalform.shrink", n.shrink);
  n.max_shrinks = c.get_int("normalform.max_shrinks", n.max_shrinks);
  return n;
}

}  // namespace cwl

// cwl: command-line front end for the conormal wave laboratory.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cwl/acceptance.hpp"
#include "cwl/config.hpp"
#include "cwl/io.hpp"
#include "cwl/profiles.hpp"

using namespace cwl;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  int workers = 1;
  std::uint64_t seed = 0;
};

struct Ctx {
  Config cfg;
  std::string hash;
  std::string out;
  int workers;
};

Ctx load(const Common& c) {
  Ctx x{c.config.empty() ? Config() : Config::parse_file(c.config), "", c.out, c.workers};
  if (c.workers < 1) throw Rejected("--workers must be >= 1");
  x.hash = x.cfg.hash(c.seed);
  fs::create_directories(c.out);
  return x;
}

std::string fmt(double v) { return CsvWriter::fmt(v); }

// file name tag for a record time, e.g. t1.5
std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t%.6g", t);
  return buf;
}

void write_summary(const Ctx& x, const std::string& name, const std::vector<CriterionResult>& rs) {
  std::ofstream f(x.out + "/" + name);
  f << "config_hash = " << x.hash << "\n";
  for (const auto& r : rs) f << r.line() << "\n";
  CsvWriter w(x.out + "/" + (name.substr(0, name.find('.')) + ".csv"), x.hash,
              {"criterion [id]", "status [name]", "metric [name]", "value [see metric]"});
  for (const auto& r : rs)
    for (const auto& [k, v] : r.metrics)
      if (k != "seconds") w.row(std::vector<std::string>{std::to_string(r.id), status_name(r.status), k, fmt(v)});
}

int verdict(const std::vector<CriterionResult>& rs) {
  for (const auto& r : rs)
    if (r.status != Status::Pass) return 2;
  return 0;
}

std::vector<CriterionResult> run_criteria(const Ctx& x, const std::vector<int>& ids) {
  auto s = acceptance_settings(x.cfg, x.hash);
  s.workers = x.workers;
  s.out_dir = x.out;
  s.log = [](const std::string& m) { std::cerr << m << "\n"; };
  return run_acceptance(s, ids, [](const CriterionResult& r) {
    std::cout << r.line() << std::endl;
  });
}

FieldFile grid_field(const Grid2D& g, const std::vector<double>& u, double t, const std::string& kind,
                     const std::string& hash) {
  FieldFile f;
  f.dims = {g.nx, g.ny};
  f.data = u;
  f.meta = {{"kind", kind},        {"Lx", fmt(g.Lx)}, {"Ly", fmt(g.Ly)}, {"nx", std::to_string(g.nx)},
            {"ny", std::to_string(g.ny)}, {"time", fmt(t)}, {"config_hash", hash}};
  return f;
}

// ---- subcommands ----

int cmd_synth(const Ctx& x) {
  const double m = x.cfg.get("synth.m", -2.6), lambda = x.cfg.get("synth.lambda", 1.0);
  Grid1D g{x.cfg.get("synth.extent", 16.0), std::size_t(x.cfg.get_int("synth.n", 4096))};
  SynthOptions opt{x.cfg.get("synth.cutoff", 0.0), x.cfg.get("synth.taper_width", 0.0)};
  auto p = synthesize_profile(Symbol1D::bessel(m, lambda), g, opt);
  FieldFile f;
  f.dims = {g.n};
  f.data = p.samples;
  f.meta = {{"kind", "profile"}, {"extent", fmt(g.extent)}, {"n", std::to_string(g.n)},
            {"order", fmt(m)},    {"lambda", fmt(lambda)},   {"config_hash", x.hash}};
  write_field(x.out + "/profile.cwl", f);
  Band band{x.cfg.get("synth.band_lo", 16.0), x.cfg.get("synth.band_hi", g.nyquist() / 4)};
  auto fit = decay_exponent(p.samples, g, band);
  {
    CsvWriter w(x.out + "/profile_spectrum.csv", x.hash, {"eta [1/length]", "abs_F [field length]"});
    auto F = dft_forward(p.samples, g);
    for (std::size_t k = 1; k < g.n / 2; ++k) w.row({g.freq(k), std::abs(F[k])});
  }
  CsvWriter w(x.out + "/profile_fit.csv", x.hash,
              {"profile [name]", "slope [log|F|/log eta]", "predicted [1]", "rms [log]"});
  w.row(std::vector<std::string>{"f", fmt(fit.slope), fmt(m), fmt(fit.rms_residual)});
  std::cout << "profile m=" << m << " measured slope " << fit.slope << "\n";
  if (x.cfg.get_int("synth.piriou", 0)) {
    auto split = piriou_decompose(p);
    for (int j = 2; j <= 3; ++j) {
      auto pp = profile_power(split, j);
      auto fj = decay_exponent(pp.profile.samples, g, band);
      f.data = pp.profile.samples;
      f.meta["kind"] = "profile_power_" + std::to_string(j);
      write_field(x.out + "/profile_pow" + std::to_string(j) + ".cwl", f);
      w.row(std::vector<std::string>{"f^" + std::to_string(j), fmt(fj.slope), fmt(pp.predicted_order),
                                     fmt(fj.rms_residual)});
      std::cout << "f^" << j << " slope " << fj.slope << " predicted " << pp.predicted_order << "\n";
    }
  }
  return 0;
}

int cmd_solve(const Ctx& x) {
  auto e = experiment_config(x.cfg);
  auto times = x.cfg.get_list("solver.record_times", {e.probe.t_probe});
  auto r = nonlinear_response(e, e.eps, e.P, times);
  CsvWriter w(x.out + "/solve.csv", x.hash, {"time [1]", "linear_energy [field^2 length^2]", "max_abs_u_nl [field]"});
  for (std::size_t i = 0; i < r.sol.total.times.size(); ++i) {
    double t = r.sol.total.times[i];
    std::string tag = time_tag(t);
    write_field(x.out + "/u_total_" + tag + ".cwl", grid_field(e.grid, r.sol.total.u[i], t, "u_total", x.hash));
    write_field(x.out + "/u_nl_" + tag + ".cwl", grid_field(e.grid, r.sol.nonlinear.u[i], t, "u_nl", x.hash));
    double mx = 0;
    for (double v : r.sol.nonlinear.u[i]) mx = std::max(mx, std::abs(v));
    w.row({t, r.sol.energy_linear[i], mx});
  }
  std::cout << "solved " << r.sol.steps << " steps on " << e.grid.nx << "x" << e.grid.ny << " (P = " << e.P.str()
            << ")\n";
  return 0;
}

// Null test on a previous solve: reads both files before doing anything else.
int experiment_reuse(const Ctx& x, const std::string& dir) {
  auto e = experiment_config(x.cfg);
  const std::string tag = time_tag(e.probe.t_probe);
  auto nl = read_field(dir + "/u_nl_" + tag + ".cwl");
  auto tot = read_field(dir + "/u_total_" + tag + ".cwl");
  if (nl.dims != tot.dims) throw Rejected("experiment: u_nl and u_total dimensions differ");
  if (nl.dims.size() != 2 || nl.dims[0] != e.grid.nx || nl.dims[1] != e.grid.ny)
    throw Rejected("experiment: field dimensions do not match the configured grid");
  double a = 0, b = 0;
  for (double v : nl.data) a += v * v;
  for (double v : tot.data) b += v * v;
  const double ratio = std::sqrt(a / b);
  CriterionResult r = make_result(1, "null test (reused solve)");
  r.status = ratio < 1e-10 ? Status::Pass : Status::Fail;
  r.detail = "|u_nl|/|u| = " + fmt(ratio) + " (limit 1e-10)";
  r.metrics = {{"nl_ratio", ratio}};
  std::cout << r.line() << "\n";
  write_summary(x, "experiment_summary.txt", {r});
  return verdict({r});
}

int cmd_experiment(const Ctx& x) {
  std::string reuse = x.cfg.get_str("experiment.reuse_dir", "");
  if (!reuse.empty()) return experiment_reuse(x, reuse);
  auto rs = run_criteria(x, {2, 3, 4, 5});
  write_summary(x, "experiment_summary.txt", rs);
  return verdict(rs);
}

int cmd_beals(const Ctx& x) {
  auto s = acceptance_settings(x.cfg, x.hash);
  const double m = s.exp.m;
  auto ks = x.cfg.get_list("beals.k1_list", {1.8, 2.0, 2.1, 2.2, 2.3, 2.5});
  std::vector<BealsWeight> ws;
  for (double k : ks) ws.push_back({x.cfg.get("beals.s", 0.0), k, x.cfg.get("beals.k2", 0.0), x.cfg.get("beals.k3", 0.0)});
  auto gen = [&](std::size_t N) {
    Grid1D ax{s.beals_extent, N};
    auto f = synthesize_profile(Symbol1D::bessel(m, 1.0), ax).samples;
    std::vector<double> one(N, 1.0);
    return outer_product(Grid3D{{ax, ax, ax}}, f, one, one);
  };
  auto scans = membership_scan(gen, ws, s.beals_resolutions, product_bump_cutoff(s.beals_cutoff),
                               s.exp.membership_threshold);
  CsvWriter w(x.out + "/beals_scan.csv", x.hash,
              {"weight [s k1 k2 k3]", "N [points]", "norm [1]", "growth [1]", "verdict [name]"});
  for (const auto& sc : scans) {
    for (std::size_t i = 0; i < sc.norms.size(); ++i)
      w.row(std::vector<std::string>{sc.weight.str(), std::to_string(sc.resolutions[i]), fmt(sc.norms[i]),
                                     fmt(sc.growth_exponent), sc.verdict()});
    std::cout << sc.weight.str() << ": " << sc.verdict() << " (growth " << sc.growth_exponent << ")\n";
  }
  return 0;
}

int cmd_products(const Ctx& x) {
  auto rs = run_criteria(x, {9, 10});
  write_summary(x, "products_summary.txt", rs);
  return verdict(rs);
}

int cmd_normalform(const Ctx& x) {
  auto coeffs = OperatorCoeffs::named(x.cfg.get_str("normalform.case", "perturbed"));
  auto nf = normal_form_config(x.cfg);
  std::vector<CharacteristicSolution> sol;
  CsvWriter w(x.out + "/normalform_strips.csv", x.hash,
              {"j [1]", "delta [length]", "requested_delta [length]", "shrinks [count]", "strips [count]",
               "init_residual [1]", "max_drift [1]", "min_det_ratio [1]"});
  for (int j = 1; j <= 3; ++j) {
    sol.push_back(characteristic_solve(coeffs, j, InitialData::constant(x.cfg.get("normalform.u0", 1.0)), nf));
    const auto& s = sol.back();
    w.row({double(j), s.delta, s.delta_requested, double(s.shrinks), double(s.n_strips), s.init_residual, s.max_drift,
           s.min_det_ratio});
  }
  double delta = std::min({sol[0].delta, sol[1].delta, sol[2].delta});
  auto res = verify_normal_form(coeffs, {sol[0].as_function(), sol[1].as_function(), sol[2].as_function()},
                                delta / 2, delta / 32);
  CsvWriter r(x.out + "/normalform_residual.csv", x.hash,
              {"y1 [1]", "y2 [1]", "y3 [1]", "f1 [1]", "f2 [1]", "f3 [1]", "A [1]", "B [1]", "C [1]",
               "q_Y1 [1]", "q_Y2 [1]", "q_Y3 [1]"});
  for (const auto& P : res.points)
    r.row({P.y[0], P.y[1], P.y[2], P.f[0], P.f[1], P.f[2], P.res[0], P.res[1], P.res[2], P.transformed[0],
           P.transformed[1], P.transformed[2]});
  double drift = std::max({sol[0].max_drift, sol[1].max_drift, sol[2].max_drift});
  std::cout << "delta " << delta << " sup|A| " << res.sup_residual[0] << " sup|B| " << res.sup_residual[1]
            << " sup|C| " << res.sup_residual[2] << " drift " << drift << "\n";
  return res.pass(1e-6) && drift < 1e-9 ? 0 : 2;
}

int cmd_report(const Ctx& x) {
  std::vector<double> sel = x.cfg.get_list("acceptance.criteria", {});
  std::vector<int> ids(sel.begin(), sel.end());
  auto rs = run_criteria(x, ids);
  write_summary(x, "acceptance_summary.txt", rs);
  return verdict(rs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conormal wave laboratory"};
  app.require_subcommand(1);
  Common common;
  std::map<std::string, int (*)(const Ctx&)> cmds = {
      {"synth", cmd_synth},           {"solve", cmd_solve},       {"experiment", cmd_experiment},
      {"beals", cmd_beals},           {"products", cmd_products}, {"normalform", cmd_normalform},
      {"report", cmd_report}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, fn] : cmds) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", common.config, "config file (key = value with [sections])");
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--workers", common.workers, "concurrent runs");
    sub->add_option("--seed", common.seed, "seed recorded in the config hash");
    subs[name] = sub;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) return cmds[name](load(common));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

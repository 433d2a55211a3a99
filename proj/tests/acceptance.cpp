// One PASS/FAIL line per acceptance criterion; exit 0 only if all pass.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "cwl/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string config, out;
  std::vector<int> only;
  app.add_option("--config", config);
  app.add_option("--out", out);
  app.add_option("--criterion", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);
  try {
    cwl::Config c = config.empty() ? cwl::Config() : cwl::Config::parse_file(config);
    auto s = cwl::acceptance_settings(c, c.hash(0));
    if (!out.empty()) {
      std::filesystem::create_directories(out);
      s.out_dir = out;
    }
    s.log = [](const std::string& m) { std::cerr << m << std::endl; };
    bool all = true;
    cwl::run_acceptance(s, only, [&](const cwl::CriterionResult& r) {
      const bool pass = r.status == cwl::Status::Pass;
      all = all && pass;
      std::cout << (pass ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.title << "): " << r.detail;
      if (r.status == cwl::Status::Inconclusive) std::cout << " [inconclusive]";
      std::cout << " [" << r.metric("seconds") << " s]" << std::endl;
    });
    return all ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#include "tscope/commands.hpp"
#include "tscope/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> grid_n;
  std::optional<double> grid_L;
  bool json = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON run configuration");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--seed", c.seed, "seed for stratified pair sampling");
  sub->add_option("--grid-n", c.grid_n, "grid points per axis")->check(CLI::PositiveNumber);
  sub->add_option("--grid-L", c.grid_L, "grid half-width")->check(CLI::PositiveNumber);
  sub->add_flag("--json", c.json, "print the JSON report to stdout");
}

tscope::RunConfig resolve(const Common& c) {
  tscope::RunConfig cfg = c.config.empty() ? tscope::parse_config(nlohmann::json::object()) : tscope::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.grid_n) {
    if (*c.grid_n < 4) throw tscope::ConfigError("--grid-n must be at least 4");
    cfg.grid_n = *c.grid_n;
  }
  if (c.grid_L) cfg.grid_L = *c.grid_L;
  return cfg;
}

void summarize(const std::string& cmd, const nlohmann::json& j) {
  if (cmd == "classify") {
    std::cout << "class " << j["class"].get<std::string>() << ", rank(S1) " << j["rank_s1"] << ", rank(S2) "
              << j["rank_s2"] << "\n";
  } else if (cmd == "tune") {
    std::cout.precision(12);
    std::cout << "c* = " << j["c_star"].get<double>() << "\n";
  } else if (cmd == "laurent") {
    std::cout << "class " << j["class"].get<std::string>() << ", ||C-2|| " << j["c_minus2_norm"] << ", ||C-1|| "
              << j["c_minus1_norm"] << "\n";
  } else if (cmd == "evolve") {
    std::cout << "decay slope " << j["fit"]["slope"] << " over [" << j["fit"]["t_min"] << ", " << j["fit"]["t_max"]
              << "]\n";
  } else if (cmd == "theorem-check") {
    std::cout << "D(t) slope " << j["slope"] << " (" << j["class"].get<std::string>() << ")\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold spectral analysis of -Delta + V on a 3D grid"};
  app.require_subcommand(1);
  Common common;
  const std::vector<std::string> names = {"classify", "tune", "laurent", "evolve", "theorem-check", "selftest"};
  const std::vector<std::string> help = {"classify the zero-energy threshold",
                                         "radial critical coupling by shooting",
                                         "Laurent coefficients of A(lambda)^-1",
                                         "split-step evolution and sup-norm decay fit",
                                         "low-energy kernel against t^-1/2 F_t",
                                         "run the acceptance suite"};
  for (std::size_t i = 0; i < names.size(); ++i) add_common(app.add_subcommand(names[i], help[i]), common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : static_cast<int>(tscope::ExitCode::config);
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    const tscope::RunConfig cfg = resolve(common);
    nlohmann::json report;
    if (cmd == "classify") report = tscope::cmd_classify(cfg, common.out);
    else if (cmd == "tune") report = tscope::cmd_tune(cfg, common.out);
    else if (cmd == "laurent") report = tscope::cmd_laurent(cfg, common.out);
    else if (cmd == "evolve") report = tscope::cmd_evolve(cfg, common.out);
    else if (cmd == "theorem-check") report = tscope::cmd_theorem_check(cfg, common.out);
    else report = tscope::cmd_selftest(cfg, common.out, !common.json);
    if (common.json) std::cout << report.dump(2) << "\n";
    else summarize(cmd, report);
    if (cmd == "selftest" && !report["all_pass"].get<bool>()) return 1;
    return 0;
  } catch (const tscope::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(tscope::ExitCode::config);
  }
}

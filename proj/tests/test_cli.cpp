#include "tscope/commands.hpp"
#include "tscope/errors.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tscope;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tscope_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TSCOPE_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_path(const std::string& name) { return std::string(TSCOPE_CONFIGS) + "/" + name; }

RunConfig config(const std::string& text) { return parse_config(json::parse(text)); }

}  // namespace

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_config(json::array()), ConfigError);
  EXPECT_THROW(config(R"({"potential": {"kind": "cubic"}})"), ConfigError);
  EXPECT_THROW(config(R"({"potential": {"kind": "square_well", "radius": 1}})"), ConfigError);
  EXPECT_THROW(config(R"({"potential": {"kind": "resonant", "coupling": "tuned"}})"), ConfigError);
  EXPECT_THROW(config(R"({"grid": {"n": 2}})"), ConfigError);
  EXPECT_THROW(config(R"({"grid": {"L": -1}})"), ConfigError);
  EXPECT_THROW(config(R"({"seed": -3})"), ConfigError);
  EXPECT_THROW(config(R"({"time": {"t_min": 10, "t_max": 5}})"), ConfigError);
  EXPECT_THROW(config(R"({"evolve": {"window": {"t_min": 2, "t_max": 20}, "t_end": 10}})"), ConfigError);
  EXPECT_THROW(config(R"({"tune": {"c_lo": 3, "c_hi": 2}})"), ConfigError);
  EXPECT_THROW(config(R"({"sample_pairs": "many"})"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
  const fs::path bad = scratch("badjson") / "c.json";
  std::ofstream(bad) << "{ not json";
  EXPECT_THROW(load_config(bad.string()), ConfigError);
}

TEST(Config, HashIsCanonical) {
  const RunConfig a = config(R"({"seed": 4, "grid": {"n": 10, "L": 2.5}})");
  const RunConfig b = config(R"({"grid": {"L": 2.5, "n": 10}, "seed": 4})");
  const RunConfig c = config(R"({"seed": 5, "grid": {"n": 10, "L": 2.5}})");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_EQ(parse_config(a.to_json()).hash(), a.hash());
}

TEST(Config, BuildPotential) {
  const Grid3 g = build_grid(12, 3.0);
  const RunConfig crit = load_config(config_path("critical_well.json"));
  const BuiltPotential bp = build_potential(crit.potential, g);
  EXPECT_TRUE(bp.tuned);
  EXPECT_NEAR(bp.coupling, pi * pi / 4, 0.05 * pi * pi / 4);
  EXPECT_THROW(build_potential(config(R"({"potential": {"kind": "resonant", "R": 3.5}})").potential, g), ConfigError);

  const fs::path vals = scratch("gridpot") / "v.json";
  json arr = json::array();
  for (Index p = 0; p < g.size(); ++p) arr.push_back(g.radius(p) < 1.0 ? -1.0 : 0.0);
  std::ofstream(vals) << arr.dump();
  const RunConfig gc = config(R"({"potential": {"kind": "grid", "values": ")" + vals.string() + R"(", "coupling": 2}})");
  const BuiltPotential gp = build_potential(gc.potential, g);
  EXPECT_EQ(gp.potential.sample(g).minCoeff(), -2.0);
  EXPECT_THROW(build_potential(gc.potential, build_grid(10, 3.0)), ConfigError);
}

TEST(Commands, ClassifyReportsProvenance) {
  const fs::path out = scratch("classify");
  const RunConfig cfg = load_config(config_path("subcritical_well.json"));
  const json j = cmd_classify(cfg, out.string());
  EXPECT_EQ(j["class"], "regular");
  EXPECT_EQ(j["config_hash"], cfg.hash());
  EXPECT_EQ(j["grid"]["n"], 12);
  EXPECT_GT(j["threshold"]["lambda0"].get<double>(), 0.0);
  EXPECT_EQ(json::parse(slurp(out / "classify.json")), j);
  EXPECT_EQ(cmd_classify(load_config(config_path("resonant.json")), out.string())["class"], "resonance_only");
}

TEST(Commands, LaurentRegularHasNoPole) {
  const fs::path out = scratch("laurent");
  const json j = cmd_laurent(load_config(config_path("subcritical_well.json")), out.string());
  EXPECT_EQ(j["c_minus1_norm"].get<double>(), 0.0);
  EXPECT_EQ(j["c_minus2_norm"].get<double>(), 0.0);
  const std::string csv = slurp(out / "laurent.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 15);
  EXPECT_TRUE(fs::exists(out / "laurent.svg"));
}

TEST(Commands, TuneFindsSquareWellCoupling) {
  const json j = cmd_tune(load_config(config_path("tune_square_well.json")), scratch("tune").string());
  EXPECT_NEAR(j["c_star"].get<double>(), pi * pi / 4, 1e-6);
  EXPECT_THROW(cmd_tune(config(R"({"potential": {"kind": "square_well", "depth": 1}, "tune": {"c_lo": 3, "c_hi": 4}})"),
                        scratch("tune_bad").string()),
               ConfigError);
}

TEST(Commands, TheoremCheckIsByteIdentical) {
  const RunConfig cfg = load_config(config_path("resonant.json"));
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  cmd_theorem_check(cfg, a.string());
  cmd_theorem_check(cfg, b.string());
  for (const char* f : {"theorem_check.csv", "theorem_check.json", "theorem_check.svg"}) {
    const std::string x = slurp(a / f);
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, slurp(b / f)) << f;
  }
}

TEST(Errors, ExitCodesMapToFailureKinds) {
  EXPECT_EQ(ConfigError("x").code(), ExitCode::config);
  EXPECT_EQ(GapAmbiguity("x").code(), ExitCode::gap);
  EXPECT_EQ(NearSingular("x").code(), ExitCode::conditioning);
  EXPECT_EQ(BNotInvertible("x").code(), ExitCode::conditioning);
  EXPECT_EQ(WindowTooShort("x").code(), ExitCode::window);
  EXPECT_EQ(QuadratureFailure("x").code(), ExitCode::quadrature);
}

TEST(Binary, ExitCodes) {
  const fs::path out = scratch("bin");
  const std::string o = " --out " + out.string();
  EXPECT_EQ(run_cli("classify --config " + config_path("subcritical_well.json") + o), 0);
  EXPECT_EQ(run_cli("classify --config /nonexistent.json" + o), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("classify --grid-n 2" + o), 1);
  const fs::path small = out / "small_box.json";
  std::ofstream(small) << R"({"potential": {"kind": "resonant", "coupling": 0},
                             "evolve": {"n": 16, "L": 4, "window": {"t_min": 2, "t_max": 20, "samples": 24}}})";
  EXPECT_EQ(run_cli("evolve --config " + small.string() + o), 4);
  const fs::path late = out / "late.json";
  std::ofstream(late) << R"({"potential": {"kind": "resonant", "R": 2.0, "coupling": "grid_critical"},
                            "sample_pairs": 4, "time": {"t_min": 1e3, "t_max": 1e14, "samples": 3}})";
  EXPECT_EQ(run_cli("theorem-check --config " + late.string() + o), 5);
}

TEST(Binary, JsonFlagPrintsReport) {
  const fs::path out = scratch("binjson");
  const std::string cmd = std::string(TSCOPE_BIN) + " classify --json --config " + config_path("subcritical_well.json") +
                          " --out " + out.string() + " > " + (out / "stdout.json").string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(json::parse(slurp(out / "stdout.json")), json::parse(slurp(out / "classify.json")));
}

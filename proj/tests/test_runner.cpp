#include "nlc/errors.hpp"
#include "nlc/runner.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

using namespace nlc;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test case, removed on destruction.
struct Scratch {
  fs::path root;
  explicit Scratch(const std::string& tag) {
    root = fs::temp_directory_path() / ("nlc_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }

  fs::path config(const std::string& body, const std::string& name = "run.yaml") const {
    const fs::path p = root / name;
    std::ofstream(p) << body;
    return p;
  }
};

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[fs::relative(e.path(), dir).string()] = s.str();
  }
  return out;
}

std::string coupler_yaml(const fs::path& out, const std::string& extra = "") {
  return "device:\n  kind: coupler\n  zeta_end: 2.5\n" + extra + "output:\n  directory: " + out.string() +
         "\n  prefix: t\n";
}

}  // namespace

TEST_CASE("simulate: missing config is a usage error and writes nothing") {
  Scratch s("missing");
  std::ostringstream out, err;
  CHECK(cmd_simulate({s.root / "nope.yaml", std::nullopt, false}, out, err) == kExitUsage);
  CHECK(err.str().find("cannot open") != std::string::npos);
  CHECK(read_tree(s.root).empty());
}

TEST_CASE("simulate: bad config key is a usage error with the line") {
  Scratch s("badkey");
  std::ostringstream out, err;
  const auto cfg = s.config("device:\n  kappa: 1.0\n  wobble: 2\n");
  CHECK(cmd_simulate({cfg, std::nullopt, false}, out, err) == kExitUsage);
  CHECK(err.str().find("line 3") != std::string::npos);
}

TEST_CASE("simulate: outputs are deterministic and no temporaries remain") {
  Scratch s("determinism");
  const auto cfg = s.config(coupler_yaml(s.root / "out"));
  std::ostringstream out, err;
  REQUIRE(cmd_simulate({cfg, std::nullopt, true}, out, err) == kExitOk);
  const auto first = read_tree(s.root / "out");
  CHECK(first.count("t_trajectory.csv") == 1);
  CHECK(first.count("t_covariance.csv") == 1);
  CHECK(first.count("t_entanglement.csv") == 1);
  CHECK(first.count("t_metadata.txt") == 1);
  REQUIRE(cmd_simulate({cfg, std::nullopt, true}, out, err) == kExitOk);
  CHECK(read_tree(s.root / "out") == first);
  for (const auto& [name, body] : first) {
    CHECK(name.find(".tmp") == std::string::npos);
    CHECK(body.find("-0,") == std::string::npos);
  }
}

TEST_CASE("simulate: figure flag writes the figure table and plot") {
  Scratch s("figure");
  const auto cfg = s.config(coupler_yaml(s.root / "out"));
  std::ostringstream out, err;
  REQUIRE(cmd_simulate({cfg, std::string("fig8"), true}, out, err) == kExitOk);
  const auto files = read_tree(s.root / "out");
  CHECK(files.count("fig8.csv") == 1);
  CHECK(files.count("fig8.svg") == 1);
  CHECK(files.count("t_stage1.csv") == 1);
  CHECK(cmd_simulate({cfg, std::string("fig1"), false}, out, err) == kExitUsage);
}

TEST_CASE("simulate: relative output directories follow the root override") {
  Scratch s("root");
  const auto cfg = s.config("output:\n  directory: rel\n  prefix: r\ndevice:\n  zeta_end: 1.0\n");
  ::setenv(kOutputRootEnv, s.root.c_str(), 1);
  std::ostringstream out, err;
  const int code = cmd_simulate({cfg, std::nullopt, false}, out, err);
  ::unsetenv(kOutputRootEnv);
  CHECK(code == kExitOk);
  CHECK(fs::exists(s.root / "rel" / "r_entanglement.csv"));
}

TEST_CASE("simulate: symplecticity abort maps to exit 2") {
  Scratch s("abort");
  // an absurd step makes the defect exceed a tiny abort limit
  const auto cfg = s.config(coupler_yaml(s.root / "out", "numerics:\n  step: 0.5\n  defect_limit: 1e-300\n"));
  std::ostringstream out, err;
  CHECK(cmd_simulate({cfg, std::nullopt, false}, out, err) == kExitNumerical);
  CHECK_FALSE(fs::exists(s.root / "out"));
}

TEST_CASE("sweep value lists") {
  CHECK(parse_value_list("1.13, 0.8") == std::vector<double>{1.13, 0.8});
  CHECK(parse_value_list("2") == std::vector<double>{2.0});
  CHECK_THROWS_AS(parse_value_list(""), InvalidArgument);
  CHECK_THROWS_AS(parse_value_list("1,,2"), InvalidArgument);
  CHECK_THROWS_AS(parse_value_list("1,x"), InvalidArgument);
  CHECK_THROWS_AS(parse_value_list("nan"), InvalidArgument);
}

TEST_CASE("sweep parameter applicability") {
  const RunConfig base;
  CHECK(apply_sweep_value(base, "kappa", 0.8).coupler.params.kappa() == doctest::Approx(0.8));
  CHECK(apply_sweep_value(base, "gamma_h", 0.5).coupler.loss.gamma_h == 0.5);
  CHECK_THROWS_AS(apply_sweep_value(base, "temperature", 1.0), InvalidArgument);
  CHECK_THROWS_AS(apply_sweep_value(base, "kappa", -1.0), InvalidArgument);
  RunConfig sq = base;
  sq.kind = DeviceKind::kTwoModeSqueezer;
  CHECK_THROWS_AS(apply_sweep_value(sq, "kappa", 1.0), InvalidArgument);
  CHECK_THROWS_AS(apply_sweep_value(sq, "zeta_end", 1.0), InvalidArgument);
  CHECK(apply_sweep_value(sq, "C", 0.1).squeezer.coupling == 0.1);
}

TEST_CASE("sweep over kappa writes per-value outputs and a summary") {
  Scratch s("sweep");
  const auto cfg = s.config(coupler_yaml(s.root / "out"));
  std::ostringstream out, err;
  REQUIRE(cmd_sweep({cfg, "kappa", {1.13, 0.8}, 1}, out, err) == kExitOk);
  const auto serial = read_tree(s.root / "out");
  CHECK(serial.count("kappa_1.13/t_entanglement.csv") == 1);
  CHECK(serial.count("kappa_0.8/t_entanglement.csv") == 1);
  REQUIRE(serial.count("t_sweep_kappa.csv") == 1);
  CHECK(serial.at("t_sweep_kappa.csv").find("E_fa_fb_peak") != std::string::npos);

  fs::remove_all(s.root / "out");
  REQUIRE(cmd_sweep({cfg, "kappa", {1.13, 0.8}, 2}, out, err) == kExitOk);
  CHECK(read_tree(s.root / "out") == serial);
}

TEST_CASE("sweep: bad requests are usage errors with no outputs") {
  Scratch s("sweepbad");
  const auto cfg = s.config(coupler_yaml(s.root / "out"));
  std::ostringstream out, err;
  CHECK(cmd_sweep({cfg, "kappa", {}, 1}, out, err) == kExitUsage);
  CHECK(cmd_sweep({cfg, "temperature", {1.0}, 1}, out, err) == kExitUsage);
  CHECK(cmd_sweep({cfg, "kappa", {1.0}, 0}, out, err) == kExitUsage);
  CHECK(cmd_sweep({cfg, "kappa", {1.0, -2.0}, 1}, out, err) == kExitUsage);
  CHECK_FALSE(fs::exists(s.root / "out"));
}

TEST_CASE("sweep: one failing value means no outputs at all") {
  Scratch s("sweepfail");
  std::ostringstream out, err;
  const auto cfg = s.config(coupler_yaml(s.root / "out"));
  // kappa * step = 1000 makes the RK4 integration blow up
  CHECK(cmd_sweep({cfg, "kappa", {1.13, 1e6}, 2}, out, err) == kExitNumerical);
  CHECK(err.str().find("kappa = 1e+06") != std::string::npos);
  CHECK_FALSE(fs::exists(s.root / "out"));
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("selfcheck: clean run passes, injected fault and coarse step fail") {
  std::ostringstream out, err;
  SelfcheckOptions opts;
  opts.random_trials = 5;
  CHECK(cmd_selfcheck(opts, out, err) == kExitOk);

  SelfcheckOptions fault = opts;
  fault.drift = [](const ClassicalState& s, double k) {
    Mat8 d = assemble_drift(s, k);
    d(quad_y(Mode::kFa), quad_x(Mode::kFb)) = 0.0;
    d(quad_y(Mode::kFa), quad_x(Mode::kHb)) += k;
    return d;
  };
  const auto results = run_selfcheck(fault);
  for (const auto& r : results) {
    if (r.name == "transfer matrix symplecticity") CHECK_FALSE(r.passed);
  }
  CHECK_FALSE(all_passed(results));

  SelfcheckOptions coarse = opts;
  coarse.step = 0.1;
  std::ostringstream out2;
  CHECK(cmd_selfcheck(coarse, out2, err) == kExitInvariant);
  CHECK(out2.str().find("DEGRADED") != std::string::npos);
}

TEST_CASE("CLI binary: usage errors and selfcheck") {
  const std::string cli = NLC_CLI_PATH;
  auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  CHECK(run("") == kExitUsage);
  CHECK(run("simulate") == kExitUsage);
  CHECK(run("simulate --config /nonexistent.yaml") == kExitUsage);
  CHECK(run("sweep --config /nonexistent.yaml --param kappa --values ,") == kExitUsage);
  CHECK(run("selfcheck --step 0.1") == kExitInvariant);
}

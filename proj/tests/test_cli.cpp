#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "loglap/config.hpp"
#include "loglap/report.hpp"

using namespace loglap;
namespace fs = std::filesystem;

namespace {

#ifndef LOGLAP_CLI_PATH
#define LOGLAP_CLI_PATH "loglap"
#endif

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(LOGLAP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("loglap_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

// the single run directory created under `dir` for `sub`
fs::path run_dir_of(const fs::path& dir, const std::string& sub) {
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory() && e.path().filename().string().rfind(sub, 0) == 0)
      return e.path();
  throw std::runtime_error("no run directory for " + sub);
}

}  // namespace

TEST_CASE("config round trip: parse(emit(parse(text))) == parse(text)") {
  const std::string text = R"(
# test configuration
domain.left = -0.5
domain.right = 0.5
domain.n_cells = 96
operator.s_list = 0.2, 0.1, 0.05
nonlinearity.family = log_power
nonlinearity.theta = 0.25
nonlinearity.sigma = 0.7
solver.seed = 42
sweep.s_schedule = 0.1 0.05
sweep.sigma = -1.0
output.emit_svg = true
)";
  const RunConfig a = parse_config(text);
  const RunConfig b = parse_config(emit_config(a));
  CHECK(a == b);
  CHECK(a.n_cells == 96);
  CHECK(a.s_list == std::vector<double>{0.2, 0.1, 0.05});
  CHECK(a.family == "log_power");
  CHECK(a.seed == 42);
  CHECK(a.emit_svg);
}

TEST_CASE("config rejects unknown keys and bad values") {
  CHECK_THROWS_AS(parse_config("domain.widtth = 3\n"), config_error);
  CHECK_THROWS_AS(parse_config("domain.left = abc\n"), config_error);
  CHECK_THROWS_AS(parse_config("no equals sign here\n"), config_error);
  CHECK_THROWS_AS(parse_config("output.emit_svg = maybe\n"), config_error);
}

TEST_CASE("config validation ranges") {
  RunConfig c;
  c.left = 1.0;
  c.right = 0.0;
  CHECK_THROWS_AS(validate(c), config_error);
  c = RunConfig{};
  c.dimension = 2;
  CHECK_THROWS_AS(validate(c), config_error);
  c = RunConfig{};
  c.s_list = {0.3};
  CHECK_THROWS_AS(validate(c), config_error);
  c = RunConfig{};
  c.s_schedule = {0.05, 0.1};
  CHECK_THROWS_AS(validate(c), config_error);
  c = RunConfig{};
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("cli exit codes") {
  auto d = fresh_dir("codes");
  CHECK(run_cli("definitely-not-a-subcommand") == 2);
  CHECK(run_cli("") == 2);  // missing subcommand
  CHECK(run_cli("solve-limit --nonlinearity.sigma 5 --output.dir " +
                d.string()) == 2);
  CHECK(run_cli("solve-limit --nonlinearity.sigma 0 --output.dir " +
                d.string()) == 2);
  CHECK(run_cli("verify --domain.n_cells 32 --output.dir " + d.string()) == 0);
}

TEST_CASE("verify emits a ledger where every entry holds") {
  auto d = fresh_dir("ledger");
  REQUIRE(run_cli("verify --domain.n_cells 48 --output.dir " + d.string()) ==
          0);
  auto rd = run_dir_of(d, "verify");
  auto ledger = json::parse(slurp(rd / "ledger.json"));
  REQUIRE(ledger.is_array());
  CHECK(ledger.size() >= 9);
  for (const auto& v : ledger) CHECK(v.at("holds").get<bool>());
  auto manifest = json::parse(slurp(rd / "manifest.json"));
  CHECK(manifest.at("status") == "ok");
  CHECK(manifest.contains("stage_timings"));
}

TEST_CASE("re-running the same config and seed gives byte-identical outputs") {
  auto d1 = fresh_dir("det1");
  auto d2 = fresh_dir("det2");
  const std::string common =
      " --domain.n_cells 48 --sweep.s_schedule 0.1 0.05 --solver.seed 3 ";
  REQUIRE(run_cli("sweep-super" + common + "--output.dir " + d1.string()) ==
          0);
  REQUIRE(run_cli("sweep-super" + common + "--output.dir " + d2.string()) ==
          0);
  CHECK(slurp(run_dir_of(d1, "sweep-super") / "sweep.csv") ==
        slurp(run_dir_of(d2, "sweep-super") / "sweep.csv"));
  CHECK(slurp(run_dir_of(d1, "sweep-super") / "summary.json") ==
        slurp(run_dir_of(d2, "sweep-super") / "summary.json"));
}

TEST_CASE("sweep csv schema") {
  auto d = fresh_dir("schema");
  REQUIRE(run_cli("sweep-super --domain.n_cells 48 --sweep.s_schedule 0.1 "
                  "0.05 --output.dir " +
                  d.string()) == 0);
  const std::string csv = slurp(run_dir_of(d, "sweep-super") / "sweep.csv");
  CHECK(csv.rfind("s,l2_gap,energy_gap,norm_gap,r_gap\n", 0) == 0);
}

TEST_CASE("emit_svg=false produces no svg files") {
  auto d = fresh_dir("nosvg");
  REQUIRE(run_cli("solve-limit --domain.n_cells 48 --nonlinearity.sigma 1 "
                  "--output.dir " +
                  d.string()) == 0);
  auto rd = run_dir_of(d, "solve-limit");
  for (const auto& e : fs::directory_iterator(rd))
    CHECK(e.path().extension() != ".svg");

  auto d2 = fresh_dir("svg");
  REQUIRE(run_cli("solve-limit --domain.n_cells 48 --nonlinearity.sigma 1 "
                  "--output.emit_svg true --output.dir " +
                  d2.string()) == 0);
  CHECK(fs::exists(run_dir_of(d2, "solve-limit") / "profile.svg"));
}

TEST_CASE("config file feeds the run and flags override it") {
  auto d = fresh_dir("cfgfile");
  RunConfig c;
  c.n_cells = 40;
  c.dir = d.string();
  const auto cfg_path = d / "base.cfg";
  {
    std::ofstream f(cfg_path);
    f << emit_config(c);
  }
  REQUIRE(run_cli("verify --config " + cfg_path.string()) == 0);
  // flag overrides the file's n_cells; a bogus override must fail validation
  CHECK(run_cli("verify --config " + cfg_path.string() +
                " --domain.n_cells 1") == 2);
}

TEST_CASE("environment variable overrides the output directory") {
  auto d = fresh_dir("envdir");
  const std::string cmd = std::string("LOGLAP_OUTPUT_DIR=") + d.string() +
                          " " + LOGLAP_CLI_PATH +
                          " verify --domain.n_cells 32 --output.dir "
                          "/nonexistent > /dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK_NOTHROW(run_dir_of(d, "verify"));
}

TEST_CASE("failed run still writes a manifest with the failure stage") {
  auto d = fresh_dir("fail");
  // an s value too close to 1/4 passes config validation but the eig
  // schedule needs at least 3 entries, failing inside the pipeline
  CHECK(run_cli("eig --operator.s_list 0.1 0.05 --domain.n_cells 32 "
                "--output.dir " +
                d.string()) == 2);
  auto rd = run_dir_of(d, "eig");
  auto manifest = json::parse(slurp(rd / "manifest.json"));
  CHECK(manifest.at("status") == "failed");
  CHECK(manifest.at("failure_stage") == "eig");
}

TEST_CASE("operator set is not mutated by pipelines (checksum probe)") {
  auto g = build_grid({-0.5, 0.5}, 32);
  auto ops = assemble_operator_set(g, 1, {0.1, 0.05});
  auto checksum = [&] {
    return ops.A_L.sum() + ops.E_near.sum() + ops.J_far.sum() +
           ops.frac(0.1).sum() + ops.frac(0.05).sum() +
           static_cast<double>(ops.frac_cache.size());
  };
  const double sum_before = checksum();
  auto nl = Nonlinearity::linear(Vector::Zero(32), 1.0);
  (void)solve_superlinear_limit(ops, nl, seeded_init(g, 1), {});
  (void)verify_pitt(ops, 10, 1);
  SweepConfig sw;
  sw.s_schedule = {0.1, 0.05};
  sw.sigma = 1.0;
  sw.omega = Vector::Zero(32);
  (void)run_superlinear_asymptotics(ops, sw);
  CHECK(sum_before == checksum());
}

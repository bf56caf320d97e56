#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cli_fixture.hpp"
#include "swave/errors.hpp"
#include "swave/serialization.hpp"

using namespace swave;
using namespace swave::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(SWAVE_SOURCE_DIR) / "configs";

std::string with_out(const fs::path& config, const fs::path& out) {
  auto j = read_json(config);
  j["out"] = out.string();
  return j.dump();
}

fs::path stage(const ScratchDir& dir, const std::string& name, const std::string& out_name) {
  const fs::path cfg = dir / (name + ".json");
  write_text(cfg, with_out(kConfigs / (name + ".json"), dir / out_name));
  return cfg;
}

}  // namespace

TEST_CASE("config round trip is a fixed point") {
  std::vector<RunConfig> configs{default_config()};
  for (const auto& e : fs::directory_iterator(kConfigs)) configs.push_back(load_config(e.path()));
  REQUIRE(configs.size() >= 6);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 20; ++i) {
    RunConfig c = default_config();
    c.problem.s = 2.0 * u(rng);
    c.problem.a = CoefficientSpec::sum({{u(rng), CoefficientSpec::delta(u(rng))},
                                        {u(rng), CoefficientSpec::from_smooth(SmoothFunction{{u(rng)}, {{2.0, u(rng)}}, {}}, true)}});
    c.problem.u0 = DataSpec::band_limited({u(rng), u(rng)});
    c.problem.u1 = DataSpec::from_spec(CoefficientSpec::delta_power(u(rng), 3));
    c.problem.kernel = MollifierKernel(u(rng) - 0.5);
    c.kernel_b_offset = u(rng) - 0.5;
    c.seed = rng();
    c.estimate_variant = "general_s";
    configs.push_back(c);
  }
  for (const auto& c : configs) {
    const auto j = to_json(c);
    const RunConfig back = config_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back == c);
    CHECK(to_json(back).dump() == j.dump());
  }
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"modes", 4}, {"typo", 1}}), InvalidArgument);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"schema_version", 2}}), InvalidArgument);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"modes", "many"}}), InvalidArgument);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"case", "general"}}), InvalidArgument);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"kernel", {{"offset", 1.5}}}}), InvalidArgument);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"estimate_variant", "loose"}}), InvalidArgument);
}

TEST_CASE("overrides") {
  RunConfig c = default_config();
  apply_overrides(c, ConfigOverrides{.out = "x", .threads = 3, .grid = 511, .modes = 8, .dt = 0.01});
  CHECK(c.out == "x");
  CHECK(c.problem.threads == 3);
  CHECK(c.problem.n_interior == 511);
  CHECK(c.problem.modes == 8);
  CHECK(c.problem.dt == 0.01);
  CHECK(c.problem.epsilons == default_config().problem.epsilons);
  apply_overrides(c, ConfigOverrides{.eps_count = 3});
  CHECK(c.problem.epsilons == std::vector<double>{0.2, 0.1, 0.05});
  apply_overrides(c, ConfigOverrides{.eps0 = 0.3, .eps_ratio = 0.25});
  CHECK(c.problem.epsilons.size() == 3);
  CHECK(c.problem.epsilons[2] == doctest::Approx(0.3 / 16));
}

TEST_CASE("exit codes and diagnostics") {
  ScratchDir dir("cli_codes");
  write_text(dir / "bad.json", "{\n  \"modes\": 8,\n  \"s\": ,\n}\n");
  auto r = run({"eigen", "--config", (dir / "bad.json").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK(r.err.find("column") != std::string::npos);

  r = run({"eigen", "--grid", "255", "--modes", "128", "--out", (dir / "o").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("resolution guard") != std::string::npos);

  r = run({"frobnicate"});
  CHECK(r.code == 2);
  r = run({"eigen", "--threads", "0"});
  CHECK(r.code == 2);
  r = run({"--help"});
  CHECK(r.code == 0);

  write_text(dir / "neg.json", R"({"s": 0.5, "n_interior": 255, "modes": 8,
    "coefficients": {"q": {"kind": "smooth", "poly": [-40.0]}},
    "data": {"u0": {"kind": "band_limited", "coeffs": [1.0]}}})");
  r = run({"solve", "--config", (dir / "neg.json").string(), "--out", (dir / "neg").string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("lambda_1") != std::string::npos);
}

TEST_CASE("eigen on the free operator") {
  ScratchDir dir("cli_eigen");
  const auto r = run({"eigen", "--config", stage(dir, "eigen_free", "out").string()});
  REQUIRE(r.code == 0);
  const auto summary = read_json(dir / "out" / "summary.json");
  CHECK(summary.at("schema_version") == kReportSchemaVersion);
  CHECK(summary.at("slope_vs_pin2").get<double>() == doctest::Approx(1.0).epsilon(0.02));
  CHECK(csv_column(dir / "out" / "eig.csv", 1).size() == 128);
}

TEST_CASE("solve reports energy") {
  ScratchDir dir("cli_solve");
  SUBCASE("free single mode conserves energy") {
    REQUIRE(run({"solve", "--config", stage(dir, "solve_free_mode", "out").string()}).code == 0);
    const auto E = csv_column(dir / "out" / "energy.csv", 1);
    for (double e : E) CHECK(std::abs(e - E.front()) <= 1e-8 * E.front());
    const auto est = read_json(dir / "out" / "estimates.json");
    CHECK(est.at("variant") == "free");
    CHECK(est.at("schema_version") == kReportSchemaVersion);
  }
  SUBCASE("unit damping dissipates energy") {
    REQUIRE(run({"solve", "--config", stage(dir, "solve_damped", "out").string()}).code == 0);
    const auto E = csv_column(dir / "out" / "energy.csv", 1);
    for (std::size_t k = 1; k < E.size(); ++k) CHECK(E[k] < E[k - 1]);
    CHECK(read_json(dir / "out" / "estimates.json").at("variant") == "general_s");
  }
}

TEST_CASE("experiment reports") {
  ScratchDir dir("cli_reports");
  SUBCASE("net with delta coefficients") {
    REQUIRE(run({"net", "--config", stage(dir, "net_delta", "out").string()}).code == 0);
    const auto report = read_json(dir / "out" / "report.json");
    CHECK(report.at("schema_version") == kReportSchemaVersion);
    for (const char* key : {"a", "b", "q", "u0", "u1", "solution", "predicted_max_rule"}) {
      CHECK(report.at("fitted_exponents").contains(key));
    }
    CHECK(report.at("fitted_exponents").at("a").get<double>() == doctest::Approx(1.0).epsilon(0.05));
    CHECK(report.at("table").size() == 5);
    CHECK(report.at("bound_constants").at("values").size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(fs::exists(dir / "out" / ("solution_eps0" + std::to_string(i) + ".csv")));
  }
  SUBCASE("consistency with smooth coefficients") {
    REQUIRE(run({"consistency", "--config", stage(dir, "consistency_smooth", "out").string()}).code == 0);
    const auto report = read_json(dir / "out" / "report.json");
    CHECK(report.at("fitted_order").get<double>() >= 1.0);
    CHECK(fs::exists(dir / "out" / "classical.csv"));
  }
  SUBCASE("uniqueness with equal kernels") {
    const fs::path cfg = dir / "eq.json";
    auto j = read_json(kConfigs / "uniqueness_delta.json");
    j["kernel_b"]["offset"] = 0.0;
    j["out"] = (dir / "out").string();
    write_text(cfg, j.dump());
    REQUIRE(run({"uniqueness", "--config", cfg.string(), "--eps-count", "3"}).code == 0);
    const auto report = read_json(dir / "out" / "report.json");
    CHECK(report.at("fitted_order") == "+inf");
    CHECK(report.at("classification") == "negligible-at-order-+inf");
    CHECK(report.at("table").size() == 3);
  }
}

TEST_CASE("partial results survive a later failure") {
  ScratchDir dir("cli_partial");
  // An attractive delta well of weight 4.3 keeps lambda_1 > 0 for wide
  // mollifiers and loses it for narrow ones; the W^1 norm then fails.
  write_text(dir / "well.json", R"({"s": 1.0, "case": "s_equals_1", "n_interior": 1023, "modes": 32,
    "coefficients": {"q": {"kind": "sum", "nonneg": false,
      "terms": [{"weight": -4.3, "spec": {"kind": "delta", "x0": 0.5, "nonneg": false}}]}},
    "data": {"u0": {"kind": "band_limited", "coeffs": [1.0]}}})");
  const auto r = run({"net", "--config", (dir / "well.json").string(), "--out", (dir / "out").string()});
  CHECK(r.code == 3);
  CHECK(fs::exists(dir / "out" / "solution_eps00.csv"));
  CHECK(fs::exists(dir / "out" / "solution_eps01.csv"));
  CHECK_FALSE(fs::exists(dir / "out" / "solution_eps02.csv"));
  CHECK_FALSE(fs::exists(dir / "out" / "report.json"));
}

TEST_CASE("reruns are byte identical") {
  ScratchDir dir("cli_rerun");
  const std::vector<std::pair<std::string, std::string>> runs{{"eigen", "eigen_free"},
                                                              {"solve", "solve_damped"},
                                                              {"net", "net_delta"},
                                                              {"uniqueness", "uniqueness_delta"},
                                                              {"consistency", "consistency_smooth"}};
  for (const auto& [command, config] : runs) {
    const fs::path cfg = kConfigs / (config + ".json");
    REQUIRE(run({command, "--config", cfg.string(), "--threads", "1", "--out", (dir / "a").string()}).code == 0);
    REQUIRE(run({command, "--config", cfg.string(), "--threads", "1", "--out", (dir / "b").string()}).code == 0);
    const auto a = snapshot(dir / "a"), b = snapshot(dir / "b");
    CHECK(a.size() > 0);
    CHECK(a == b);
    fs::remove_all(dir / "a");
    fs::remove_all(dir / "b");
  }
}

TEST_CASE("threaded runs agree numerically") {
  ScratchDir dir("cli_threads");
  const fs::path cfg = kConfigs / "net_delta.json";
  REQUIRE(run({"net", "--config", cfg.string(), "--threads", "1", "--out", (dir / "a").string()}).code == 0);
  REQUIRE(run({"net", "--config", cfg.string(), "--threads", "4", "--out", (dir / "b").string()}).code == 0);
  const auto ra = read_json(dir / "a" / "report.json"), rb = read_json(dir / "b" / "report.json");
  for (std::size_t i = 0; i < ra.at("table").size(); ++i) {
    const double x = ra["table"][i]["solution_norm"], y = rb["table"][i]["solution_norm"];
    CHECK(std::abs(x - y) <= 1e-12 * std::abs(x));
  }
}

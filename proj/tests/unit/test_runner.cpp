#include "folia/runner.hpp"
#include "folia/serialize.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace folia;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kMinimal = R"(
name: minimal
model:
  kind: suspension
  A: [[2, 1], [1, 1]]
checks:
  run: [metric_invariance, holonomy]
sampling:
  points: 10
)";

}  // namespace

TEST_CASE("gallery has exactly the four bundled scenarios and each parses") {
  const auto entries = gallery();
  REQUIRE(entries.size() == 4);
  std::vector<std::string> names;
  for (const auto& e : entries) {
    names.push_back(e.name);
    CHECK_FALSE(e.description.empty());
    CHECK_NOTHROW(parse_config(std::string(e.text), e.name));
  }
  CHECK(names == std::vector<std::string>{"suspension-211", "product-lorentz", "warped-negative", "graph-suite"});
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(kMinimal);
  CHECK(cfg.name == "minimal");
  CHECK(cfg.model.A == IntMatrix2{{2, 1, 1, 1}});
  CHECK(cfg.sampling.points == 10);
  CHECK(cfg.sampling.seed == 42);
  CHECK(cfg.checks == std::vector<std::string>{"metric_invariance", "holonomy"});
  CHECK(cfg.expected("holonomy") == Verdict::Pass);

  CHECK(parse_config("model: {kind: suspension, A: [[2.0, 1], [1, 1]]}").model.A == IntMatrix2{{2, 1, 1, 1}});
  CHECK_THROWS_AS(parse_config("model: {kind: suspension, A: [[2.5, 1], [1, 1]]}"), ConfigError);
  CHECK_THROWS_AS(parse_config("model: {kind: suspension, colour: red}"), ConfigError);
  CHECK_THROWS_AS(parse_config("model: {kind: torus}"), ConfigError);
  CHECK_THROWS_AS(parse_config("model: {kind: warped}\nextra: 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("model: {kind: warped}\nchecks: {run: [nonsense]}"), ConfigError);
  CHECK_THROWS_AS(parse_config("model: {kind: warped}\nchecks: {run: [lewis], expect: {lewis: maybe}}"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("model: {kind: warped}\nchecks: {run: [lewis], expect: {holonomy: fail}}"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("model: [unbalanced"), ConfigError);
  CHECK_THROWS_AS(parse_config("model: {kind: product}"), ConfigError);
}

TEST_CASE("a non-Anosov matrix is a model error") {
  const auto cfg = parse_config("model: {kind: suspension, A: [[1, 1], [0, 1]]}");
  CHECK_THROWS_AS(run_scenario(cfg), NotAnosov);
}

TEST_CASE("expected failures count as success") {
  auto cfg = parse_config(R"(
model: {kind: warped}
checks:
  run: [lewis, biconditional]
  expect: {lewis: fail}
sampling: {points: 20, geodesics: 10}
)");
  auto result = run_scenario(cfg);
  CHECK(result.ok());
  cfg.expectations.clear();
  CHECK_FALSE(run_scenario(cfg).ok());
}

TEST_CASE("outputs: summary twins and per-check CSVs, byte-identical across runs") {
  const auto cfg = parse_config(kMinimal);
  const auto dir = std::filesystem::temp_directory_path() / "folia-runner-test";
  std::filesystem::remove_all(dir);
  write_outputs(run_scenario(cfg), (dir / "a").string());
  write_outputs(run_scenario(cfg), (dir / "b").string());
  for (const char* f : {"summary.txt", "summary.json", "metric_invariance.csv", "holonomy.csv"}) {
    CHECK(std::filesystem::exists(dir / "a" / f));
    CHECK(read_file(dir / "a" / f) == read_file(dir / "b" / f));
  }
  const auto csv = read_file(dir / "a" / "holonomy.csv");
  CHECK(csv.rfind("check,sample_index,loc_0,loc_1,loc_2,residual\n", 0) == 0);
  const auto json = nlohmann::json::parse(read_file(dir / "a" / "summary.json"));
  CHECK(json["ok"] == true);
  CHECK(json["checks"].size() == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting round-trips") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_number(M_PI)) == M_PI);
  CHECK(format_number(INFINITY) == "inf");
}

TEST_CASE("gallery runs match the committed golden summaries") {
  for (const auto& e : gallery()) {
    const auto golden_path = std::filesystem::path(FOLIA_TEST_DATA) / "golden" / (e.name + ".json");
    REQUIRE_MESSAGE(std::filesystem::exists(golden_path), golden_path.string());
    const auto golden = nlohmann::json::parse(read_file(golden_path));
    const auto actual = nlohmann::json::parse(summary_json(run_scenario(parse_config(std::string(e.text), e.name))));
    CHECK(actual["ok"] == golden["ok"]);
    REQUIRE(actual["checks"].size() == golden["checks"].size());
    for (std::size_t i = 0; i < golden["checks"].size(); ++i) {
      const auto& a = actual["checks"][i];
      const auto& g = golden["checks"][i];
      INFO(e.name << " / " << g["check"].get<std::string>());
      CHECK(a["check"] == g["check"]);
      CHECK(a["verdict"] == g["verdict"]);
      if (g["max_residual"].is_number()) {
        const double x = a["max_residual"].get<double>();
        const double y = g["max_residual"].get<double>();
        CHECK(std::abs(x - y) <= 1e-12 + 1e-9 * std::abs(y));
      } else {
        CHECK(a["max_residual"] == g["max_residual"]);
      }
    }
  }
}

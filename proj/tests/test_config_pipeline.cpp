#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "coron/config.hpp"
#include "coron/pipeline.hpp"

using namespace coron;
using nlohmann::json;

namespace {

const std::string dir = CORON_CONFIG_DIR;

json demo_json() {
  return json::parse(R"({
    "schema": "coronlab/1",
    "dims": 4,
    "coupling": {"mu": [1, 2], "beta": [[1, -0.5], [-0.5, 2]], "decomposition": [0, 2]},
    "domain": {"ball": {"center": [0, 0, 0, 0], "radius": 1},
               "holes": [{"center": [0, 0, 0, 0], "r": 1}], "epsilon": 1e-3},
    "tasks": ["c-vector"]
  })");
}

bool has_field(const std::vector<Diagnostic>& d, const std::string& field, Severity s) {
  return std::any_of(d.begin(), d.end(), [&](const Diagnostic& x) {
    return x.severity == s && x.field.find(field) != std::string::npos;
  });
}

RunOptions quiet() {
  RunOptions o;
  o.write_files = false;
  return o;
}

json strip_timing(json j) {
  if (j.is_object()) {
    j.erase("timing_s");
    for (auto& [k, v] : j.items()) v = strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_timing(v);
  }
  return j;
}

}  // namespace

TEST_CASE("well-formed config validates cleanly") {
  const auto cfg = parse_config(demo_json());
  CHECK(cfg.dims == 4);
  CHECK(cfg.mu.size() == 2);
  CHECK_FALSE(has_errors(validate_config(cfg)));
}

TEST_CASE("asymmetric coupling is a field error") {
  auto j = demo_json();
  j["coupling"]["beta"] = json::parse("[[1, -0.5], [-0.4, 2]]");
  const auto d = validate_config(parse_config(j));
  CHECK(has_errors(d));
  CHECK(has_field(d, "coupling.beta", Severity::error));
}

TEST_CASE("hole touching the boundary is a field error") {
  auto j = demo_json();
  j["domain"]["holes"][0]["center"] = json::parse("[1, 0, 0, 0]");
  const auto d = validate_config(parse_config(j));
  CHECK(has_field(d, "domain.holes[0]", Severity::error));
}

TEST_CASE("coupling outside the admissible range is only a warning") {
  auto j = demo_json();
  j["coupling"]["beta"] = json::parse("[[1, 1.5], [1.5, 2]]");
  const auto d = validate_config(parse_config(j));
  CHECK_FALSE(has_errors(d));
  CHECK(has_field(d, "coupling.beta", Severity::warning));
}

TEST_CASE("spectrum needs dimension four") {
  auto j = demo_json();
  j["dims"] = 3;
  j["domain"]["ball"]["center"] = json::parse("[0, 0, 0]");
  j["domain"]["holes"][0]["center"] = json::parse("[0, 0, 0]");
  j["tasks"] = json::parse(R"(["c-vector", "spectrum"])");
  CHECK(has_errors(validate_config(parse_config(j))));
}

TEST_CASE("malformed input raises ConfigError") {
  CHECK_THROWS_AS(load_config(dir + "/does_not_exist.json"), ConfigError);
  auto j = demo_json();
  j["schema"] = "coronlab/0";
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = demo_json();
  j["coupling"]["mu"] = "one";
  CHECK_THROWS_AS(parse_config(j), ConfigError);
}

TEST_CASE("demo run: amplitudes and inconclusive spectrum") {
  const auto res = run_experiment(load_config(dir + "/demo.json"), quiet());
  CHECK(res.exit_code == 2);
  const auto& tasks = res.summary["tasks"];
  const auto c2 = tasks["c-vector"]["outputs"][0]["values"]["c_squared"].get<std::vector<double>>();
  CHECK(c2[0] == doctest::Approx(10.0 / 7).epsilon(1e-12));
  CHECK(c2[1] == doctest::Approx(6.0 / 7).epsilon(1e-12));
  CHECK(tasks["c-vector"]["outputs"][0]["module"] == "coupling_spectrum");
  CHECK(tasks["spectrum"]["outputs"][0]["values"]["verdict"] == "inconclusive");
  CHECK(tasks["critical-point"]["status"] == "ok");
  CHECK(res.files.empty());
}

TEST_CASE("degenerate run reports the reason") {
  const auto res = run_experiment(load_config(dir + "/degenerate.json"), quiet());
  CHECK(res.exit_code == 2);
  CHECK(res.summary["tasks"]["spectrum"]["verdict"] == "degenerate: λ₂ = 1");
}

TEST_CASE("empty task list exits cleanly") {
  const auto res = run_experiment(load_config(dir + "/empty.json"), quiet());
  CHECK(res.exit_code == 0);
  CHECK(res.summary["tasks"].empty());
}

TEST_CASE("invalid config exits with 1 and lists diagnostics") {
  auto j = demo_json();
  j["coupling"]["decomposition"] = json::parse("[0, 3]");
  const auto res = run_experiment(parse_config(j), quiet());
  CHECK(res.exit_code == 1);
  CHECK_FALSE(res.summary["diagnostics"].empty());
}

TEST_CASE("runs are deterministic up to timings") {
  const auto cfg = load_config(dir + "/demo.json");
  auto o1 = quiet(), o2 = quiet();
  o2.threads = 3;
  const auto a = run_experiment(cfg, o1);
  const auto b = run_experiment(cfg, o2);
  CHECK(strip_timing(a.summary) == strip_timing(b.summary));
  auto o3 = quiet();
  o3.seed = 12345;
  CHECK(strip_timing(run_experiment(cfg, o3).summary) != strip_timing(a.summary));
}

TEST_CASE("known tasks") {
  const auto& t = known_tasks();
  for (const char* name : {"c-vector", "spectrum", "reduced-energy", "critical-point", "scaling-checks", "radial-sweep"}) {
    CHECK(std::find(t.begin(), t.end(), name) != t.end());
  }
}

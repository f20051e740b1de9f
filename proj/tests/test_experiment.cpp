#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cptherm/error.hpp"
#include "cptherm/experiment.hpp"

using namespace cpt;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string config_error_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigError);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("cptherm_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("task names") {
  CHECK(parse_task("vp-check") == Task::kVpCheck);
  CHECK(parse_task("vp_check") == Task::kVpCheck);
  CHECK(parse_task("suite") == Task::kPropertySuite);
  CHECK(to_string(Task::kGapExample) == "gap_example");
  CHECK_THROWS_AS(parse_task("nope"), Error);
}

TEST_CASE("config parsing") {
  ExperimentConfig c = parse_config(R"({
    "system": {"type": "sft", "matrix": [[1,1],[1,0]]},
    "potential": {"depth": 2, "table": [0.1, 0.2, 0.3, 0.4]},
    "subset": {"type": "cylinders", "words": [[0,1]], "start": 1},
    "task": "pressure",
    "budget": {"depths": [2,3], "n_max": 20, "tol": 1e-5, "q_grid": {"lo": -1, "hi": 1, "step": 0.5}},
    "output": "out",
    "seed": 7
  })");
  CHECK(c.system.kind == SystemConfig::Kind::kSft);
  CHECK(c.potential.depth == 2);
  CHECK(c.subset.start == 1);
  CHECK(c.task == Task::kPressure);
  CHECK(c.budget.depths == std::vector<int>{2, 3});
  CHECK(c.budget.q.size() == 5);
  CHECK(c.seed == 7);
  ExperimentConfig w = parse_config(R"({"potential": {"weights": [1, 2]}})");
  CHECK(w.potential.table[1] == doctest::Approx(std::log(2.0)));
  ExperimentConfig d = parse_config("{}");
  CHECK(d.system.kind == SystemConfig::Kind::kFullShift);
  CHECK(d.potential.name == "zero");
}

TEST_CASE("config errors name the field") {
  CHECK(config_error_message(R"({"system": {"type": "sft", "matrix": [[1,1],[1]]}})").find("system.matrix[1]") == 0);
  CHECK(config_error_message(R"({"system": {"type": "sft", "matrix": [[1,2],[1,1]]}})").find("system.matrix[0]") == 0);
  CHECK(config_error_message(R"({"system": {"type": "full_shift"}})").find("system.k") == 0);
  CHECK(config_error_message(R"({"potential": {"table": [0, 1, 2]}})").find("potential.table") == 0);
  CHECK(config_error_message(R"({"budget": {"tol": -1}})").find("budget.tol") == 0);
  CHECK(config_error_message(R"({"budget": {"n_max": 0}})").find("budget.n_max") == 0);
  CHECK(config_error_message(R"({"task": "correlation", "budget": {"q_grid": [0.5, 1, 2]}})").find("budget.q_grid") == 0);
  CHECK(config_error_message(R"({"bogus": 1})").find("bogus") == 0);
  CHECK(config_error_message(R"({"budget": {"depth": [1]}})").find("budget.depth") == 0);
  CHECK(config_error_message(R"({"system": {"type": "line_doubling"}, "subset": {"type": "sub_shift", "matrix": [[1]]}})")
            .find("subset") == 0);
  CHECK(config_error_message(R"({"potential": {"depth": 2, "table": [0,0,0,0]}, "budget": {"depths": [1]}})")
            .find("budget.depths") == 0);
  CHECK(config_error_message("{not json").find("config") == 0);
}

TEST_CASE("pressure task reports value and oracle") {
  ExperimentConfig c = parse_config(R"({"potential": {"weights": [1, 2]}, "task": "pressure"})");
  RunReport r = run(c);
  REQUIRE(r.tasks.size() == 1);
  bool found = false;
  for (const auto& check : r.tasks[0].checks)
    if (check.name == "pressure") {
      found = true;
      CHECK(check.value == doctest::Approx(std::log(3.0)).epsilon(1e-6));
      CHECK(check.reference == doctest::Approx(std::log(3.0)).epsilon(1e-12));
      CHECK(check.oracle == "transfer-matrix pressure");
      CHECK(check.pass);
    }
  CHECK(found);
  CHECK(r.all_pass());
  // cylinder subsets have no oracle
  ExperimentConfig z = parse_config(R"({"subset": {"type": "cylinders", "words": [[0, 1]]}, "task": "pressure"})");
  RunReport rz = run(z);
  bool estimate_only = false;
  for (const auto& check : rz.tasks[0].checks) estimate_only = estimate_only || check.oracle == "estimate-only";
  CHECK(estimate_only);
}

TEST_CASE("gap example task") {
  ExperimentConfig c = parse_config(R"({"task": "gap_example"})");
  RunReport r = run(c);
  CHECK(r.all_pass());
  for (const auto& check : r.tasks[0].checks)
    if (check.name == "gap") CHECK(check.value == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("tables and summary") {
  ExperimentConfig c = parse_config(R"({"potential": {"weights": [1, 2]}, "task": "spectrum",
                                        "budget": {"q_grid": {"lo": -1, "hi": 1, "step": 0.5}}})");
  RunReport r = run(c);
  auto dir = scratch("spectrum");
  emit_tables(r, dir.string());
  std::string spectrum = slurp(dir / "spectrum.csv");
  std::istringstream lines(spectrum);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "q,T,alpha,E");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 5);
  CHECK(slurp(dir / "correlation.csv") == "q,h_formula,h_direct\n");
  CHECK(slurp(dir / "pressure_diagnostics.csv") == "N,log_lambda,slope\n");
  auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["all_pass"].get<bool>());
  for (const auto& check : summary["tasks"][0]["checks"]) {
    CHECK(check.contains("tolerance"));
    CHECK(check.contains("oracle"));
    CHECK(check.contains("pass"));
  }
  CHECK_FALSE(summary["tasks"][0].contains("wall_seconds"));
}

TEST_CASE("empty report gives header-only files") {
  auto dir = scratch("empty");
  emit_tables(RunReport{}, dir.string());
  CHECK(slurp(dir / "spectrum.csv") == "q,T,alpha,E\n");
  CHECK(slurp(dir / "pressure_diagnostics.csv") == "N,log_lambda,slope\n");
  CHECK(nlohmann::json::parse(slurp(dir / "summary.json"))["tasks"].empty());
}

TEST_CASE("pressure diagnostics rows are monotone in N and finite") {
  ExperimentConfig c = parse_config(R"({"system": {"type": "sft", "matrix": [[1,1],[1,0]]}, "task": "pressure"})");
  RunReport r = run(c);
  auto dir = scratch("pressure");
  emit_tables(r, dir.string());
  std::istringstream lines(slurp(dir / "pressure_diagnostics.csv"));
  std::string line;
  std::getline(lines, line);
  int prev = 0;
  while (std::getline(lines, line)) {
    int n = std::stoi(line.substr(0, line.find(',')));
    CHECK(n > prev);
    prev = n;
    CHECK(line.find("inf") == std::string::npos);
    CHECK(line.find("nan") == std::string::npos);
  }
  CHECK(prev == 24);
}

TEST_CASE("unwritable output is an io error") {
  auto file = scratch("blocker");
  std::ofstream(file.string()) << "x";
  try {
    emit_tables(RunReport{}, (file / "sub").string());
    FAIL("expected io-error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIoError);
  }
}

TEST_CASE("outputs are byte-identical across runs and job counts") {
  ExperimentConfig c = parse_config(R"({"potential": {"weights": [1, 2]}, "task": "vp_check", "seed": 5,
                                        "budget": {"samples": 30}})");
  auto a = scratch("det_a");
  auto b = scratch("det_b");
  emit_tables(run(c, 1), a.string());
  emit_tables(run(c, 3), b.string());
  for (const char* f : {"summary.json", "spectrum.csv", "correlation.csv", "pressure_diagnostics.csv"})
    CHECK(slurp(a / f) == slurp(b / f));
  ExperimentConfig other = c;
  other.seed = 6;
  CHECK(summary_json(run(other)) != summary_json(run(c)));
}

TEST_CASE("computation errors carry the task name") {
  ExperimentConfig c = parse_config(R"({"system": {"type": "sft", "matrix": [[1,1],[0,1]]}, "task": "vp_check"})");
  try {
    run(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("task vp_check") == 0);
  }
}

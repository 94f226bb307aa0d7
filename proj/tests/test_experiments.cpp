#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "haargreedy/experiments.hpp"
#include "haargreedy/haar.hpp"
#include "haargreedy/lp_geometry.hpp"
#include "json.hpp"

using namespace haargreedy;
using nlohmann::json;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GreedyTrace small_trace() {
  HaarCoefficients x0 = HaarCoefficients::initial_segment(4);
  x0.coeffs = {1.0, 0.0, 2.0, 0.0, 1.0};
  AlgorithmConfig cfg;
  cfg.kind = AlgorithmKind::XGA;
  cfg.p = 2.0;
  cfg.seed = 321;
  return run(x0, cfg);
}

}  // namespace

TEST_CASE("plane counterexample: geometric decay without termination") {
  const CounterexampleReport rep = run_euclidean_counterexample(0.0, 1.0, 200);
  CHECK_FALSE(rep.terminated);
  REQUIRE(rep.steps.size() == 200);
  for (const CounterexampleStep& s : rep.steps) {
    CHECK(std::abs(s.ratio - kInvSqrt2) <= 1e-12);
    CHECK(s.normAfter < s.normBefore);
  }
  // Selections alternate between the two directions.
  for (std::size_t k = 1; k < rep.steps.size(); ++k)
    CHECK(rep.steps[k].selected != rep.steps[k - 1].selected);
  CHECK(rep.finalNorm == doctest::Approx(std::pow(2.0, -100.0)).epsilon(1e-9));
  CHECK(rep.finalNorm > 0.0);
}

TEST_CASE("plane counterexample: generic starts lock into the decay after one step") {
  const CounterexampleReport rep = run_euclidean_counterexample(0.3, 0.7, 60);
  CHECK_FALSE(rep.terminated);
  REQUIRE(rep.steps.size() == 60);
  for (std::size_t k = 1; k < rep.steps.size(); ++k)
    CHECK(std::abs(rep.steps[k].ratio - kInvSqrt2) <= 1e-12);
}

TEST_CASE("plane counterexample: dictionary-line starts die immediately") {
  const CounterexampleReport axis = run_euclidean_counterexample(1.0, 0.0, 10);
  CHECK(axis.terminated);
  REQUIRE(axis.steps.size() == 1);
  CHECK(axis.steps[0].normAfter == 0.0);
  CHECK(axis.finalNorm == 0.0);

  // The diagonal projection rounds, so the norm collapses to rounding noise
  // on the first step rather than reaching exact zero.
  const CounterexampleReport diag = run_euclidean_counterexample(2.0, 2.0, 10);
  REQUIRE_FALSE(diag.steps.empty());
  CHECK(diag.steps[0].normAfter <= 1e-15 * diag.steps[0].normBefore);

  const CounterexampleReport zero = run_euclidean_counterexample(0.0, 0.0, 10);
  CHECK(zero.terminated);
  CHECK(zero.steps.empty());

  CHECK_THROWS_AS(run_euclidean_counterexample(1.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("seeded unit starts are normalized and reproducible") {
  for (double p : {1.5, 2.0, 3.0}) {
    const HaarCoefficients c = random_unit_coefficients(6, p, 777);
    CHECK(lp_norm(synthesize(c, p), p) == doctest::Approx(1.0).epsilon(1e-12));
    const HaarCoefficients again = random_unit_coefficients(6, p, 777);
    CHECK(c.coeffs == again.coeffs);
    const HaarCoefficients other = random_unit_coefficients(6, p, 778);
    CHECK(c.coeffs != other.coeffs);
  }
}

TEST_CASE("preset starts: shapes that force multi-block partitions") {
  const auto names = preset_names();
  REQUIRE(names.size() == 7);
  for (double p : {2.0, 3.0}) {
    const int m = 6;
    const auto presets = preset_vectors(m, p);
    REQUIRE(presets.size() == names.size());
    for (const HaarCoefficients& c : presets) {
      CHECK(c.size() == static_cast<std::size_t>(m) + 1);
      CHECK(lp_norm(synthesize(c, p), p) == doctest::Approx(1.0).epsilon(1e-12));
    }
    // Geometric ramps keep their ratios after normalization.
    for (int i = 0; i + 1 <= m; ++i) {
      CHECK(presets[0].coeffs[i + 1] / presets[0].coeffs[i] ==
            doctest::Approx(3.0).epsilon(1e-14));
      CHECK(presets[1].coeffs[i] / presets[1].coeffs[i + 1] ==
            doctest::Approx(3.0).epsilon(1e-14));
      CHECK(presets[2].coeffs[i + 1] / presets[2].coeffs[i] ==
            doctest::Approx(10.0).epsilon(1e-14));
      CHECK(presets[3].coeffs[i] / presets[3].coeffs[i + 1] ==
            doctest::Approx(10.0).epsilon(1e-14));
      // Alternating signs.
      CHECK(presets[4].coeffs[i] * presets[4].coeffs[i + 1] < 0.0);
    }
    // Spikes top out at the advertised slot, a thousand times the floor.
    for (int which : {5, 6}) {
      const int peak = which == 5 ? (m + 1) / 2 : m;
      for (int i = 0; i <= m; ++i) {
        if (i == peak) continue;
        CHECK(presets[which].coeffs[peak] ==
              doctest::Approx(1e3 * presets[which].coeffs[i]).epsilon(1e-12));
      }
    }
    // The steep ramp genuinely splits the positions.
    CHECK(interval_partition(presets[3].coeffs, 1.0).intervals.size() > 1);
  }
}

TEST_CASE("campaigns enumerate cells in canonical order and reproduce exactly") {
  CampaignSpec spec;
  spec.pGrid = {2.0, 3.0};
  spec.mGrid = {3};
  spec.kinds = {AlgorithmKind::XGA};
  spec.runsPerCell = 5;
  spec.seed = 99;

  const auto cells = run_campaign(spec);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].key.p == 2.0);
  CHECK(cells[1].key.p == 3.0);
  for (const CellResult& cell : cells) {
    CHECK(cell.traces.size() == 5 + preset_names().size());
    CHECK(cell.terminated == static_cast<long>(cell.traces.size()));
    CHECK(cell.stepCapped == 0);
    CHECK(cell.failed == 0);
    int worst = 0;
    for (const GreedyTrace& t : cell.traces) {
      CHECK(t.status == RunStatus::Terminated);
      worst = std::max(worst, t.stepCount());
    }
    CHECK(cell.maxObservedSteps == worst);
  }

  const auto again = run_campaign(spec);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    REQUIRE(again[c].traces.size() == cells[c].traces.size());
    for (std::size_t r = 0; r < cells[c].traces.size(); ++r) {
      CHECK(again[c].traces[r].initialCoefficients.coeffs ==
            cells[c].traces[r].initialCoefficients.coeffs);
      REQUIRE(again[c].traces[r].stepCount() == cells[c].traces[r].stepCount());
      for (int k = 0; k < cells[c].traces[r].stepCount(); ++k)
        CHECK(again[c].traces[r].steps[k].lambda == cells[c].traces[r].steps[k].lambda);
    }
  }

  CampaignSpec bad = spec;
  bad.pGrid.clear();
  CHECK_THROWS_AS(run_campaign(bad), std::invalid_argument);
  bad = spec;
  bad.runsPerCell = 0;
  CHECK_THROWS_AS(run_campaign(bad), std::invalid_argument);
}

TEST_CASE("serialization picks the closed-form threshold above p = 2 and its floor below") {
  CHECK(serialization_zeta(3.0) == 4.0);
  CHECK(serialization_zeta(4.0) == doctest::Approx(2.0 * std::sqrt(6.0)).epsilon(1e-15));
  CHECK(serialization_zeta(2.0) == 4.0);
  CHECK(serialization_zeta(1.5) == 4.0);
}

TEST_CASE("JSON traces: frozen key order, parseable, faithful") {
  const GreedyTrace t = small_trace();
  REQUIRE(t.status == RunStatus::Terminated);
  const std::string text = trace_to_json(t, serialization_zeta(2.0));

  // The header keys open the document in their frozen order.
  CHECK(text.rfind("{\n  \"schemaVersion\": 1,\n  \"type\": \"greedy-trace\",\n  \"algorithm\":",
                   0) == 0);
  CHECK(text.back() == '\n');

  const json doc = json::parse(text);
  CHECK(doc["schemaVersion"] == 1);
  CHECK(doc["algorithm"] == "XGA");
  CHECK(doc["p"] == 2.0);
  CHECK(doc["tau"] == 1.0);
  CHECK(doc["seed"] == 321);
  CHECK(doc["partitionZeta"] == 4.0);
  CHECK(doc["indexSet"] == json({0, 1, 2, 3, 4}));
  CHECK(doc["initialCoefficients"] == json({1.0, 0.0, 2.0, 0.0, 1.0}));
  CHECK(doc["status"] == "Terminated");
  CHECK(doc["stepsToTermination"] == 3);
  CHECK(doc["finalResidualNorm"] == 0.0);
  REQUIRE(doc["steps"].size() == 3);
  for (const json& s : doc["steps"]) {
    for (const char* key : {"step", "selectedIndex", "lambda", "normBefore", "normAfter",
                            "partitionBefore", "snappedIndices"})
      CHECK(s.contains(key));
    int total = 0;
    for (int len : s["partitionBefore"]) total += len;
    CHECK(total == 5);
  }
  CHECK(doc["steps"][0]["step"] == 1);
  CHECK(doc["steps"][0]["selectedIndex"] == 2);
  CHECK(doc["steps"][0]["lambda"] == 2.0);

  // A capped run reports -1 instead of a step count.
  HaarCoefficients x0 = HaarCoefficients::initial_segment(5);
  for (std::size_t i = 0; i < x0.size(); ++i) x0.coeffs[i] = 1.0 + 0.1 * static_cast<double>(i);
  AlgorithmConfig cfg;
  cfg.kind = AlgorithmKind::XGA;
  cfg.p = 3.0;
  cfg.maxSteps = 2;
  const json capped = json::parse(trace_to_json(run(x0, cfg), 4.0));
  CHECK(capped["status"] == "StepCapReached");
  CHECK(capped["stepsToTermination"] == -1);
  CHECK(capped["steps"].size() == 2);
}

TEST_CASE("CSV traces: metadata comments, fixed header, one row per step") {
  const GreedyTrace t = small_trace();
  const std::string text = trace_to_csv(t, serialization_zeta(2.0));
  CHECK(text.rfind("# schemaVersion,1\n# type,greedy-trace\n# algorithm,XGA\n", 0) == 0);

  std::istringstream in(text);
  std::string line;
  std::vector<std::string> meta, rows;
  std::string header;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#')
      meta.push_back(line);
    else if (header.empty())
      header = line;
    else
      rows.push_back(line);
  }
  CHECK(header == "step,selectedIndex,lambda,normBefore,normAfter,partitionBefore,snappedIndices");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("1,2,2,", 0) == 0);  // step 1 selects slot 2 with lambda 2

  bool sawStatus = false, sawInitial = false;
  for (const std::string& c : meta) {
    sawStatus = sawStatus || c == "# status,Terminated";
    sawInitial = sawInitial || c == "# initialCoefficients,1;0;2;0;1";
  }
  CHECK(sawStatus);
  CHECK(sawInitial);

  // Every row carries a dash-joined partition whose lengths sum to the width.
  for (const std::string& r : rows) {
    std::istringstream fields(r);
    std::string f;
    for (int skip = 0; skip < 5; ++skip) std::getline(fields, f, ',');
    std::getline(fields, f, ',');
    int total = 0;
    std::istringstream lens(f);
    std::string piece;
    while (std::getline(lens, piece, '-')) total += std::stoi(piece);
    CHECK(total == 5);
  }
}

TEST_CASE("run driver: exit codes and output files") {
  const auto jsonPath = temp_file("hg_run_out.json");
  const auto csvPath = temp_file("hg_run_out.csv");
  std::filesystem::remove(jsonPath);
  std::filesystem::remove(csvPath);

  RunOptions opt;
  opt.kind = AlgorithmKind::XGA;
  opt.p = 2.0;
  opt.m = 4;
  opt.coeffs = {1.0, 0.0, 2.0, 0.0, 1.0};
  GlobalOptions g;
  g.outPath = jsonPath.string();

  CHECK(cmd_run(opt, g) == kExitOk);
  const json doc = json::parse(slurp(jsonPath));
  CHECK(doc["status"] == "Terminated");
  CHECK(doc["stepsToTermination"] == 3);

  g.format = "csv";
  g.outPath = csvPath.string();
  CHECK(cmd_run(opt, g) == kExitOk);
  CHECK(slurp(csvPath).rfind("# schemaVersion,1\n", 0) == 0);

  // Wrong coefficient count for the declared index range: usage error.
  RunOptions badCount = opt;
  badCount.coeffs = {1.0, 2.0};
  GlobalOptions quiet;
  quiet.outPath = jsonPath.string();
  CHECK(cmd_run(badCount, quiet) == kExitUsage);

  // A cap small enough to interrupt reports the step-cap exit code.
  RunOptions longRun;
  longRun.kind = AlgorithmKind::XGA;
  longRun.p = 3.0;
  longRun.m = 6;
  GlobalOptions capped;
  capped.maxSteps = 1;
  capped.outPath = jsonPath.string();
  CHECK(cmd_run(longRun, capped) == kExitStepCap);
  CHECK(json::parse(slurp(jsonPath))["status"] == "StepCapReached");

  std::filesystem::remove(jsonPath);
  std::filesystem::remove(csvPath);
}

TEST_CASE("counterexample driver: self-checking report") {
  const auto path = temp_file("hg_counter_out.json");
  std::filesystem::remove(path);
  CounterexampleOptions opt;
  opt.steps = 50;
  GlobalOptions g;
  g.outPath = path.string();
  CHECK(cmd_counterexample(opt, g) == kExitOk);
  const json doc = json::parse(slurp(path));
  CHECK(doc["type"] == "counterexample-report");
  CHECK(doc["ratioOk"] == true);
  CHECK(doc["axisStartTerminatesInOneStep"] == true);
  CHECK(doc["steps"].size() == 50);
  CHECK(doc["stepRatioTarget"] == doctest::Approx(kInvSqrt2).epsilon(1e-15));
  std::filesystem::remove(path);
}

TEST_CASE("ratio-sweep driver: small sweep passes its own assertion") {
  const auto path = temp_file("hg_propp_out.json");
  std::filesystem::remove(path);
  ProppOptions opt;
  opt.p = 3.0;
  opt.mGrid = {2, 3};
  opt.samples = 50;
  GlobalOptions g;
  g.outPath = path.string();
  CHECK(cmd_propp(opt, g) == kExitOk);
  const json doc = json::parse(slurp(path));
  CHECK(doc["type"] == "property-p-report");
  CHECK(doc["asserted"] == true);
  REQUIRE(doc["rows"].size() == 2);
  for (const json& row : doc["rows"]) {
    CHECK(row["violations"] == 0);
    CHECK(row["zetaHat"].get<double>() <= 4.0 + 1e-9);
    CHECK(row["zetaFormula"] == 4.0);
  }
  std::filesystem::remove(path);
}

TEST_CASE("bounds driver: estimates dominate observed run lengths") {
  const auto path = temp_file("hg_bounds_out.json");
  std::filesystem::remove(path);
  BoundsOptions opt;
  opt.pGrid = {3.0};
  opt.mGrid = {3};
  opt.gammaSamples = 200;
  opt.zetaSamples = 200;
  opt.runsPerCell = 20;
  GlobalOptions g;
  g.outPath = path.string();
  CHECK(cmd_bounds(opt, g) == kExitOk);
  const json doc = json::parse(slurp(path));
  CHECK(doc["type"] == "bounds-table");
  REQUIRE(doc["rows"].size() == 2);  // XGA and DGA rows
  for (const json& row : doc["rows"]) {
    CHECK(row["gammaHat"].get<double>() < 1.0);
    CHECK(row["zeta"] == 4.0);
    CHECK(row["n0"].get<std::int64_t>() >= 1);
    CHECK(row["N"] == 7 * row["n0"].get<std::int64_t>());
    CHECK(row["allTerminated"] == true);
    CHECK(row["boundOk"] == true);
    CHECK(row["observedMaxSteps"].get<int>() <= row["N"].get<std::int64_t>());
  }
  std::filesystem::remove(path);
}

TEST_CASE("lemma driver: replayed campaigns report zero violations") {
  const auto path = temp_file("hg_lemmas_out.json");
  std::filesystem::remove(path);
  LemmasOptions opt;
  opt.pGrid = {3.0};
  opt.mGrid = {3, 4};
  opt.runsPerCell = 10;
  opt.gammaSamples = 200;
  opt.zetaSamples = 200;
  GlobalOptions g;
  g.outPath = path.string();
  CHECK(cmd_lemmas(opt, g) == kExitOk);
  const json doc = json::parse(slurp(path));
  CHECK(doc["type"] == "lemma-report");
  REQUIRE(doc["rows"].size() == 4);  // two widths x two algorithms
  for (const json& row : doc["rows"]) {
    CHECK(row["lexViolations"] == 0);
    CHECK(row["n0Violations"] == 0);
    CHECK(row["steps"].get<long>() > 0);
  }
  std::filesystem::remove(path);
}

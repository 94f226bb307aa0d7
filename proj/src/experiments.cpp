#include "haargreedy/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "haargreedy/rng.hpp"
#include "json.hpp"

namespace haargreedy {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Writes to the path, or stdout when the path is empty. Returns false on
// I/O failure (mapped to the numerical-failure exit code by callers).
bool write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return static_cast<bool>(std::cout);
  }
  std::ofstream out(path, std::ios::binary);
  out << content;
  return static_cast<bool>(out);
}

}  // namespace

CounterexampleReport run_euclidean_counterexample(double a, double b, int maxSteps) {
  if (maxSteps < 1) throw std::invalid_argument("maxSteps must be >= 1");
  static const double s = 1.0 / std::sqrt(2.0);
  const double dict[2][2] = {{1.0, 0.0}, {s, s}};
  CounterexampleReport rep;
  rep.x0[0] = a;
  rep.x0[1] = b;
  double x = a, y = b;
  for (int step = 1; step <= maxSteps; ++step) {
    const double normBefore = std::hypot(x, y);
    if (normBefore == 0.0) {
      rep.terminated = true;
      break;
    }
    const double p0 = x * dict[0][0] + y * dict[0][1];
    const double p1 = x * dict[1][0] + y * dict[1][1];
    const int sel = std::abs(p1) > std::abs(p0) ? 1 : 0;  // ties to the first
    const double proj = sel == 0 ? p0 : p1;
    x -= proj * dict[sel][0];
    y -= proj * dict[sel][1];
    const double normAfter = std::hypot(x, y);
    rep.steps.push_back({step, sel, normBefore, normAfter, normAfter / normBefore});
  }
  rep.finalNorm = std::hypot(x, y);
  rep.terminated = rep.terminated || rep.finalNorm == 0.0;
  return rep;
}

HaarCoefficients random_unit_coefficients(int m, double p, std::uint64_t seed) {
  const HaarDictionary dict = HaarDictionary::initial_segment(m, p);
  HaarCoefficients c = HaarCoefficients::initial_segment(m);
  SplitMix64 rng(seed);
  double norm = 0.0;
  do {
    for (double& a : c.coeffs) a = rng.next_gaussian();
    norm = lp_norm(materialize(c, dict), p);
  } while (norm == 0.0);
  for (double& a : c.coeffs) a /= norm;
  return c;
}

std::vector<std::string> preset_names() {
  return {"ramp3_up", "ramp3_down", "ramp10_up", "ramp10_down",
          "alternating", "spike_mid", "spike_last"};
}

std::vector<HaarCoefficients> preset_vectors(int m, double p) {
  const HaarDictionary dict = HaarDictionary::initial_segment(m, p);
  const int M = m + 1;
  std::vector<std::vector<double>> raw;
  std::vector<double> v(M);

  for (int i = 0; i < M; ++i) v[i] = std::pow(3.0, i);
  raw.push_back(v);
  for (int i = 0; i < M; ++i) v[i] = std::pow(3.0, M - 1 - i);
  raw.push_back(v);
  for (int i = 0; i < M; ++i) v[i] = std::pow(10.0, i);
  raw.push_back(v);
  for (int i = 0; i < M; ++i) v[i] = std::pow(10.0, M - 1 - i);
  raw.push_back(v);
  for (int i = 0; i < M; ++i) v[i] = (i % 2 == 0) ? 1.0 : -1.0;
  raw.push_back(v);
  std::fill(v.begin(), v.end(), 1e-3);
  v[M / 2] = 1.0;
  raw.push_back(v);
  std::fill(v.begin(), v.end(), 1e-3);
  v[M - 1] = 1.0;
  raw.push_back(v);

  std::vector<HaarCoefficients> out;
  out.reserve(raw.size());
  for (auto& r : raw) {
    HaarCoefficients c = HaarCoefficients::initial_segment(m);
    c.coeffs = std::move(r);
    const double norm = lp_norm(materialize(c, dict), p);
    for (double& a : c.coeffs) a /= norm;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CellResult> run_campaign(const CampaignSpec& spec) {
  if (spec.pGrid.empty() || spec.mGrid.empty() || spec.kinds.empty() || spec.tauGrid.empty())
    throw std::invalid_argument("campaign grids must be nonempty");
  if (spec.runsPerCell < 1) throw std::invalid_argument("runsPerCell must be >= 1");
  std::vector<CellResult> cells;
  for (std::size_t pi = 0; pi < spec.pGrid.size(); ++pi) {
    for (std::size_t mi = 0; mi < spec.mGrid.size(); ++mi) {
      for (std::size_t ki = 0; ki < spec.kinds.size(); ++ki) {
        for (std::size_t ti = 0; ti < spec.tauGrid.size(); ++ti) {
          CellResult cell;
          cell.key = {spec.pGrid[pi], spec.mGrid[mi], spec.kinds[ki], spec.tauGrid[ti]};
          const std::uint64_t cellSeed =
              derive_seed(spec.seed, pi, mi, (ki << 8) | ti);

          AlgorithmConfig cfg;
          cfg.kind = cell.key.kind;
          cfg.p = cell.key.p;
          cfg.tau = cell.key.tau;
          cfg.snapEpsilon = spec.snapEpsilon;
          cfg.maxSteps = spec.maxSteps;

          std::vector<HaarCoefficients> starts;
          starts.reserve(spec.runsPerCell + 8);
          for (int r = 0; r < spec.runsPerCell; ++r)
            starts.push_back(random_unit_coefficients(
                cell.key.m, cell.key.p, derive_seed(cellSeed, static_cast<std::uint64_t>(r))));
          if (spec.includePresets) {
            auto presets = preset_vectors(cell.key.m, cell.key.p);
            starts.insert(starts.end(), presets.begin(), presets.end());
          }

          for (std::size_t r = 0; r < starts.size(); ++r) {
            cfg.seed = derive_seed(cellSeed, r);
            GreedyTrace t = run(starts[r], cfg);
            cell.maxObservedSteps = std::max(cell.maxObservedSteps, t.stepCount());
            switch (t.status) {
              case RunStatus::Terminated: ++cell.terminated; break;
              case RunStatus::StepCapReached: ++cell.stepCapped; break;
              case RunStatus::NumericalFailure: ++cell.failed; break;
            }
            cell.traces.push_back(std::move(t));
          }
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

double serialization_zeta(double p) { return p > 2.0 ? zeta_formula(p) : 4.0; }

namespace {

std::vector<int> partition_lengths_at(const std::vector<double>& state, double zeta) {
  return interval_partition(state, zeta).blockLengths();
}

}  // namespace

std::string trace_to_json(const GreedyTrace& trace, double zeta) {
  ordered_json j;
  j["schemaVersion"] = kSchemaVersion;
  j["type"] = "greedy-trace";
  j["algorithm"] = kind_name(trace.config.kind);
  j["p"] = trace.config.p;
  j["indexSet"] = trace.initialCoefficients.indexSet;
  j["tau"] = trace.config.tau;
  j["snapEpsilon"] = trace.config.snapEpsilon;
  j["maxSteps"] = trace.config.maxSteps;
  j["seed"] = trace.config.seed;
  j["partitionZeta"] = zeta;
  j["initialCoefficients"] = trace.initialCoefficients.coeffs;
  j["status"] = status_name(trace.status);
  j["stepsToTermination"] = trace.status == RunStatus::Terminated ? trace.stepCount() : -1;
  j["finalResidualNorm"] = trace.finalResidualNorm;
  j["finalResidual"] = trace.finalResidual.coeffs;
  if (!trace.failureMessage.empty()) j["failureMessage"] = trace.failureMessage;

  const std::vector<std::vector<double>> states = replay_coefficients(trace);
  ordered_json steps = ordered_json::array();
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const GreedyStepRecord& rec = trace.steps[k];
    ordered_json s;
    s["step"] = rec.stepNumber;
    s["selectedIndex"] = rec.selectedIndex;
    s["lambda"] = rec.lambda;
    s["normBefore"] = rec.residualNormBefore;
    s["normAfter"] = rec.residualNormAfter;
    s["partitionBefore"] = partition_lengths_at(states[k], zeta);
    s["snappedIndices"] = rec.snappedIndices;
    steps.push_back(std::move(s));
  }
  j["steps"] = std::move(steps);
  return j.dump(2) + "\n";
}

std::string trace_to_csv(const GreedyTrace& trace, double zeta) {
  std::ostringstream out;
  out << "# schemaVersion," << kSchemaVersion << "\n";
  out << "# type,greedy-trace\n";
  out << "# algorithm," << kind_name(trace.config.kind) << "\n";
  out << "# p," << fmt_double(trace.config.p) << "\n";
  out << "# tau," << fmt_double(trace.config.tau) << "\n";
  out << "# snapEpsilon," << fmt_double(trace.config.snapEpsilon) << "\n";
  out << "# maxSteps," << trace.config.maxSteps << "\n";
  out << "# seed," << trace.config.seed << "\n";
  out << "# partitionZeta," << fmt_double(zeta) << "\n";
  out << "# status," << status_name(trace.status) << "\n";
  out << "# stepsToTermination,"
      << (trace.status == RunStatus::Terminated ? trace.stepCount() : -1) << "\n";
  out << "# finalResidualNorm," << fmt_double(trace.finalResidualNorm) << "\n";
  out << "# indexSet,";
  for (std::size_t i = 0; i < trace.initialCoefficients.indexSet.size(); ++i)
    out << (i ? ";" : "") << trace.initialCoefficients.indexSet[i];
  out << "\n# initialCoefficients,";
  for (std::size_t i = 0; i < trace.initialCoefficients.coeffs.size(); ++i)
    out << (i ? ";" : "") << fmt_double(trace.initialCoefficients.coeffs[i]);
  out << "\n";
  out << "step,selectedIndex,lambda,normBefore,normAfter,partitionBefore,snappedIndices\n";

  const std::vector<std::vector<double>> states = replay_coefficients(trace);
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const GreedyStepRecord& rec = trace.steps[k];
    out << rec.stepNumber << "," << rec.selectedIndex << "," << fmt_double(rec.lambda) << ","
        << fmt_double(rec.residualNormBefore) << "," << fmt_double(rec.residualNormAfter) << ",";
    const std::vector<int> lens = partition_lengths_at(states[k], zeta);
    for (std::size_t i = 0; i < lens.size(); ++i) out << (i ? "-" : "") << lens[i];
    out << ",";
    for (std::size_t i = 0; i < rec.snappedIndices.size(); ++i)
      out << (i ? ";" : "") << rec.snappedIndices[i];
    out << "\n";
  }
  return out.str();
}

int cmd_run(const RunOptions& opt, const GlobalOptions& g) {
  AlgorithmConfig cfg;
  cfg.kind = opt.kind;
  cfg.p = opt.p;
  cfg.tau = opt.tau;
  cfg.snapEpsilon = g.snapEpsilon;
  cfg.maxSteps = g.maxSteps;
  cfg.seed = g.seed;

  HaarCoefficients x0;
  if (!opt.coeffs.empty()) {
    if (static_cast<int>(opt.coeffs.size()) != opt.m + 1) {
      std::cerr << "expected " << opt.m + 1 << " coefficients for --m " << opt.m << ", got "
                << opt.coeffs.size() << "\n";
      return kExitUsage;
    }
    x0 = HaarCoefficients::initial_segment(opt.m);
    x0.coeffs = opt.coeffs;
  } else {
    x0 = random_unit_coefficients(opt.m, opt.p, g.seed);
  }

  const GreedyTrace trace = run(x0, cfg);
  const double zeta = serialization_zeta(opt.p);
  const std::string body =
      g.format == "csv" ? trace_to_csv(trace, zeta) : trace_to_json(trace, zeta);
  if (!write_output(g.outPath, body)) {
    std::cerr << "failed to write output\n";
    return kExitNumerical;
  }
  switch (trace.status) {
    case RunStatus::Terminated: return kExitOk;
    case RunStatus::StepCapReached: return kExitStepCap;
    case RunStatus::NumericalFailure:
      std::cerr << trace.failureMessage << "\n";
      return kExitNumerical;
  }
  return kExitNumerical;
}

int cmd_bounds(const BoundsOptions& opt, const GlobalOptions& g) {
  ordered_json rows = ordered_json::array();
  std::ostringstream csv;
  csv << "p,m,kind,gammaHat,zeta,n0,N,observedMaxSteps,runs,allTerminated,boundOk\n";
  bool anyFailed = false, anyCapped = false, anyViolated = false;

  for (double p : opt.pGrid) {
    for (int m : opt.mGrid) {
      const double zeta = p > 2.0
                              ? zeta_formula(p)
                              : estimate_zeta(m, p, opt.zetaSamples,
                                              derive_seed(g.seed, hash_tag("zeta"),
                                                          static_cast<std::uint64_t>(m),
                                                          static_cast<std::uint64_t>(p * 64)));
      for (AlgorithmKind kind : {AlgorithmKind::XGA, AlgorithmKind::DGA}) {
        const HaarDictionary dict = HaarDictionary::initial_segment(m, p);
        const std::uint64_t cellSeed =
            derive_seed(g.seed, hash_tag(kind_name(kind)), static_cast<std::uint64_t>(m),
                        static_cast<std::uint64_t>(p * 64));
        const double gammaHat = estimate_gamma(dict, kind, 1.0, opt.gammaSamples, cellSeed);
        const std::int64_t n0 = n0_bound(m + 1, gammaHat, zeta);
        const std::int64_t N = total_bound(m, n0);

        CampaignSpec spec;
        spec.pGrid = {p};
        spec.mGrid = {m};
        spec.kinds = {kind};
        spec.runsPerCell = opt.runsPerCell;
        spec.seed = derive_seed(cellSeed, hash_tag("runs"));
        spec.snapEpsilon = g.snapEpsilon;
        spec.maxSteps = g.maxSteps;
        const std::vector<CellResult> cells = run_campaign(spec);
        const CellResult& cell = cells.front();
        const bool allTerminated = cell.stepCapped == 0 && cell.failed == 0;
        const bool boundOk =
            N != kBoundOverflow && cell.maxObservedSteps <= N && allTerminated;
        anyFailed = anyFailed || cell.failed > 0;
        anyCapped = anyCapped || cell.stepCapped > 0;
        anyViolated = anyViolated || !boundOk;

        ordered_json row;
        row["p"] = p;
        row["m"] = m;
        row["kind"] = kind_name(kind);
        row["gammaHat"] = gammaHat;
        row["zeta"] = zeta;
        row["n0"] = n0;
        row["N"] = N;
        row["observedMaxSteps"] = cell.maxObservedSteps;
        row["runs"] = static_cast<long>(cell.traces.size());
        row["allTerminated"] = allTerminated;
        row["boundOk"] = boundOk;
        rows.push_back(std::move(row));
        csv << fmt_double(p) << "," << m << "," << kind_name(kind) << ","
            << fmt_double(gammaHat) << "," << fmt_double(zeta) << "," << n0 << "," << N << ","
            << cell.maxObservedSteps << "," << cell.traces.size() << ","
            << (allTerminated ? 1 : 0) << "," << (boundOk ? 1 : 0) << "\n";
      }
    }
  }

  ordered_json doc;
  doc["schemaVersion"] = kSchemaVersion;
  doc["type"] = "bounds-table";
  doc["seed"] = g.seed;
  doc["rows"] = std::move(rows);
  const std::string body = g.format == "csv" ? csv.str() : doc.dump(2) + "\n";
  if (!write_output(g.outPath, body)) return kExitNumerical;
  if (anyFailed || anyViolated) return kExitNumerical;
  if (anyCapped) return kExitStepCap;
  return kExitOk;
}

int cmd_counterexample(const CounterexampleOptions& opt, const GlobalOptions& g) {
  const CounterexampleReport rep = run_euclidean_counterexample(0.0, 1.0, opt.steps);
  const double target = 1.0 / std::sqrt(2.0);
  bool ratioOk = !rep.terminated && static_cast<int>(rep.steps.size()) == opt.steps;
  for (const CounterexampleStep& s : rep.steps)
    ratioOk = ratioOk && std::abs(s.ratio - target) <= 1e-9;
  const CounterexampleReport axis = run_euclidean_counterexample(1.0, 0.0, 4);
  const bool oneStepOk = axis.terminated && axis.steps.size() == 1;

  ordered_json doc;
  doc["schemaVersion"] = kSchemaVersion;
  doc["type"] = "counterexample-report";
  doc["x0"] = {rep.x0[0], rep.x0[1]};
  doc["stepRatioTarget"] = target;
  doc["ratioOk"] = ratioOk;
  doc["axisStartTerminatesInOneStep"] = oneStepOk;
  doc["finalNorm"] = rep.finalNorm;
  ordered_json steps = ordered_json::array();
  for (const CounterexampleStep& s : rep.steps)
    steps.push_back({{"step", s.step},
                     {"selected", s.selected},
                     {"normBefore", s.normBefore},
                     {"normAfter", s.normAfter},
                     {"ratio", s.ratio}});
  doc["steps"] = std::move(steps);

  std::ostringstream csv;
  csv << "step,selected,normBefore,normAfter,ratio\n";
  for (const CounterexampleStep& s : rep.steps)
    csv << s.step << "," << s.selected << "," << fmt_double(s.normBefore) << ","
        << fmt_double(s.normAfter) << "," << fmt_double(s.ratio) << "\n";

  const std::string body = g.format == "csv" ? csv.str() : doc.dump(2) + "\n";
  if (!write_output(g.outPath, body)) return kExitNumerical;
  return ratioOk && oneStepOk ? kExitOk : kExitNumerical;
}

int cmd_propp(const ProppOptions& opt, const GlobalOptions& g) {
  const bool assertFormula = opt.p > 2.0;
  const double zetaRef = assertFormula ? zeta_formula(opt.p) : 0.0;
  ordered_json rows = ordered_json::array();
  std::ostringstream csv;
  csv << "m,zetaHat,cases,violations,zetaFormula\n";
  long violations = 0;

  for (int m : opt.mGrid) {
    const ZetaSweep sweep = estimate_zeta_sweep(
        m, opt.p, opt.samples,
        derive_seed(g.seed, hash_tag("propp"), static_cast<std::uint64_t>(m)),
        assertFormula ? zetaRef : std::numeric_limits<double>::infinity(), 1e-9);
    violations += sweep.violations;
    ordered_json row;
    row["m"] = m;
    row["zetaHat"] = sweep.zetaHat;
    row["cases"] = sweep.cases;
    row["violations"] = sweep.violations;
    if (assertFormula) row["zetaFormula"] = zetaRef;
    rows.push_back(std::move(row));
    csv << m << "," << fmt_double(sweep.zetaHat) << "," << sweep.cases << ","
        << sweep.violations << "," << (assertFormula ? fmt_double(zetaRef) : "") << "\n";
  }

  ordered_json doc;
  doc["schemaVersion"] = kSchemaVersion;
  doc["type"] = "property-p-report";
  doc["p"] = opt.p;
  doc["seed"] = g.seed;
  doc["asserted"] = assertFormula;
  doc["rows"] = std::move(rows);
  const std::string body = g.format == "csv" ? csv.str() : doc.dump(2) + "\n";
  if (!write_output(g.outPath, body)) return kExitNumerical;
  return assertFormula && violations > 0 ? kExitNumerical : kExitOk;
}

int cmd_lemmas(const LemmasOptions& opt, const GlobalOptions& g) {
  CampaignSpec spec;
  spec.pGrid = opt.pGrid;
  spec.mGrid = opt.mGrid;
  spec.kinds = opt.kinds;
  spec.runsPerCell = opt.runsPerCell;
  spec.seed = derive_seed(g.seed, hash_tag("lemmas"));
  spec.snapEpsilon = g.snapEpsilon;
  spec.maxSteps = g.maxSteps;
  const std::vector<CellResult> cells = run_campaign(spec);

  ordered_json rows = ordered_json::array();
  std::ostringstream csv;
  csv << "p,m,kind,gammaHat,zeta,steps,lexChecked,lexSkipped,lexViolations,"
         "n0Windows,n0Truncated,n0Violations\n";
  long totalViolations = 0;
  bool anyFailed = false;

  for (const CellResult& cell : cells) {
    const double p = cell.key.p;
    const int m = cell.key.m;
    const double zeta =
        p > 2.0 ? zeta_formula(p)
                : estimate_zeta(m, p, opt.zetaSamples,
                                derive_seed(g.seed, hash_tag("zeta"),
                                            static_cast<std::uint64_t>(m),
                                            static_cast<std::uint64_t>(p * 64)));
    const HaarDictionary dict = HaarDictionary::initial_segment(m, p);
    const double gammaHat =
        estimate_gamma(dict, cell.key.kind, cell.key.tau, opt.gammaSamples,
                       derive_seed(g.seed, hash_tag(kind_name(cell.key.kind)),
                                   static_cast<std::uint64_t>(m),
                                   static_cast<std::uint64_t>(p * 64)));

    long steps = 0, lexChecked = 0, lexSkipped = 0, lexViol = 0;
    long n0Windows = 0, n0Trunc = 0, n0Viol = 0;
    for (const GreedyTrace& t : cell.traces) {
      anyFailed = anyFailed || t.status == RunStatus::NumericalFailure;
      steps += t.stepCount();
      const LexLemmaReport lex = verify_lex_lemma(t, zeta);
      lexChecked += lex.checkedSteps;
      lexSkipped += lex.skippedSteps;
      lexViol += static_cast<long>(lex.violations.size());
      const N0LemmaReport n0 = verify_n0_lemma(t, zeta, gammaHat);
      n0Windows += n0.windowsChecked;
      n0Trunc += n0.windowsTruncated;
      n0Viol += n0.violations;
    }
    totalViolations += lexViol + n0Viol;

    ordered_json row;
    row["p"] = p;
    row["m"] = m;
    row["kind"] = kind_name(cell.key.kind);
    row["gammaHat"] = gammaHat;
    row["zeta"] = zeta;
    row["steps"] = steps;
    row["lexChecked"] = lexChecked;
    row["lexSkipped"] = lexSkipped;
    row["lexViolations"] = lexViol;
    row["n0Windows"] = n0Windows;
    row["n0Truncated"] = n0Trunc;
    row["n0Violations"] = n0Viol;
    rows.push_back(std::move(row));
    csv << fmt_double(p) << "," << m << "," << kind_name(cell.key.kind) << ","
        << fmt_double(gammaHat) << "," << fmt_double(zeta) << "," << steps << "," << lexChecked
        << "," << lexSkipped << "," << lexViol << "," << n0Windows << "," << n0Trunc << ","
        << n0Viol << "\n";
  }

  ordered_json doc;
  doc["schemaVersion"] = kSchemaVersion;
  doc["type"] = "lemma-report";
  doc["seed"] = g.seed;
  doc["rows"] = std::move(rows);
  const std::string body = g.format == "csv" ? csv.str() : doc.dump(2) + "\n";
  if (!write_output(g.outPath, body)) return kExitNumerical;
  return totalViolations > 0 || anyFailed ? kExitNumerical : kExitOk;
}

}  // namespace haargreedy

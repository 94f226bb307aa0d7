#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "haargreedy/experiments.hpp"

namespace hg = haargreedy;

namespace {

std::string check_p(const std::string& s) {
  try {
    if (std::stod(s) > 1.0) return {};
  } catch (...) {
  }
  return "exponent must be a number greater than 1";
}

std::vector<hg::AlgorithmKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<hg::AlgorithmKind> out;
  for (const std::string& n : names) {
    auto k = hg::parse_kind(n);
    if (!k) throw CLI::ValidationError("--kinds", "unknown algorithm kind: " + n);
    out.push_back(*k);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy approximation in finite-dimensional Lp with Haar dictionaries"};
  app.require_subcommand(1);
  app.fallthrough();

  hg::GlobalOptions g;
  app.add_option("--seed", g.seed, "master RNG seed")->capture_default_str();
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--out", g.outPath, "output path (default: stdout)");
  app.add_option("--max-steps", g.maxSteps, "step cap per run")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--snap-eps", g.snapEpsilon, "relative zero-snap threshold, in (0, 1e-6]")
      ->capture_default_str();

  // run
  auto* runCmd = app.add_subcommand("run", "one greedy run, full trace out");
  hg::RunOptions runOpt;
  std::string kindName = "xga";
  runCmd->add_option("--kind", kindName, "xga | dga | wxga | wdga")->capture_default_str();
  runCmd->add_option("--p", runOpt.p, "Lp exponent")->check(check_p)->capture_default_str();
  runCmd->add_option("--m", runOpt.m, "max Haar index (dictionary 0..m)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  runCmd->add_option("--tau", runOpt.tau, "weakness parameter in (0,1]")->capture_default_str();
  runCmd->add_option("--coeffs", runOpt.coeffs,
                     "m+1 starting coefficients (default: seeded random unit vector)")
      ->delimiter(',');

  // bounds
  auto* boundsCmd = app.add_subcommand("bounds", "termination bound table per (p, m, kind)");
  hg::BoundsOptions boundsOpt;
  boundsCmd->add_option("--p-grid", boundsOpt.pGrid, "exponents")->delimiter(',');
  boundsCmd->add_option("--m-grid", boundsOpt.mGrid, "max indices")->delimiter(',');
  boundsCmd->add_option("--samples", boundsOpt.gammaSamples, "gamma/zeta estimation samples")
      ->check(CLI::PositiveNumber);
  boundsCmd->add_option("--runs", boundsOpt.runsPerCell, "seeded runs per cell")
      ->check(CLI::PositiveNumber);

  // counterexample
  auto* ceCmd = app.add_subcommand("counterexample", "2D non-terminating XGA walk");
  hg::CounterexampleOptions ceOpt;
  ceCmd->add_option("--steps", ceOpt.steps, "steps to record")->check(CLI::PositiveNumber);

  // propp
  auto* proppCmd = app.add_subcommand("propp", "one-coordinate minimizer ratio sweep");
  hg::ProppOptions proppOpt;
  proppCmd->add_option("--p", proppOpt.p, "Lp exponent")->check(check_p);
  proppCmd->add_option("--m-grid", proppOpt.mGrid, "max indices")->delimiter(',');
  proppCmd->add_option("--samples", proppOpt.samples, "vectors per m")->check(CLI::PositiveNumber);

  // lemmas
  auto* lemmasCmd = app.add_subcommand("lemmas", "partition lemma replay over a campaign");
  hg::LemmasOptions lemmasOpt;
  std::vector<std::string> lemmaKindNames{"xga", "dga"};
  lemmasCmd->add_option("--p-grid", lemmasOpt.pGrid, "exponents")->delimiter(',');
  lemmasCmd->add_option("--m-grid", lemmasOpt.mGrid, "max indices")->delimiter(',');
  lemmasCmd->add_option("--kinds", lemmaKindNames, "algorithm kinds")->delimiter(',');
  lemmasCmd->add_option("--runs", lemmasOpt.runsPerCell, "seeded runs per cell")
      ->check(CLI::PositiveNumber);
  lemmasCmd->add_option("--samples", lemmasOpt.gammaSamples, "gamma/zeta estimation samples")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? hg::kExitOk : hg::kExitUsage;
  }

  try {
    if (!(g.snapEpsilon > 0.0 && g.snapEpsilon <= 1e-6)) {
      std::cerr << "--snap-eps must lie in (0, 1e-6]\n";
      return hg::kExitUsage;
    }
    if (runCmd->parsed()) {
      auto k = hg::parse_kind(kindName);
      if (!k) {
        std::cerr << "unknown algorithm kind: " << kindName << "\n";
        return hg::kExitUsage;
      }
      runOpt.kind = *k;
      const bool weak = k == hg::AlgorithmKind::WXGA || k == hg::AlgorithmKind::WDGA;
      if (!(runOpt.tau > 0.0 && runOpt.tau <= 1.0) || (!weak && runOpt.tau != 1.0)) {
        std::cerr << "tau must lie in (0,1], and equal 1 for xga/dga\n";
        return hg::kExitUsage;
      }
      return hg::cmd_run(runOpt, g);
    }
    if (boundsCmd->parsed()) {
      boundsOpt.zetaSamples = boundsOpt.gammaSamples;
      return hg::cmd_bounds(boundsOpt, g);
    }
    if (ceCmd->parsed()) return hg::cmd_counterexample(ceOpt, g);
    if (proppCmd->parsed()) return hg::cmd_propp(proppOpt, g);
    if (lemmasCmd->parsed()) {
      lemmasOpt.kinds = parse_kinds(lemmaKindNames);
      lemmasOpt.zetaSamples = lemmasOpt.gammaSamples;
      return hg::cmd_lemmas(lemmasOpt, g);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return hg::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return hg::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hg::kExitNumerical;
  }
  return hg::kExitUsage;
}

#include "haargreedy/greedy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "haargreedy/rng.hpp"

namespace haargreedy {

namespace {
constexpr double kTieSlack = 1e-14;  // relative; lowest slot wins within it
}

const char* kind_name(AlgorithmKind k) {
  switch (k) {
    case AlgorithmKind::XGA: return "XGA";
    case AlgorithmKind::DGA: return "DGA";
    case AlgorithmKind::WXGA: return "WXGA";
    case AlgorithmKind::WDGA: return "WDGA";
  }
  return "?";
}

std::optional<AlgorithmKind> parse_kind(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "xga") return AlgorithmKind::XGA;
  if (s == "dga") return AlgorithmKind::DGA;
  if (s == "wxga") return AlgorithmKind::WXGA;
  if (s == "wdga") return AlgorithmKind::WDGA;
  return std::nullopt;
}

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Terminated: return "Terminated";
    case RunStatus::StepCapReached: return "StepCapReached";
    case RunStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

void AlgorithmConfig::validate() const {
  require_valid_p(p);
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
  if (!is_weak(kind) && tau != 1.0)
    throw std::invalid_argument("XGA/DGA require tau = 1 (use the weak variants otherwise)");
  if (!(snapEpsilon > 0.0 && snapEpsilon <= 1e-6))
    throw std::invalid_argument("snapEpsilon must lie in (0, 1e-6]");
  if (maxSteps < 1) throw std::invalid_argument("maxSteps must be >= 1");
}

int select_dual(const HaarCoefficients& y, const HaarDictionary& dict, double tau) {
  if (y.all_zero()) throw std::invalid_argument("selection from a zero residual");
  const DyadicFunction f = materialize(y, dict);
  const NormingFunctional F = norming_functional(f, dict.p);
  std::vector<double> score(dict.size());
  double best = 0.0;
  for (int j = 0; j < dict.size(); ++j) {
    score[j] = std::abs(pairing(F.density, dict.elems[j]));
    best = std::max(best, score[j]);
  }
  const double cut = tau * best * (1.0 - kTieSlack);
  for (int j = 0; j < dict.size(); ++j) {
    if (score[j] >= cut) return j;
  }
  return 0;  // unreachable: best itself qualifies
}

std::pair<int, LineSearchResult> select_x(const HaarCoefficients& y, const HaarDictionary& dict,
                                          double tau) {
  if (y.all_zero()) throw std::invalid_argument("selection from a zero residual");
  const DyadicFunction f = materialize(y, dict);
  const double normBefore = lp_norm(f, dict.p);
  std::vector<LineSearchResult> ls(dict.size());
  double bestReduction = 0.0;
  for (int j = 0; j < dict.size(); ++j) {
    ls[j] = line_minimize(f, dict.elems[j], dict.p);
    bestReduction = std::max(bestReduction, normBefore - ls[j].residualNorm);
  }
  const double cut = tau * bestReduction * (1.0 - kTieSlack);
  for (int j = 0; j < dict.size(); ++j) {
    if (normBefore - ls[j].residualNorm >= cut) return {j, ls[j]};
  }
  return {0, ls[0]};  // unreachable
}

std::pair<GreedyStepRecord, HaarCoefficients> greedy_step(const HaarCoefficients& y,
                                                          const HaarDictionary& dict,
                                                          const AlgorithmConfig& cfg,
                                                          double snapScale) {
  if (y.all_zero()) throw std::invalid_argument("greedy step on a zero residual");

  int pos;
  LineSearchResult ls;
  if (is_x_type(cfg.kind)) {
    std::tie(pos, ls) = select_x(y, dict, cfg.tau);
  } else {
    pos = select_dual(y, dict, cfg.tau);
    ls = line_minimize(materialize(y, dict), dict.elems[pos], dict.p);
  }

  GreedyStepRecord rec;
  rec.selectedIndex = pos;
  rec.lambda = ls.lambdaStar;
  rec.residualNormBefore = lp_norm(materialize(y, dict), dict.p);

  HaarCoefficients next = y;
  next.coeffs[pos] -= ls.lambdaStar;

  int lastNonzero = -1;
  for (int j = static_cast<int>(y.size()) - 1; j >= 0; --j) {
    if (y.coeffs[j] != 0.0) {
      lastNonzero = j;
      break;
    }
  }
  if (pos == lastNonzero) {
    // Strict monotonicity: minimizing over the trailing nonzero direction
    // zeroes it. The 1e-6 * snapScale floor keeps the check meaningful when
    // the run has contracted far below its initial scale.
    const double tol = 1e-8 * std::max(std::abs(y.coeffs[pos]), 1e-6 * snapScale);
    if (std::abs(next.coeffs[pos]) > tol)
      throw NumericalError("last-position step missed zero: residue " +
                           std::to_string(next.coeffs[pos]));
  }

  const double snapCut = cfg.snapEpsilon * snapScale;
  for (int j = 0; j < static_cast<int>(next.size()); ++j) {
    if (next.coeffs[j] != 0.0 && std::abs(next.coeffs[j]) < snapCut) {
      next.coeffs[j] = 0.0;
      rec.snappedIndices.push_back(j);
    }
  }

  rec.residualNormAfter = lp_norm(materialize(next, dict), dict.p);
  return {std::move(rec), std::move(next)};
}

GreedyTrace run(const HaarCoefficients& x0, const AlgorithmConfig& cfg) {
  cfg.validate();
  x0.validate();
  GreedyTrace trace;
  trace.initialCoefficients = x0;
  trace.config = cfg;

  const HaarDictionary dict = HaarDictionary::from_indices(x0.indexSet, cfg.p);
  const double snapScale = x0.max_abs();
  HaarCoefficients y = x0;

  for (long step = 1;; ++step) {
    if (y.all_zero()) {
      trace.status = RunStatus::Terminated;
      break;
    }
    if (step > cfg.maxSteps) {
      trace.status = RunStatus::StepCapReached;
      break;
    }
    try {
      auto [rec, next] = greedy_step(y, dict, cfg, snapScale);
      rec.stepNumber = static_cast<int>(step);
      trace.steps.push_back(std::move(rec));
      y = std::move(next);
    } catch (const NumericalError& e) {
      trace.status = RunStatus::NumericalFailure;
      trace.failureMessage = e.what();
      break;
    }
  }

  trace.finalResidual = y;
  trace.finalResidualNorm = y.all_zero() ? 0.0 : lp_norm(materialize(y, dict), cfg.p);
  return trace;
}

HaarCoefficients greedy_approximant(const GreedyTrace& trace, int n) {
  if (n < 0 || n > trace.stepCount()) throw std::invalid_argument("approximant index out of range");
  HaarCoefficients g = trace.initialCoefficients;
  std::fill(g.coeffs.begin(), g.coeffs.end(), 0.0);
  for (int k = 0; k < n; ++k) g.coeffs[trace.steps[k].selectedIndex] += trace.steps[k].lambda;
  return g;
}

std::vector<std::vector<double>> replay_coefficients(const GreedyTrace& trace) {
  std::vector<std::vector<double>> states;
  states.reserve(trace.steps.size() + 1);
  states.push_back(trace.initialCoefficients.coeffs);
  for (const GreedyStepRecord& rec : trace.steps) {
    std::vector<double> s = states.back();
    s[rec.selectedIndex] -= rec.lambda;
    for (int j : rec.snappedIndices) s[j] = 0.0;
    states.push_back(std::move(s));
  }
  return states;
}

double estimate_gamma(const HaarDictionary& dict, AlgorithmKind kind, double tau, int sampleCount,
                      std::uint64_t seed) {
  if (sampleCount < 1) throw std::invalid_argument("sampleCount must be >= 1");
  double worst = 0.0;
  for (int s = 0; s < sampleCount; ++s) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(s), 0x67616d6d61ULL));
    HaarCoefficients c;
    c.indexSet = dict.indexSet;
    c.coeffs.resize(dict.indexSet.size());
    double norm = 0.0;
    do {
      for (double& a : c.coeffs) a = rng.next_gaussian();
      norm = lp_norm(materialize(c, dict), dict.p);
    } while (norm == 0.0);
    for (double& a : c.coeffs) a /= norm;
    double after;
    if (is_x_type(kind)) {
      after = select_x(c, dict, tau).second.residualNorm;
    } else {
      const int pos = select_dual(c, dict, tau);
      after = line_minimize(materialize(c, dict), dict.elems[pos], dict.p).residualNorm;
    }
    worst = std::max(worst, after);
  }
  return worst;
}

}  // namespace haargreedy

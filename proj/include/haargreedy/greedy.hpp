#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "haargreedy/lp_geometry.hpp"

namespace haargreedy {

enum class AlgorithmKind { XGA, DGA, WXGA, WDGA };

inline bool is_weak(AlgorithmKind k) {
  return k == AlgorithmKind::WXGA || k == AlgorithmKind::WDGA;
}
inline bool is_x_type(AlgorithmKind k) {
  return k == AlgorithmKind::XGA || k == AlgorithmKind::WXGA;
}
const char* kind_name(AlgorithmKind k);
std::optional<AlgorithmKind> parse_kind(const std::string& name);

struct AlgorithmConfig {
  AlgorithmKind kind = AlgorithmKind::XGA;
  double p = 2.0;
  double tau = 1.0;           // weakness parameter; must be 1 for XGA/DGA
  double snapEpsilon = 1e-10; // relative to the run's initial max |a_i|
  long maxSteps = 200000;
  std::uint64_t seed = 0;     // recorded with traces; drivers use it

  void validate() const;  // throws std::invalid_argument
};

struct GreedyStepRecord {
  int stepNumber = 0;           // 1-based
  int selectedIndex = 0;        // dictionary position (slot in indexSet)
  double lambda = 0.0;
  double residualNormBefore = 0.0;
  double residualNormAfter = 0.0;
  std::vector<int> snappedIndices;  // slots set to exact zero this step
};

enum class RunStatus { Terminated, StepCapReached, NumericalFailure };
const char* status_name(RunStatus s);

struct GreedyTrace {
  HaarCoefficients initialCoefficients;
  AlgorithmConfig config;
  std::vector<GreedyStepRecord> steps;
  RunStatus status = RunStatus::Terminated;
  std::string failureMessage;  // NumericalFailure only
  HaarCoefficients finalResidual;
  double finalResidualNorm = 0.0;

  int stepCount() const { return static_cast<int>(steps.size()); }
};

// Positions with |F_y(element)| >= tau * max qualify; the lowest qualifying
// slot wins. Comparisons carry a 1e-14 relative slack so exact ties (and the
// p = 2 X/dual coincidence) resolve identically regardless of rounding path.
int select_dual(const HaarCoefficients& y, const HaarDictionary& dict, double tau);

// One line minimization per dictionary element; qualification by norm
// reduction >= tau * best reduction, lowest qualifying slot. Returns the
// chosen slot's line-search result.
std::pair<int, LineSearchResult> select_x(const HaarCoefficients& y, const HaarDictionary& dict,
                                          double tau);

// One greedy step: select, update a_sel -= lambda, snap, record. snapScale
// is the run-initial max |a_i|; coefficients below snapEpsilon * snapScale
// become exact zeros. When the selected slot is the last nonzero one, the
// updated value must land within 1e-8 * max(|a_sel|, 1e-6 * snapScale) of
// zero (strict monotonicity forces lambda = a_sel there); a miss is a
// NumericalError, never silently absorbed.
std::pair<GreedyStepRecord, HaarCoefficients> greedy_step(const HaarCoefficients& y,
                                                          const HaarDictionary& dict,
                                                          const AlgorithmConfig& cfg,
                                                          double snapScale);

GreedyTrace run(const HaarCoefficients& x0, const AlgorithmConfig& cfg);

// G_n in coefficient space: lambda_i accumulated at the selected slots of
// the first n steps. G_n + x_n == x_0 up to snapped zeros.
HaarCoefficients greedy_approximant(const GreedyTrace& trace, int n);

// Coefficient state before each step plus the final state: result[k] is the
// residual after k steps. Bit-exact: replays the recorded lambdas and snap
// sets, in the same order the engine applied them.
std::vector<std::vector<double>> replay_coefficients(const GreedyTrace& trace);

// Worst observed one-step contraction over seeded unit-norm starts; the
// empirical stand-in for the norm-reduction constant. Always < 1 on a
// finite Haar dictionary (tests pin that down).
double estimate_gamma(const HaarDictionary& dict, AlgorithmKind kind, double tau, int sampleCount,
                      std::uint64_t seed);

}  // namespace haargreedy

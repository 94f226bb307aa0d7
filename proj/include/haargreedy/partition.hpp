#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "haargreedy/greedy.hpp"

namespace haargreedy {

// Consecutive integer blocks (I_1, ..., I_k) tiling positions [1, m], built
// top-down: position m opens I_1 and each lower position either joins the
// block above it or opens a new one. Blocks are stored I_1 first, as
// inclusive (lo, hi) pairs. Coefficient slot j (0-based) sits at position
// j + 1; that one mapping is used everywhere partitions meet coefficients.
struct IntervalPartition {
  int m = 0;
  std::vector<std::pair<int, int>> intervals;

  std::vector<int> blockLengths() const;
  std::vector<int> endpoints() const;  // max I_j for every block, I_1 first
  bool valid() const;
};

// Backward induction with parameter zeta: position i joins the block of
// i+1 when |a_i| <= (1+zeta)^{m-i} * sum of |a| at the endpoints of the
// blocks built so far, else opens a new block. a[j] is the coefficient at
// position j+1.
IntervalPartition interval_partition(const std::vector<double>& a, double zeta);

// Same, and reports the smallest relative gap met in any of the threshold
// comparisons (1 when a comparison was 0 <= 0). Lemma replays skip steps
// whose partitions hinged on a comparison closer than their guard band.
IntervalPartition interval_partition_checked(const std::vector<double>& a, double zeta,
                                             double* minRelGap);

enum class LexOrder { Less, Equal, Greater };

// Order by block cardinality, I_1 first; the first differing block decides.
// ([1,m]) is the unique maximum.
LexOrder lex_compare(const IntervalPartition& P1, const IntervalPartition& P2);

// (actual norm, m*(1+zeta)^m/zeta * max endpoint |a|) for the vector with
// these coefficients; the partition is rebuilt with the same zeta. Tests
// assert first <= second.
std::pair<double, double> norm_upper_bound_check(const HaarCoefficients& c, double zeta, double p);

// Sentinel for bound formulas that leave the integer range (beyond 2^62).
constexpr std::int64_t kBoundOverflow = std::numeric_limits<std::int64_t>::max();

// 1 + floor(ln(2m(1+zeta)^m/zeta) / ln(1/gamma)).
std::int64_t n0_bound(int m, double gamma, double zeta);

// (2^m - 1) * n0.
std::int64_t total_bound(int m, std::int64_t n0);

struct PropertyPReport {
  int i0 = 0;
  double t0 = 0.0;
  double tailSum = 0.0;
  double ratio = 0.0;
  double zetaUsed = 0.0;
  bool violation = false;  // ratio > zetaUsed (when a finite zeta was given)
  bool anomaly = false;    // zero tail but t0 off zero; cannot happen for a
                           // strictly monotone basis
};

// t0 = value at slot i0 minimizing the norm with every other coefficient
// frozen (so t0 = a_{i0} - lambda* of the line search along that element).
// ratio = |t0| / sum of |a| strictly after i0.
PropertyPReport property_p_minimizer(const HaarCoefficients& a, int i0, double p,
                                     double zeta = std::numeric_limits<double>::infinity());

// max(4, 2^{(p-3)/2} sqrt(p(p-1))); only valid for p > 2.
double zeta_formula(double p);

struct ZetaSweep {
  double zetaHat = 0.0;
  long cases = 0;
  long violations = 0;  // against zetaCheck + tol, when zetaCheck is finite
};

// Worst Property-P ratio over seeded Gaussian coefficient vectors on the
// initial segment 0..m and every slot i0 < m.
ZetaSweep estimate_zeta_sweep(int m, double p, int sampleCount, std::uint64_t seed,
                              double zetaCheck = std::numeric_limits<double>::infinity(),
                              double tol = 0.0);
double estimate_zeta(int m, double p, int sampleCount, std::uint64_t seed);

// ||1 + t*||y||_p*h_1 + y||_p >= ||1 + y||_p, evaluated on the exact grid.
// y must live on indices >= 2. slack loosens the comparison by
// slack * max(1, rhs) to absorb float evaluation noise.
bool prop42_check(const HaarCoefficients& yTail, double t, double p, double slack = 0.0);

struct LexViolation {
  int stepNumber = 0;
  std::string detail;
};

struct LexLemmaReport {
  long checkedSteps = 0;
  long skippedSteps = 0;  // guard band hits
  long exemptSteps = 0;   // last-position selections, no claim there
  std::vector<LexViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Replays a trace and checks, with the given zeta, that selecting a block
// endpoint other than the top one strictly raises the partition in lex
// order and that any other interior selection leaves it unchanged.
// Partitions whose construction hit a threshold comparison within 1e-9
// relative of equality are skipped and counted, never judged.
LexLemmaReport verify_lex_lemma(const GreedyTrace& trace, double zeta);

struct N0LemmaReport {
  long windowsChecked = 0;
  long windowsTruncated = 0;  // run ended before the window closed
  long violations = 0;
  std::int64_t n0Used = 0;
  bool ok() const { return violations == 0; }
};

// From every recorded residual, some endpoint of its partition must be
// selected within n0_bound(M, gammaHat, zeta) subsequent steps, M being the
// dictionary size. Windows cut short by termination are counted as
// truncated, not judged (a terminated run stopped selecting).
N0LemmaReport verify_n0_lemma(const GreedyTrace& trace, double zeta, double gammaHat);

}  // namespace haargreedy

#include "haargreedy/partition.hpp"

#include <algorithm>
#include <cmath>

#include "haargreedy/rng.hpp"

namespace haargreedy {

std::vector<int> IntervalPartition::blockLengths() const {
  std::vector<int> out;
  out.reserve(intervals.size());
  for (auto [lo, hi] : intervals) out.push_back(hi - lo + 1);
  return out;
}

std::vector<int> IntervalPartition::endpoints() const {
  std::vector<int> out;
  out.reserve(intervals.size());
  for (auto [lo, hi] : intervals) out.push_back(hi);
  return out;
}

bool IntervalPartition::valid() const {
  if (intervals.empty()) return m == 0;
  if (intervals.front().second != m) return false;
  if (intervals.back().first != 1) return false;
  for (std::size_t j = 0; j < intervals.size(); ++j) {
    if (intervals[j].first > intervals[j].second) return false;
    if (j + 1 < intervals.size() && intervals[j + 1].second != intervals[j].first - 1)
      return false;
  }
  return true;
}

namespace {

IntervalPartition build_partition(const std::vector<double>& a, double zeta, double* minRelGap) {
  if (a.empty()) throw std::invalid_argument("partition of an empty position range");
  if (!(zeta > 0.0)) throw std::invalid_argument("zeta must be positive");
  const int m = static_cast<int>(a.size());
  IntervalPartition P;
  P.m = m;
  double gapMin = 1.0;

  int curLo = m, curHi = m;
  double endpointSum = std::abs(a[m - 1]);
  const double growth = 1.0 + zeta;
  double factor = 1.0;  // (1+zeta)^{m-i}
  for (int i = m - 1; i >= 1; --i) {
    factor *= growth;
    const double mag = std::abs(a[i - 1]);
    const double thr = factor * endpointSum;
    if (minRelGap != nullptr) {
      const double ref = std::max(mag, thr);
      gapMin = std::min(gapMin, ref == 0.0 ? 1.0 : std::abs(mag - thr) / ref);
    }
    if (mag <= thr) {
      curLo = i;
    } else {
      P.intervals.emplace_back(curLo, curHi);
      curLo = curHi = i;
      endpointSum += mag;
    }
  }
  P.intervals.emplace_back(curLo, curHi);
  if (minRelGap != nullptr) *minRelGap = gapMin;
  return P;
}

}  // namespace

IntervalPartition interval_partition(const std::vector<double>& a, double zeta) {
  return build_partition(a, zeta, nullptr);
}

IntervalPartition interval_partition_checked(const std::vector<double>& a, double zeta,
                                             double* minRelGap) {
  return build_partition(a, zeta, minRelGap);
}

LexOrder lex_compare(const IntervalPartition& P1, const IntervalPartition& P2) {
  if (P1.m != P2.m) throw std::invalid_argument("lex_compare over different position ranges");
  const std::vector<int> c1 = P1.blockLengths();
  const std::vector<int> c2 = P2.blockLengths();
  const std::size_t k = std::min(c1.size(), c2.size());
  for (std::size_t u = 0; u < k; ++u) {
    if (c1[u] != c2[u]) return c1[u] < c2[u] ? LexOrder::Less : LexOrder::Greater;
  }
  // Equal prefixes over the same total force equal partitions.
  return LexOrder::Equal;
}

std::pair<double, double> norm_upper_bound_check(const HaarCoefficients& c, double zeta,
                                                double p) {
  c.validate();
  const IntervalPartition P = interval_partition(c.coeffs, zeta);
  double maxEndpoint = 0.0;
  for (int pos : P.endpoints()) maxEndpoint = std::max(maxEndpoint, std::abs(c.coeffs[pos - 1]));
  const int m = static_cast<int>(c.size());
  const double bound = m * std::pow(1.0 + zeta, m) / zeta * maxEndpoint;
  return {lp_norm(synthesize(c, p), p), bound};
}

std::int64_t n0_bound(int m, double gamma, double zeta) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(zeta > 0.0)) throw std::invalid_argument("zeta must be positive");
  const double num = std::log(2.0 * m) + m * std::log1p(zeta) - std::log(zeta);
  const double val = num / -std::log(gamma);
  if (!(val < 4.6e18)) return kBoundOverflow;  // 2^62
  return 1 + static_cast<std::int64_t>(std::floor(val));
}

std::int64_t total_bound(int m, std::int64_t n0) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (n0 < 1) throw std::invalid_argument("n0 must be >= 1");
  if (n0 == kBoundOverflow || m >= 63) return kBoundOverflow;
  const std::int64_t blocks = (std::int64_t{1} << m) - 1;
  if (n0 > (std::int64_t{1} << 62) / blocks) return kBoundOverflow;
  return blocks * n0;
}

PropertyPReport property_p_minimizer(const HaarCoefficients& a, int i0, double p, double zeta) {
  a.validate();
  const int M = static_cast<int>(a.size());
  if (i0 < 0 || i0 >= M - 1)
    throw std::invalid_argument("i0 must lie strictly before the last position");
  const HaarDictionary dict = HaarDictionary::from_indices(a.indexSet, p);
  const LineSearchResult ls = line_minimize(materialize(a, dict), dict.elems[i0], p);

  PropertyPReport rep;
  rep.i0 = i0;
  rep.t0 = a.coeffs[i0] - ls.lambdaStar;
  CompensatedSum tail;
  for (int j = i0 + 1; j < M; ++j) tail.add(std::abs(a.coeffs[j]));
  rep.tailSum = tail.value();
  rep.zetaUsed = zeta;
  if (rep.tailSum > 0.0) {
    rep.ratio = std::abs(rep.t0) / rep.tailSum;
  } else {
    rep.ratio = 0.0;
    rep.anomaly = std::abs(rep.t0) > 1e-10 * std::max(1.0, a.max_abs());
  }
  rep.violation = std::isfinite(zeta) && rep.ratio > zeta;
  return rep;
}

double zeta_formula(double p) {
  if (!(p > 2.0)) throw std::invalid_argument("zeta_formula requires p > 2");
  return std::max(4.0, std::exp2((p - 3.0) / 2.0) * std::sqrt(p * (p - 1.0)));
}

ZetaSweep estimate_zeta_sweep(int m, double p, int sampleCount, std::uint64_t seed,
                              double zetaCheck, double tol) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (sampleCount < 1) throw std::invalid_argument("sampleCount must be >= 1");
  require_valid_p(p);
  const HaarDictionary dict = HaarDictionary::initial_segment(m, p);
  HaarCoefficients c = HaarCoefficients::initial_segment(m);
  ZetaSweep sweep;
  for (int s = 0; s < sampleCount; ++s) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(s), 0x7a657461ULL));
    for (double& a : c.coeffs) a = rng.next_gaussian();
    const DyadicFunction f = materialize(c, dict);
    for (int i0 = 0; i0 < m; ++i0) {
      const LineSearchResult ls = line_minimize(f, dict.elems[i0], p);
      const double t0 = c.coeffs[i0] - ls.lambdaStar;
      CompensatedSum tail;
      for (int j = i0 + 1; j <= m; ++j) tail.add(std::abs(c.coeffs[j]));
      if (tail.value() == 0.0) continue;  // Gaussian coefficients: unreachable
      const double ratio = std::abs(t0) / tail.value();
      sweep.zetaHat = std::max(sweep.zetaHat, ratio);
      ++sweep.cases;
      if (std::isfinite(zetaCheck) && ratio > zetaCheck + tol) ++sweep.violations;
    }
  }
  return sweep;
}

double estimate_zeta(int m, double p, int sampleCount, std::uint64_t seed) {
  return estimate_zeta_sweep(m, p, sampleCount, seed).zetaHat;
}

bool prop42_check(const HaarCoefficients& yTail, double t, double p, double slack) {
  yTail.validate();
  for (int i : yTail.indexSet)
    if (i < 2) throw std::invalid_argument("prop42_check needs indices >= 2");
  const double normY = lp_norm(synthesize(yTail, p), p);

  std::vector<int> idx{0, 1};
  idx.insert(idx.end(), yTail.indexSet.begin(), yTail.indexSet.end());
  std::vector<double> lhsC{1.0, t * normY};
  lhsC.insert(lhsC.end(), yTail.coeffs.begin(), yTail.coeffs.end());
  std::vector<double> rhsC = lhsC;
  rhsC[1] = 0.0;

  const HaarCoefficients lhs = HaarCoefficients::from(idx, std::move(lhsC));
  const HaarCoefficients rhs = HaarCoefficients::from(std::move(idx), std::move(rhsC));
  const double lhsNorm = lp_norm(synthesize(lhs, p), p);
  const double rhsNorm = lp_norm(synthesize(rhs, p), p);
  return lhsNorm >= rhsNorm - slack * std::max(1.0, rhsNorm);
}

namespace {
constexpr double kGuardBand = 1e-9;
}

LexLemmaReport verify_lex_lemma(const GreedyTrace& trace, double zeta) {
  LexLemmaReport rep;
  const std::vector<std::vector<double>> states = replay_coefficients(trace);
  const int M = static_cast<int>(trace.initialCoefficients.size());
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const GreedyStepRecord& rec = trace.steps[k];
    const int position = rec.selectedIndex + 1;
    if (position == M) {
      ++rep.exemptSteps;
      continue;
    }
    double gapBefore = 1.0, gapAfter = 1.0;
    const IntervalPartition Pb = interval_partition_checked(states[k], zeta, &gapBefore);
    const IntervalPartition Pa = interval_partition_checked(states[k + 1], zeta, &gapAfter);
    if (std::min(gapBefore, gapAfter) < kGuardBand) {
      ++rep.skippedSteps;
      continue;
    }
    const std::vector<int> ends = Pb.endpoints();
    const bool lowerEndpoint =
        std::find(ends.begin() + 1, ends.end(), position) != ends.end();  // skip max I_1
    const LexOrder ord = lex_compare(Pb, Pa);
    ++rep.checkedSteps;
    if (lowerEndpoint) {
      if (ord != LexOrder::Less)
        rep.violations.push_back(
            {rec.stepNumber, "endpoint selection did not raise the partition"});
    } else {
      if (ord != LexOrder::Equal)
        rep.violations.push_back(
            {rec.stepNumber, "interior selection changed the partition"});
    }
  }
  return rep;
}

N0LemmaReport verify_n0_lemma(const GreedyTrace& trace, double zeta, double gammaHat) {
  N0LemmaReport rep;
  const int M = static_cast<int>(trace.initialCoefficients.size());
  rep.n0Used = n0_bound(M, gammaHat, zeta);
  const std::vector<std::vector<double>> states = replay_coefficients(trace);
  const long T = static_cast<long>(trace.steps.size());
  for (long s = 0; s < T; ++s) {
    const std::vector<int> ends = interval_partition(states[s], zeta).endpoints();
    const long windowEnd =
        rep.n0Used == kBoundOverflow ? T : std::min<long>(T, s + rep.n0Used);
    bool found = false;
    for (long k = s; k < windowEnd && !found; ++k) {
      const int position = trace.steps[k].selectedIndex + 1;
      found = std::find(ends.begin(), ends.end(), position) != ends.end();
    }
    if (found) {
      ++rep.windowsChecked;
    } else if (rep.n0Used != kBoundOverflow && s + rep.n0Used <= T) {
      ++rep.windowsChecked;
      ++rep.violations;
    } else {
      ++rep.windowsTruncated;
    }
  }
  return rep;
}

}  // namespace haargreedy

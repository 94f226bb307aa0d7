#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "haargreedy/numerics.hpp"

namespace haargreedy {

// Thrown when an iterative routine fails to meet its tolerance contract
// (bracket expansion, convergence, conditioning checks). Contract misuse
// (bad arguments) throws std::invalid_argument instead.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Level/offset of linear index i = 2^n + k, 0 <= k < 2^n. Index 0 is the
// constant function and has no (n, k); callers must special-case it.
struct HaarIndex {
  int i;
  int n;
  int k;
};

HaarIndex haar_index_decompose(int i);

// ||h_i||_p. The unnormalized h_i is +-1 on the two halves of its support
// [k/2^n, (k+1)/2^n), so the norm is 2^{-n/p}; h_0 and h_1 have norm 1.
double haar_norm(int i, double p);

// Piecewise-constant function on the 2^level equal cells of [0,1).
// values[c] is the value on [c*2^-level, (c+1)*2^-level). All finite Haar
// spans are exactly representable once level exceeds every element's level,
// which keeps every norm and integral an exact finite sum.
struct DyadicFunction {
  int level = 0;
  std::vector<double> values;

  DyadicFunction() : values(1, 0.0) {}
  DyadicFunction(int L, std::vector<double> v);
  static DyadicFunction zero(int L);

  std::size_t cells() const { return values.size(); }
  double integral() const;
  // Same function on a finer grid; exact (value repetition).
  DyadicFunction refined(int newLevel) const;
};

// Unnormalized h_i sampled at resolution L. Needs L >= n+1 so the sign
// change falls on a cell boundary.
DyadicFunction haar_as_dyadic(int i, int L);

// Coefficients over the NORMALIZED basis h_i^{(p)} = h_i / ||h_i||_p.
// indexSet is strictly increasing; an initial segment 0..m is the common
// case but any finite index set works (the greedy engine runs on whatever
// dictionary the index set spans).
struct HaarCoefficients {
  std::vector<int> indexSet;
  std::vector<double> coeffs;

  static HaarCoefficients initial_segment(int m);
  static HaarCoefficients from(std::vector<int> idx, std::vector<double> c);

  std::size_t size() const { return coeffs.size(); }
  void validate() const;
  bool all_zero() const;
  double max_abs() const;
};

// Smallest grid level that resolves every index in the set.
int natural_level(const std::vector<int>& indexSet);

DyadicFunction synthesize(const HaarCoefficients& c, double p, int L);
DyadicFunction synthesize(const HaarCoefficients& c, double p);

// Biorthogonal coefficients a_i = 2^{n/q} * integral(f * h_i), q = p/(p-1).
// Exact inverse of synthesize on the span; anything orthogonal to the span
// (none, when f came from these indices) is ignored.
HaarCoefficients analyze(const DyadicFunction& f, const std::vector<int>& indexSet, double p);

double lp_norm(const DyadicFunction& f, double p);

// Norms of (a_0..a_{i0-1}, 0, ..) and of the full vector, in that order.
// Strict monotonicity of the basis means first <= second with equality only
// when the dropped tail is identically zero; tests assert that, this just
// evaluates both sides.
std::pair<double, double> truncation_norm_check(const HaarCoefficients& c, int i0, double p);

// Normalized Haar elements of one index set materialized on a shared grid,
// so per-step selection loops touch precomputed cell values only.
struct HaarDictionary {
  double p = 2.0;
  int level = 0;
  std::vector<int> indexSet;
  std::vector<DyadicFunction> elems;  // elems[j] = h_{indexSet[j]}^{(p)}

  static HaarDictionary from_indices(std::vector<int> idx, double p);
  static HaarDictionary initial_segment(int m, double p);
  int size() const { return static_cast<int>(indexSet.size()); }
};

// Residual as a grid function: sum of coeffs[j] * dict.elems[j].
DyadicFunction materialize(const HaarCoefficients& c, const HaarDictionary& dict);

void require_valid_p(double p);

}  // namespace haargreedy

#include "haargreedy/haar.hpp"

#include <algorithm>
#include <cmath>

namespace haargreedy {

namespace {
constexpr int kMaxLevel = 22;  // 4M cells; far beyond anything the bounds need

void require_level(int L) {
  if (L < 0 || L > kMaxLevel)
    throw std::invalid_argument("grid level out of range: " + std::to_string(L));
}
}  // namespace

void require_valid_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("exponent p must lie in (1, inf)");
}

HaarIndex haar_index_decompose(int i) {
  if (i < 1) throw std::invalid_argument("index 0 is the constant function; no (n, k)");
  int n = 0;
  while ((2 << n) <= i) ++n;  // 2^n <= i < 2^{n+1}
  return HaarIndex{i, n, i - (1 << n)};
}

double haar_norm(int i, double p) {
  require_valid_p(p);
  if (i < 0) throw std::invalid_argument("negative Haar index");
  if (i == 0) return 1.0;
  const HaarIndex d = haar_index_decompose(i);
  return std::exp2(-d.n / p);
}

DyadicFunction::DyadicFunction(int L, std::vector<double> v) : level(L), values(std::move(v)) {
  require_level(L);
  if (values.size() != (std::size_t{1} << L))
    throw std::invalid_argument("value count does not match level");
}

DyadicFunction DyadicFunction::zero(int L) {
  require_level(L);
  return DyadicFunction(L, std::vector<double>(std::size_t{1} << L, 0.0));
}

double DyadicFunction::integral() const {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return std::ldexp(s.value(), -level);
}

DyadicFunction DyadicFunction::refined(int newLevel) const {
  if (newLevel < level) throw std::invalid_argument("refinement must not coarsen");
  require_level(newLevel);
  if (newLevel == level) return *this;
  const std::size_t rep = std::size_t{1} << (newLevel - level);
  std::vector<double> out;
  out.reserve(values.size() * rep);
  for (double v : values) out.insert(out.end(), rep, v);
  return DyadicFunction(newLevel, std::move(out));
}

DyadicFunction haar_as_dyadic(int i, int L) {
  require_level(L);
  if (i < 0) throw std::invalid_argument("negative Haar index");
  if (i == 0) return DyadicFunction(L, std::vector<double>(std::size_t{1} << L, 1.0));
  const HaarIndex d = haar_index_decompose(i);
  if (L < d.n + 1)
    throw std::invalid_argument("level " + std::to_string(L) + " cannot resolve index " +
                                std::to_string(i));
  DyadicFunction f = DyadicFunction::zero(L);
  const std::size_t span = std::size_t{1} << (L - d.n);  // cells in the support
  const std::size_t lo = d.k * span;
  for (std::size_t c = 0; c < span / 2; ++c) f.values[lo + c] = 1.0;
  for (std::size_t c = span / 2; c < span; ++c) f.values[lo + c] = -1.0;
  return f;
}

HaarCoefficients HaarCoefficients::initial_segment(int m) {
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  HaarCoefficients c;
  c.indexSet.resize(m + 1);
  for (int i = 0; i <= m; ++i) c.indexSet[i] = i;
  c.coeffs.assign(m + 1, 0.0);
  return c;
}

HaarCoefficients HaarCoefficients::from(std::vector<int> idx, std::vector<double> c) {
  HaarCoefficients out;
  out.indexSet = std::move(idx);
  out.coeffs = std::move(c);
  out.validate();
  return out;
}

void HaarCoefficients::validate() const {
  if (indexSet.size() != coeffs.size())
    throw std::invalid_argument("indexSet/coeffs size mismatch");
  if (indexSet.empty()) throw std::invalid_argument("empty index set");
  for (std::size_t j = 0; j < indexSet.size(); ++j) {
    if (indexSet[j] < 0) throw std::invalid_argument("negative Haar index");
    if (j > 0 && indexSet[j] <= indexSet[j - 1])
      throw std::invalid_argument("indexSet must be strictly increasing");
  }
}

bool HaarCoefficients::all_zero() const {
  for (double a : coeffs)
    if (a != 0.0) return false;
  return true;
}

double HaarCoefficients::max_abs() const {
  double s = 0.0;
  for (double a : coeffs) s = std::max(s, std::abs(a));
  return s;
}

int natural_level(const std::vector<int>& indexSet) {
  int L = 0;
  for (int i : indexSet) {
    if (i >= 1) L = std::max(L, haar_index_decompose(i).n + 1);
  }
  return L;
}

DyadicFunction synthesize(const HaarCoefficients& c, double p, int L) {
  require_valid_p(p);
  c.validate();
  if (L < natural_level(c.indexSet))
    throw std::invalid_argument("level too coarse for this index set");
  DyadicFunction f = DyadicFunction::zero(L);
  for (std::size_t j = 0; j < c.indexSet.size(); ++j) {
    const double a = c.coeffs[j];
    if (a == 0.0) continue;
    const int i = c.indexSet[j];
    if (i == 0) {
      for (double& v : f.values) v += a;
      continue;
    }
    const HaarIndex d = haar_index_decompose(i);
    const double amp = a * std::exp2(d.n / p);  // a * h_i / 2^{-n/p} on the support
    const std::size_t span = std::size_t{1} << (L - d.n);
    const std::size_t lo = d.k * span;
    for (std::size_t cell = 0; cell < span / 2; ++cell) f.values[lo + cell] += amp;
    for (std::size_t cell = span / 2; cell < span; ++cell) f.values[lo + cell] -= amp;
  }
  return f;
}

DyadicFunction synthesize(const HaarCoefficients& c, double p) {
  return synthesize(c, p, natural_level(c.indexSet));
}

HaarCoefficients analyze(const DyadicFunction& f, const std::vector<int>& indexSet, double p) {
  require_valid_p(p);
  const double q = p / (p - 1.0);
  HaarCoefficients out;
  out.indexSet = indexSet;
  out.coeffs.resize(indexSet.size());
  const int L = std::max(f.level, natural_level(indexSet));
  const DyadicFunction g = f.refined(L);
  for (std::size_t j = 0; j < indexSet.size(); ++j) {
    const int i = indexSet[j];
    CompensatedSum s;
    if (i == 0) {
      for (double v : g.values) s.add(v);
      out.coeffs[j] = std::ldexp(s.value(), -L);
      continue;
    }
    const HaarIndex d = haar_index_decompose(i);
    const std::size_t span = std::size_t{1} << (L - d.n);
    const std::size_t lo = d.k * span;
    for (std::size_t cell = 0; cell < span / 2; ++cell) s.add(g.values[lo + cell]);
    for (std::size_t cell = span / 2; cell < span; ++cell) s.add(-g.values[lo + cell]);
    // integral(f * h_i) * 2^{n/q}
    out.coeffs[j] = std::ldexp(s.value(), -L) * std::exp2(d.n / q);
  }
  out.validate();
  return out;
}

double lp_norm(const DyadicFunction& f, double p) {
  require_valid_p(p);
  CompensatedSum s;
  for (double v : f.values) s.add(pow_abs(v, p));
  const double total = std::ldexp(s.value(), -f.level);
  return std::pow(total, 1.0 / p);
}

std::pair<double, double> truncation_norm_check(const HaarCoefficients& c, int i0, double p) {
  c.validate();
  const int M = static_cast<int>(c.size());
  if (i0 < 1 || i0 >= M) throw std::invalid_argument("cut position must satisfy 1 <= i0 < size");
  HaarCoefficients head = c;
  std::fill(head.coeffs.begin() + i0, head.coeffs.end(), 0.0);
  const int L = natural_level(c.indexSet);
  return {lp_norm(synthesize(head, p, L), p), lp_norm(synthesize(c, p, L), p)};
}

HaarDictionary HaarDictionary::from_indices(std::vector<int> idx, double p) {
  require_valid_p(p);
  HaarDictionary d;
  d.p = p;
  d.indexSet = std::move(idx);
  HaarCoefficients probe;  // just for validation of the index set
  probe.indexSet = d.indexSet;
  probe.coeffs.assign(d.indexSet.size(), 0.0);
  probe.validate();
  d.level = natural_level(d.indexSet);
  d.elems.reserve(d.indexSet.size());
  for (int i : d.indexSet) {
    DyadicFunction e = haar_as_dyadic(i, d.level);
    const double inv = 1.0 / haar_norm(i, p);  // 2^{n/p}, exact power of two
    for (double& v : e.values) v *= inv;
    d.elems.push_back(std::move(e));
  }
  return d;
}

HaarDictionary HaarDictionary::initial_segment(int m, double p) {
  std::vector<int> idx(m + 1);
  for (int i = 0; i <= m; ++i) idx[i] = i;
  return from_indices(std::move(idx), p);
}

DyadicFunction materialize(const HaarCoefficients& c, const HaarDictionary& dict) {
  if (c.indexSet != dict.indexSet)
    throw std::invalid_argument("coefficients and dictionary use different index sets");
  DyadicFunction f = DyadicFunction::zero(dict.level);
  for (std::size_t j = 0; j < c.coeffs.size(); ++j) {
    const double a = c.coeffs[j];
    if (a == 0.0) continue;
    const auto& e = dict.elems[j].values;
    for (std::size_t cell = 0; cell < e.size(); ++cell) {
      if (e[cell] != 0.0) f.values[cell] += a * e[cell];
    }
  }
  return f;
}

}  // namespace haargreedy

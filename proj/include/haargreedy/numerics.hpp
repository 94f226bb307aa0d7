#pragma once

#include <cmath>
#include <cstdint>

namespace haargreedy {

// Neumaier-compensated running sum. Cell counts are small (<= 2^16) but the
// 1e-12 tolerances on norms and dual pairings assume summation error near
// one ulp of the result, not n ulps.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// |x|^e with cheap paths for the half-integer exponents that dominate the
// p grid {1.5, 2, 2.5, 3, 4} and its conjugates.
inline double pow_abs(double x, double e) {
  const double a = std::abs(x);
  if (e == 2.0) return a * a;
  if (e == 1.0) return a;
  if (e == 3.0) return a * a * a;
  if (e == 4.0) return (a * a) * (a * a);
  if (e == 1.5) return a * std::sqrt(a);
  if (e == 0.5) return std::sqrt(a);
  if (e == 2.5) return a * a * std::sqrt(a);
  return std::pow(a, e);
}

// sign(x)|x|^e in long double; used by the line-search derivative where the
// sum cancels near the root and the noise floor sets the attainable accuracy.
inline long double signed_pow_abs(long double x, double e) {
  const long double a = x < 0.0L ? -x : x;
  if (e == 1.0) return x;
  if (e == 2.0) return x * a;
  if (e == 3.0) return x * a * a;
  if (e == 0.5) return x < 0.0L ? -sqrtl(a) : sqrtl(a);
  if (e == 1.5) return x * sqrtl(a);
  if (e == 2.5) return x * a * sqrtl(a);
  long double m = powl(a, static_cast<long double>(e));
  return x < 0.0L ? -m : m;
}

inline double pow2(int e) { return std::ldexp(1.0, e); }

}  // namespace haargreedy

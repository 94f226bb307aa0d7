#include "haargreedy/lp_geometry.hpp"

#include <algorithm>
#include <cmath>

#include "haargreedy/rng.hpp"

namespace haargreedy {

NormingFunctional norming_functional(const DyadicFunction& y, double p) {
  require_valid_p(p);
  const double norm = lp_norm(y, p);
  double scale = 0.0;
  for (double v : y.values) scale = std::max(scale, std::abs(v));
  if (norm == 0.0 || norm < 1e-14 * scale || norm < 1e-60)
    throw std::invalid_argument("norming functional of (numerically) zero function");
  NormingFunctional F;
  F.subjectNorm = norm;
  F.density = DyadicFunction::zero(y.level);
  const double inv = 1.0 / pow_abs(norm, p - 1.0);
  for (std::size_t c = 0; c < y.values.size(); ++c) {
    const double v = y.values[c];
    if (v == 0.0) continue;
    const double mag = pow_abs(v, p - 1.0) * inv;
    F.density.values[c] = v < 0.0 ? -mag : mag;
  }
  return F;
}

double pairing(const DyadicFunction& g, const DyadicFunction& u) {
  const int L = std::max(g.level, u.level);
  const DyadicFunction a = g.refined(L);
  const DyadicFunction b = u.refined(L);
  CompensatedSum s;
  for (std::size_t c = 0; c < a.values.size(); ++c) s.add(a.values[c] * b.values[c]);
  return std::ldexp(s.value(), -L);
}

namespace {

// d and d' in one pass, long double throughout: the sum cancels near the
// root, and its noise floor is what limits the step accuracy downstream
// (the engine asserts the selected-last coefficient lands on zero).
struct DerivEval {
  double d;
  double dprime;  // always <= 0
};

DerivEval eval_derivative(const DyadicFunction& y, const DyadicFunction& phi, double lambda,
                          double p, bool wantPrime) {
  long double sum = 0.0L;
  long double sumP = 0.0L;
  const long double lam = lambda;
  const double e1 = p - 1.0;
  const double e2 = p - 2.0;
  for (std::size_t c = 0; c < y.values.size(); ++c) {
    const long double ph = phi.values[c];
    if (ph == 0.0L) continue;
    const long double r = static_cast<long double>(y.values[c]) - lam * ph;
    sum += signed_pow_abs(r, e1) * ph;
    if (wantPrime && r != 0.0L) {
      // |r|^{p-2} is singular at r = 0 for p < 2; those cells contribute
      // nothing to d and are skipped here (bisection covers the slack).
      const long double ar = r < 0.0L ? -r : r;
      sumP += powl(ar, static_cast<long double>(e2)) * ph * ph;
    }
  }
  DerivEval out;
  out.d = static_cast<double>(std::ldexp(static_cast<double>(sum), -y.level));
  out.dprime = wantPrime
                   ? -e1 * static_cast<double>(std::ldexp(static_cast<double>(sumP), -y.level))
                   : 0.0;
  return out;
}

}  // namespace

LineSearchResult line_minimize(const DyadicFunction& y, const DyadicFunction& phi, double p) {
  require_valid_p(p);
  if (y.level != phi.level)
    throw std::invalid_argument("line_minimize expects a common grid level");
  for (double v : y.values)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite input");
  const double normPhi = lp_norm(phi, p);
  if (normPhi == 0.0) throw std::invalid_argument("line_minimize against the zero direction");
  const double normY = lp_norm(y, p);

  LineSearchResult res;
  if (normY == 0.0) {
    res.residualNorm = 0.0;
    return res;
  }

  if (p == 2.0) {
    const double lam = pairing(y, phi) / (normPhi * normPhi);
    res.lambdaStar = lam;
    DyadicFunction r = y;
    for (std::size_t c = 0; c < r.values.size(); ++c) r.values[c] -= lam * phi.values[c];
    res.residualNorm = lp_norm(r, 2.0);
    res.derivativeResidual = eval_derivative(y, phi, lam, 2.0, false).d;
    return res;
  }

  const double dScale = pow_abs(normY, p - 1.0) * normPhi;
  const double dTol = 1e-13 * dScale;

  // |lambda*| <= 2 ||y|| / ||phi||: beyond that the residual norm already
  // exceeds ||y||. Expansion below is pure paranoia against rounding.
  double B = 2.0 * normY / normPhi;
  double lo = -B, hi = B;
  DerivEval dLo = eval_derivative(y, phi, lo, p, false);
  DerivEval dHi = eval_derivative(y, phi, hi, p, false);
  int iters = 2;
  for (int tries = 0; (dLo.d < 0.0 || dHi.d > 0.0) && tries < 60; ++tries) {
    B *= 2.0;
    lo = -B;
    hi = B;
    dLo = eval_derivative(y, phi, lo, p, false);
    dHi = eval_derivative(y, phi, hi, p, false);
    iters += 2;
  }
  if (dLo.d < 0.0 || dHi.d > 0.0)
    throw NumericalError("line search bracket expansion failed (non-convex data?)");

  const double wTol = 1e-13 * B;
  // For p > 2 the root degenerates to order p-1 when the residual is
  // proportional to phi on its support (always true at a run's final step),
  // and |d| <= dTol alone would then stop with lambda still ~(1e-13)^{1/(p-1)}
  // of the scale away from the root. |d/d'| estimates the actual distance for
  // roots of every order, so smallness of both is required; the bracket-width
  // stop remains the unconditional fallback (sharp roots at p < 2 reach it).
  const double rootTol = 1e-11 * B;
  double lambda = std::clamp(pairing(y, phi) / (normPhi * normPhi), lo, hi);
  double lastD = 0.0;
  double lastDp = 0.0;
  bool haveNewton = false;
  bool converged = false;
  for (int k = 0; k < 200; ++k) {
    if (hi - lo <= wTol) {
      lambda = 0.5 * (lo + hi);
      lastD = eval_derivative(y, phi, lambda, p, false).d;
      ++iters;
      converged = true;
      break;
    }
    // Odd iterations bisect unconditionally so the bracket keeps halving
    // even when Newton approaches a flat root one-sided.
    double cand;
    if (!haveNewton) {
      cand = lambda;  // evaluate the Hilbert warm start first
    } else if ((k & 1) == 0 && lastDp < 0.0) {
      cand = lambda - lastD / lastDp;
      if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    } else {
      cand = 0.5 * (lo + hi);
    }
    const DerivEval ev = eval_derivative(y, phi, cand, p, true);
    ++iters;
    lambda = cand;
    lastD = ev.d;
    lastDp = ev.dprime;
    haveNewton = true;
    if (std::abs(ev.d) <= dTol &&
        (ev.d == 0.0 || std::abs(ev.d) <= -ev.dprime * rootTol)) {
      converged = true;
      break;
    }
    if (ev.d > 0.0)
      lo = cand;
    else
      hi = cand;
  }
  if (!converged) throw NumericalError("line search did not converge in 200 iterations");

  res.lambdaStar = lambda;
  res.iterations = iters;
  res.derivativeResidual = lastD;
  DyadicFunction r = y;
  for (std::size_t c = 0; c < r.values.size(); ++c) r.values[c] -= lambda * phi.values[c];
  res.residualNorm = lp_norm(r, p);
  return res;
}

SmoothnessEstimate estimate_modulus(double p, double t, int sampleCount, std::uint64_t seed) {
  require_valid_p(p);
  if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("probe size t must lie in (0, 1]");
  if (sampleCount < 1) throw std::invalid_argument("sampleCount must be >= 1");
  constexpr int kMaxIndex = 63;  // level-6 grid, same span prop42 probes use
  std::vector<int> idx(kMaxIndex + 1);
  for (int i = 0; i <= kMaxIndex; ++i) idx[i] = i;
  const int L = natural_level(idx);

  SmoothnessEstimate est;
  est.t = t;
  est.sampleCount = sampleCount;
  for (int s = 0; s < sampleCount; ++s) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    HaarCoefficients cx;
    HaarCoefficients cy;
    cx.indexSet = idx;
    cy.indexSet = idx;
    cx.coeffs.resize(idx.size());
    cy.coeffs.resize(idx.size());
    for (double& a : cx.coeffs) a = rng.next_gaussian();
    for (double& a : cy.coeffs) a = rng.next_gaussian();
    DyadicFunction x = synthesize(cx, p, L);
    DyadicFunction yv = synthesize(cy, p, L);
    const double nx = lp_norm(x, p);
    const double ny = lp_norm(yv, p);
    if (nx == 0.0 || ny == 0.0) continue;
    for (double& v : x.values) v /= nx;
    for (double& v : yv.values) v *= t / ny;
    DyadicFunction plus = x;
    DyadicFunction minus = x;
    for (std::size_t c = 0; c < x.values.size(); ++c) {
      plus.values[c] += yv.values[c];
      minus.values[c] -= yv.values[c];
    }
    const double rho = 0.5 * (lp_norm(plus, p) + lp_norm(minus, p)) - 1.0;
    est.rhoHat = std::max(est.rhoHat, std::max(rho, 0.0));
  }
  return est;
}

double gamma_bound_exponent(double p, int m) {
  require_valid_p(p);
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  const double e = p <= 2.0 ? p / (2.0 - 2.0 * p) : (2.0 - 2.0 * p) / p;
  return std::pow(static_cast<double>(m), e);
}

}  // namespace haargreedy

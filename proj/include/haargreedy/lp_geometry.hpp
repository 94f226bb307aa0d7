#pragma once

#include <cstdint>

#include "haargreedy/haar.hpp"

namespace haargreedy {

// F_y as an integral kernel: F_y(u) = integral(density * u). For L_p the
// density is sign(y)|y|^{p-1} / ||y||^{p-1}; then F_y(y) = ||y|| and the
// dual norm ||density||_q is 1, q = p/(p-1).
struct NormingFunctional {
  DyadicFunction density;
  double subjectNorm = 0.0;
};

NormingFunctional norming_functional(const DyadicFunction& y, double p);

// integral(g * u) over [0,1), on the common refinement.
double pairing(const DyadicFunction& g, const DyadicFunction& u);

struct LineSearchResult {
  double lambdaStar = 0.0;
  double residualNorm = 0.0;
  double derivativeResidual = 0.0;  // d(lambdaStar), see below
  int iterations = 0;
};

// Unique minimizer of the strictly convex lambda -> ||y - lambda*phi||_p,
// located as the root of the strictly decreasing
//   d(lambda) = integral(sign(r)|r|^{p-2} r * phi),  r = y - lambda*phi.
// p = 2 short-circuits to <y,phi>/||phi||_2^2. Otherwise safeguarded Newton
// inside a sign-change bracket, with bisection interleaved so the bracket
// width contracts even when the root has vanishing derivative (which happens
// exactly when the residual vanishes on supp phi). Tolerances are relative
// to ||y||^{p-1}||phi|| and the bracket width, so tiny late-run residuals
// resolve as accurately as unit-scale ones.
LineSearchResult line_minimize(const DyadicFunction& y, const DyadicFunction& phi, double p);

struct SmoothnessEstimate {
  double t = 0.0;
  double rhoHat = 0.0;
  int sampleCount = 0;
};

// Empirical modulus of smoothness: max over sampled pairs ||x||=1, ||y||=t
// of (||x+y|| + ||x-y||)/2 - 1. A lower bound on the true sup; always in
// [0, t]. Samples live in the span of the first 64 Haar elements.
SmoothnessEstimate estimate_modulus(double p, double t, int sampleCount, std::uint64_t seed);

// Shape of the one-step norm-reduction bound: m^{p/(2-2p)} for p <= 2 and
// m^{(2-2p)/p} for p > 2 (both branches give m^{-1} at p = 2). The constant
// in front is not computable from anything we have; callers compare trends.
double gamma_bound_exponent(double p, int m);

}  // namespace haargreedy

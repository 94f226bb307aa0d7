#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "common/oracles.hpp"
#include "doctest.h"
#include "haargreedy/haar.hpp"
#include "haargreedy/lp_geometry.hpp"
#include "haargreedy/rng.hpp"

using namespace haargreedy;

namespace {

const std::vector<double> kPGrid{1.5, 2.0, 2.5, 3.0, 4.0};

HaarCoefficients random_segment(SplitMix64& rng, int m) {
  HaarCoefficients c = HaarCoefficients::initial_segment(m);
  for (double& a : c.coeffs) a = rng.next_gaussian();
  return c;
}

}  // namespace

TEST_CASE("norming functional: density formula, unit dual norm, exact pairing") {
  SplitMix64 rng(derive_seed(77, 1));
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_below(15));
    const double p = kPGrid[rng.next_below(kPGrid.size())];
    const double q = p / (p - 1.0);
    const HaarCoefficients c = random_segment(rng, m);
    const DyadicFunction f = synthesize(c, p);
    const double norm = lp_norm(f, p);
    const NormingFunctional F = norming_functional(f, p);

    CHECK(F.subjectNorm == norm);
    CHECK(pairing(F.density, f) == doctest::Approx(norm).epsilon(1e-12));
    CHECK(lp_norm(F.density, q) == doctest::Approx(1.0).epsilon(1e-12));

    // Cellwise literal formula in long double.
    const long double denom = powl(static_cast<long double>(norm), static_cast<long double>(p) - 1.0L);
    for (std::size_t cell = 0; cell < f.cells(); ++cell) {
      const long double v = f.values[cell];
      const long double want =
          v == 0.0L ? 0.0L : (v > 0.0L ? 1.0L : -1.0L) * powl(fabsl(v), static_cast<long double>(p) - 1.0L) / denom;
      CHECK(F.density.values[cell] == doctest::Approx(static_cast<double>(want)).epsilon(1e-12).scale(1.0));
    }
  }
  CHECK_THROWS_AS(norming_functional(DyadicFunction::zero(4), 3.0), std::invalid_argument);
}

TEST_CASE("pairing is the bilinear integral and respects the Hoelder bound") {
  SplitMix64 rng(derive_seed(77, 2));
  for (int trial = 0; trial < 200; ++trial) {
    const int Lg = static_cast<int>(rng.next_below(6));
    const int Lu = static_cast<int>(rng.next_below(6));
    std::vector<double> gv(std::size_t{1} << Lg), uv(std::size_t{1} << Lu), wv(std::size_t{1} << Lu);
    for (double& x : gv) x = rng.next_gaussian();
    for (double& x : uv) x = rng.next_gaussian();
    for (double& x : wv) x = rng.next_gaussian();
    const DyadicFunction g(Lg, gv), u(Lu, uv), w(Lu, wv);

    // Mixed levels refine to the common grid.
    CHECK(pairing(g, u) == doctest::Approx(pairing(g.refined(6), u.refined(6))).epsilon(1e-13));

    // Bilinearity in the second argument.
    const double alpha = rng.next_double(-2.0, 2.0), beta = rng.next_double(-2.0, 2.0);
    std::vector<double> combo(uv.size());
    for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = alpha * uv[i] + beta * wv[i];
    CHECK(pairing(g, DyadicFunction(Lu, combo)) ==
          doctest::Approx(alpha * pairing(g, u) + beta * pairing(g, w)).epsilon(1e-12).scale(1.0));

    // Hoelder: |<g, u>| <= ||g||_q ||u||_p.
    const double p = kPGrid[rng.next_below(kPGrid.size())];
    const double q = p / (p - 1.0);
    CHECK(std::abs(pairing(g, u)) <= lp_norm(g, q) * lp_norm(u, p) * (1.0 + 1e-12) + 1e-300);
  }
}

TEST_CASE("Hilbert line search is the explicit orthogonal projection") {
  SplitMix64 rng(derive_seed(77, 3));
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_below(15));
    const HaarCoefficients c = random_segment(rng, m);
    const HaarDictionary dict = HaarDictionary::initial_segment(m, 2.0);
    const DyadicFunction y = materialize(c, dict);
    const int slot = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m + 1)));
    const DyadicFunction& phi = dict.elems[slot];

    const LineSearchResult r = line_minimize(y, phi, 2.0);
    const double n2 = lp_norm(phi, 2.0);
    CHECK(r.lambdaStar == pairing(y, phi) / (n2 * n2));
    CHECK(r.iterations == 0);

    // The residual is orthogonal to the direction.
    DyadicFunction resid = y;
    for (std::size_t i = 0; i < resid.values.size(); ++i) resid.values[i] -= r.lambdaStar * phi.values[i];
    CHECK(std::abs(pairing(resid, phi)) <= 1e-12 * std::max(1.0, lp_norm(y, 2.0)));
    CHECK(r.residualNorm == doctest::Approx(lp_norm(resid, 2.0)).epsilon(1e-14));
  }
}

TEST_CASE("line search solves the first-order condition and is a true minimum") {
  SplitMix64 rng(derive_seed(77, 4));
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_below(20));
    const double p = kPGrid[rng.next_below(kPGrid.size())];
    const HaarCoefficients c = random_segment(rng, m);
    const HaarDictionary dict = HaarDictionary::initial_segment(m, p);
    const DyadicFunction y = materialize(c, dict);
    const int slot = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m + 1)));
    const DyadicFunction& phi = dict.elems[slot];

    const LineSearchResult r = line_minimize(y, phi, p);
    const double dScale = std::pow(lp_norm(y, p), p - 1.0) * lp_norm(phi, p);
    CHECK(std::abs(r.derivativeResidual) <= 1e-10 * std::max(1.0, dScale));
    CHECK(r.iterations <= 205);

    // Perturbation check: nothing nearby does better.
    oracle::LineProblem prob(y.values, phi.values, p);
    const double scale = 1.0 + std::abs(r.lambdaStar);
    for (double delta : {1e-5, 1e-3, 0.1}) {
      const double d = delta * scale;
      CHECK(r.residualNorm <=
            static_cast<double>(prob.norm_at(r.lambdaStar + d)) + 1e-11 * std::max(1.0, r.residualNorm));
      CHECK(r.residualNorm <=
            static_cast<double>(prob.norm_at(r.lambdaStar - d)) + 1e-11 * std::max(1.0, r.residualNorm));
    }
    CHECK(r.residualNorm ==
          doctest::Approx(static_cast<double>(prob.norm_at(r.lambdaStar))).epsilon(1e-12));
  }
}

TEST_CASE("line search matches the independent golden-section oracle") {
  SplitMix64 rng(derive_seed(77, 5));
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_below(20));
    const double p = kPGrid[rng.next_below(kPGrid.size())];
    const HaarCoefficients c = random_segment(rng, m);
    const HaarDictionary dict = HaarDictionary::initial_segment(m, p);
    const DyadicFunction y = materialize(c, dict);
    const int slot = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m + 1)));
    const DyadicFunction& phi = dict.elems[slot];

    const LineSearchResult r = line_minimize(y, phi, p);
    const long double ref = oracle::line_min_oracle(y.values, phi.values, p);
    CHECK(std::abs(r.lambdaStar - static_cast<double>(ref)) <=
          1e-9 * std::max(1.0, std::abs(static_cast<double>(ref))));
  }
}

TEST_CASE("a residual proportional to a deep element lands exactly on its coefficient") {
  // Degenerate (order p-1) root: the generic |d|-smallness stop would quit
  // early here; the root-distance safeguard must keep digging.
  for (double p : {1.5, 2.0, 2.5, 3.0, 4.0}) {
    for (int i : {1, 2, 5, 12, 40, 63}) {
      for (double coeff : {1.0, -0.37, 1e-6, 2.5e4}) {
        const int L = natural_level({i});
        const DyadicFunction phi = [&] {
          DyadicFunction h = haar_as_dyadic(i, L);
          const double inv = 1.0 / haar_norm(i, p);
          for (double& v : h.values) v *= inv;
          return h;
        }();
        DyadicFunction y = phi;
        for (double& v : y.values) v *= coeff;
        const LineSearchResult r = line_minimize(y, phi, p);
        CHECK(std::abs(r.lambdaStar - coeff) <= 1e-9 * std::abs(coeff));
        CHECK(r.residualNorm <= 1e-9 * std::abs(coeff));
      }
    }
  }
}

TEST_CASE("line search edge cases and preconditions") {
  const DyadicFunction zero2 = DyadicFunction::zero(2);
  const DyadicFunction ones(2, {1.0, 1.0, 1.0, 1.0});
  const DyadicFunction haar(2, {1.0, 1.0, -1.0, -1.0});

  // Zero subject: lambda* = 0 regardless of exponent.
  for (double p : kPGrid) {
    const LineSearchResult r = line_minimize(zero2, ones, p);
    CHECK(r.lambdaStar == 0.0);
    CHECK(r.residualNorm == 0.0);
  }

  // Orthogonal-by-symmetry data: minimizing along the two-halves element of a
  // constant subject keeps lambda* at zero.
  for (double p : kPGrid) {
    const LineSearchResult r = line_minimize(ones, haar, p);
    CHECK(std::abs(r.lambdaStar) <= 1e-11);
    CHECK(r.residualNorm == doctest::Approx(1.0).epsilon(1e-12));
  }

  CHECK_THROWS_AS(line_minimize(ones, DyadicFunction::zero(2), 3.0), std::invalid_argument);
  CHECK_THROWS_AS(line_minimize(ones, haar.refined(4), 3.0), std::invalid_argument);
  CHECK_THROWS_AS(
      line_minimize(DyadicFunction(0, {std::numeric_limits<double>::quiet_NaN()}), DyadicFunction(0, {1.0}), 3.0),
      std::invalid_argument);
}

TEST_CASE("smoothness estimates reproduce the Hilbert modulus and power shapes") {
  // p = 2: rho(t) = sqrt(1 + t^2) - 1 exactly; sampled pairs can only fall
  // short of the supremum, and in 64 dimensions they nearly attain it.
  for (double t : {0.25, 0.5, 1.0}) {
    const SmoothnessEstimate est = estimate_modulus(2.0, t, 300, 911);
    const double closed = std::sqrt(1.0 + t * t) - 1.0;
    CHECK(est.rhoHat <= closed + 1e-12);
    CHECK(est.rhoHat >= 0.8 * closed);
    CHECK(est.t == t);
    CHECK(est.sampleCount == 300);
  }

  // Power-type shape for smooth exponents: log-log slope of the estimator's
  // own outputs across t in {0.2, 0.1, 0.05} stays quadratic-like.
  for (double p : {2.0, 3.0, 4.0}) {
    const double r1 = estimate_modulus(p, 0.2, 200, 912).rhoHat;
    const double r2 = estimate_modulus(p, 0.05, 200, 913).rhoHat;
    const double slope = std::log(r1 / r2) / std::log(4.0);
    CHECK(slope >= 1.9);
    CHECK(slope <= 2.4);
  }

  // The estimate is always inside [0, t], and small probes give small values.
  for (double p : kPGrid) {
    for (double t : {0.5, 0.1, 1e-3}) {
      const double rho = estimate_modulus(p, t, 50, 916).rhoHat;
      CHECK(rho >= 0.0);
      CHECK(rho <= t);
    }
  }

  CHECK_THROWS_AS(estimate_modulus(3.0, 0.0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_modulus(3.0, 1.5, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_modulus(3.0, 0.5, 0, 1), std::invalid_argument);
}

TEST_CASE("decay-exponent shape: both branches, continuity at p = 2, pinned value") {
  CHECK(gamma_bound_exponent(4.0, 8) == doctest::Approx(std::pow(8.0, -1.5)).epsilon(1e-15));
  CHECK(gamma_bound_exponent(2.0, 5) == doctest::Approx(1.0 / 5.0).epsilon(1e-15));
  CHECK(gamma_bound_exponent(1.999999, 7) ==
        doctest::Approx(gamma_bound_exponent(2.000001, 7)).epsilon(1e-4));
  for (double p : kPGrid) {
    // Larger dictionaries can only weaken the guaranteed per-step decay.
    for (int m = 1; m < 30; ++m) {
      CHECK(gamma_bound_exponent(p, m) > gamma_bound_exponent(p, m + 1));
    }
    CHECK(gamma_bound_exponent(p, 1) == 1.0);
  }
  CHECK_THROWS_AS(gamma_bound_exponent(3.0, 0), std::invalid_argument);
}

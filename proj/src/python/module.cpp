#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "haargreedy/experiments.hpp"
#include "haargreedy/greedy.hpp"
#include "haargreedy/haar.hpp"
#include "haargreedy/lp_geometry.hpp"
#include "haargreedy/partition.hpp"

namespace py = pybind11;
namespace hg = haargreedy;

namespace {

hg::DyadicFunction make_dyadic(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("cell count must be a power of two");
  }
  int level = 0;
  while ((std::size_t{1} << level) < n) ++level;
  return hg::DyadicFunction(level, values);
}

hg::HaarCoefficients segment_coefficients(const std::vector<double>& c) {
  if (c.empty()) throw std::invalid_argument("coefficient list must be nonempty");
  std::vector<int> idx(c.size());
  std::iota(idx.begin(), idx.end(), 0);
  return hg::HaarCoefficients::from(std::move(idx), c);
}

hg::AlgorithmKind kind_from(const std::string& name) {
  auto k = hg::parse_kind(name);
  if (!k) throw std::invalid_argument("unknown algorithm kind: " + name);
  return *k;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Greedy approximation in finite-dimensional Lp over the Haar system";

  mod.def(
      "haar_index_decompose",
      [](int i) {
        hg::HaarIndex h = hg::haar_index_decompose(i);
        return std::make_tuple(h.n, h.k);
      },
      py::arg("i"), "Split index i >= 1 into (level n, offset k), i = 2^n + k.");

  mod.def("haar_norm", &hg::haar_norm, py::arg("i"), py::arg("p"),
          "Lp norm of the unnormalized Haar function with index i.");

  mod.def(
      "synthesize",
      [](const std::vector<double>& coeffs, double p) {
        return hg::synthesize(segment_coefficients(coeffs), p).values;
      },
      py::arg("coeffs"), py::arg("p"),
      "Cell values of sum coeffs[i] * normalized Haar element i, on the natural grid.");

  mod.def(
      "analyze",
      [](const std::vector<double>& values, const std::vector<int>& indexSet, double p) {
        return hg::analyze(make_dyadic(values), indexSet, p).coeffs;
      },
      py::arg("values"), py::arg("index_set"), py::arg("p"),
      "Coefficients of a piecewise-constant function against the normalized Haar elements.");

  mod.def(
      "lp_norm",
      [](const std::vector<double>& values, double p) {
        return hg::lp_norm(make_dyadic(values), p);
      },
      py::arg("values"), py::arg("p"), "Lp[0,1) norm of a piecewise-constant function.");

  mod.def(
      "line_minimize",
      [](const std::vector<double>& y, const std::vector<double>& phi, double p) {
        hg::LineSearchResult r = hg::line_minimize(make_dyadic(y), make_dyadic(phi), p);
        return std::make_tuple(r.lambdaStar, r.residualNorm, r.iterations);
      },
      py::arg("y"), py::arg("phi"), py::arg("p"),
      "Minimize ||y - lambda*phi||_p; returns (lambda_star, residual_norm, iterations).");

  mod.def(
      "run",
      [](const std::string& kind, const std::vector<double>& coeffs, double p, double tau,
         std::uint64_t seed, double snapEps, long maxSteps) {
        hg::AlgorithmConfig cfg;
        cfg.kind = kind_from(kind);
        cfg.p = p;
        cfg.tau = tau;
        cfg.seed = seed;
        cfg.snapEpsilon = snapEps;
        cfg.maxSteps = maxSteps;
        cfg.validate();
        hg::GreedyTrace tr = hg::run(segment_coefficients(coeffs), cfg);
        return hg::trace_to_json(tr, hg::serialization_zeta(p));
      },
      py::arg("kind"), py::arg("coeffs"), py::arg("p"), py::arg("tau") = 1.0,
      py::arg("seed") = 12345, py::arg("snap_eps") = 1e-10, py::arg("max_steps") = 200000,
      "Run a greedy algorithm from the given coefficients; returns the JSON trace.");

  mod.def(
      "interval_partition",
      [](const std::vector<double>& a, double zeta) {
        return hg::interval_partition(a, zeta).intervals;
      },
      py::arg("a"), py::arg("zeta"),
      "Blocks of the zeta-partition of positions 1..len(a), largest-magnitude block first.");

  mod.def("n0_bound", &hg::n0_bound, py::arg("m"), py::arg("gamma"), py::arg("zeta"),
          "Steps sufficient to select some block endpoint, given a per-step decay factor.");
  mod.def("total_bound", &hg::total_bound, py::arg("m"), py::arg("n0"),
          "Global termination bound (2^m - 1) * n0.");
  mod.def("zeta_formula", &hg::zeta_formula, py::arg("p"),
          "Closed-form partition parameter for p > 2.");
  mod.def("gamma_bound_exponent", &hg::gamma_bound_exponent, py::arg("p"), py::arg("m"),
          "Shape of the per-step decay guarantee as a power of m.");

  mod.def(
      "estimate_gamma",
      [](double p, int m, const std::string& kind, double tau, int samples, std::uint64_t seed) {
        hg::HaarDictionary dict = hg::HaarDictionary::initial_segment(m, p);
        return hg::estimate_gamma(dict, kind_from(kind), tau, samples, seed);
      },
      py::arg("p"), py::arg("m"), py::arg("kind") = "XGA", py::arg("tau") = 1.0,
      py::arg("samples") = 1000, py::arg("seed") = 12345,
      "Worst observed one-step residual norm from random unit vectors.");

  mod.def("estimate_zeta", &hg::estimate_zeta, py::arg("m"), py::arg("p"), py::arg("samples"),
          py::arg("seed"), "Largest observed one-coordinate-minimizer tail ratio.");

  mod.def(
      "property_p_ratio",
      [](const std::vector<double>& coeffs, int i0, double p) {
        hg::PropertyPReport r = hg::property_p_minimizer(segment_coefficients(coeffs), i0, p);
        return std::make_tuple(r.t0, r.tailSum, r.ratio);
      },
      py::arg("coeffs"), py::arg("i0"), py::arg("p"),
      "One-coordinate minimizer at slot i0: returns (t0, tail_sum, ratio).");

  mod.def(
      "counterexample",
      [](double a, double b, int steps) {
        hg::CounterexampleReport r = hg::run_euclidean_counterexample(a, b, steps);
        std::vector<double> ratios;
        ratios.reserve(r.steps.size());
        for (const auto& s : r.steps) ratios.push_back(s.ratio);
        return std::make_tuple(ratios, r.terminated, r.finalNorm);
      },
      py::arg("a"), py::arg("b"), py::arg("steps") = 200,
      "2D two-element walk from (a, b); returns (per-step norm ratios, terminated, final_norm).");
}

"""Greedy approximation in finite-dimensional Lp spaces over the Haar system.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports it and adds one convenience wrapper that parses run traces.
"""

import json

from ._core import (
    analyze,
    counterexample,
    estimate_gamma,
    estimate_zeta,
    gamma_bound_exponent,
    haar_index_decompose,
    haar_norm,
    interval_partition,
    line_minimize,
    lp_norm,
    n0_bound,
    property_p_ratio,
    run,
    synthesize,
    total_bound,
    zeta_formula,
)

__all__ = [
    "analyze",
    "counterexample",
    "estimate_gamma",
    "estimate_zeta",
    "gamma_bound_exponent",
    "haar_index_decompose",
    "haar_norm",
    "interval_partition",
    "line_minimize",
    "lp_norm",
    "n0_bound",
    "property_p_ratio",
    "run",
    "run_trace",
    "synthesize",
    "total_bound",
    "zeta_formula",
]


def run_trace(kind, coeffs, p, **kwargs):
    """Like :func:`run`, but returns the trace as a parsed dict."""
    return json.loads(run(kind, coeffs, p, **kwargs))

"""Rational-infinite divisibility toolkit: criteria, spectral triplets and
certified power-norm bounds for mixture distributions."""

from ._qid import (  # noqa: F401
    builtin_examples,
    eval_cf,
    exact_power_norm,
    power_norm_bounds,
    run_scenario,
    version,
)

__all__ = [
    "builtin_examples",
    "eval_cf",
    "exact_power_norm",
    "power_norm_bounds",
    "run_scenario",
    "version",
]

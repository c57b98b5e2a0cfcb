"""Stein operators for linear combinations of gamma-type random variables.

Target specs are plain dicts in the same JSON format the command line
tool reads, e.g. ``{"kind": "second_chaos", "lambdas": [1.0, -0.5]}``.
Operators are lists of ascending-power coefficient lists, one per
derivative order.
"""

import json

import numpy as np

from . import _gammastein as _core
from ._gammastein import SpecError, UnsupportedError, elementary_symmetric, principal_minor_sum

__all__ = [
    "SpecError",
    "UnsupportedError",
    "build_operator",
    "cf_eval",
    "cumulants",
    "delta_discrepancy",
    "elementary_symmetric",
    "levy_decompose",
    "mckay_from_bivariate",
    "principal_minor_sum",
    "sample",
    "scalar_equivalent",
    "validate_spec",
    "verify",
]


def _dump(spec):
    return json.dumps(spec)


def _op_json(op):
    return json.dumps({"coeff_polys": op})


def validate_spec(spec):
    """Return the normalized spec dict, raising SpecError if invalid."""
    return json.loads(_core.validate_spec(_dump(spec)))


def build_operator(spec, route="fourier"):
    return json.loads(_core.build_operator(_dump(spec), route))["coeff_polys"]


def scalar_equivalent(op1, op2, tol=1e-9):
    """s with op1 = s * op2, or None."""
    return _core.scalar_equivalent(_op_json(op1), _op_json(op2), tol)


def sample(spec, n, seed, threads=0):
    return np.asarray(_core.sample(_dump(spec), n, seed, threads))


def cf_eval(spec, xi):
    return _core.cf_eval(_dump(spec), xi)


def verify(spec, n, seed, degrees=range(7), operator=None, route="fourier", z_max=4.0, threads=0):
    if operator is None:
        operator = build_operator(spec, route)
    return json.loads(
        _core.verify(_dump(spec), _op_json(operator), n, seed, list(degrees), z_max, threads)
    )


def cumulants(spec, order):
    """[kappa_2, ..., kappa_order]."""
    return _core.cumulants(_dump(spec), order)


def delta_discrepancy(kappa, lambdas):
    return _core.delta_discrepancy(list(kappa), list(lambdas))


def mckay_from_bivariate(C, alpha):
    a, b, c = _core.mckay_from_bivariate([list(r) for r in C], alpha)
    return {"a": a, "b": b, "c": c}


def levy_decompose(a, b, c):
    shape, rate1, rate2 = _core.levy_decompose(a, b, c)
    return {"shape": shape, "rate1": rate1, "rate2": rate2}

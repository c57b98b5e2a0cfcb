import math

import numpy as np
import pytest

import gammastein as gs

CHAOS = {"kind": "second_chaos", "lambdas": [1.0, -0.5]}


def test_routes_agree():
    fourier = gs.build_operator(CHAOS, "fourier")
    malliavin = gs.build_operator(CHAOS, "malliavin")
    assert len(fourier) == 3
    assert gs.scalar_equivalent(fourier, malliavin) == pytest.approx(-4.0)


def test_verify_passes_on_target():
    report = gs.verify(CHAOS, n=100_000, seed=3, degrees=[0, 1, 2])
    assert report["verdict"] == "pass"
    assert [t["fn"] for t in report["tests"]] == ["damped0", "damped1", "damped2"]


def test_sample_is_reproducible():
    a = gs.sample(CHAOS, 50_000, seed=9)
    b = gs.sample(CHAOS, 50_000, seed=9, threads=2)
    assert isinstance(a, np.ndarray)
    assert np.array_equal(a, b)
    assert abs(a.mean()) < 4 * math.sqrt(2.5 / 50_000)


def test_cumulants_and_discrepancy():
    k = gs.cumulants(CHAOS, 6)
    assert k[0] == pytest.approx(2 * (1 + 0.25))
    assert abs(gs.delta_discrepancy(k, CHAOS["lambdas"])) < 1e-9


def test_mckay_helpers():
    m = gs.mckay_from_bivariate([[2.0, 0.5], [0.5, 1.0]], 1.0)
    assert m["c"] == pytest.approx(3 / math.sqrt(2))
    assert gs.levy_decompose(0.5, 1.0, 2.0) == pytest.approx({"shape": 1.0, "rate1": 1.0, "rate2": 3.0})
    assert gs.cf_eval({"kind": "mckay_i", "a": 0.5, "b": 1.0, "c": 2.0}, 0.0) == pytest.approx(1.0)


def test_primitives():
    assert gs.elementary_symmetric([1, 2, 3], 2) == pytest.approx(11)
    assert gs.principal_minor_sum([[1.0, 0.0], [0.0, 2.0]], [1.0, 1.0], 2) == pytest.approx(2.0)


def test_errors():
    with pytest.raises(gs.SpecError):
        gs.build_operator({"kind": "mckay_i", "a": 0.5, "b": 1.0, "c": 0.5})
    with pytest.raises(ValueError):
        gs.build_operator(CHAOS, "nope")
    with pytest.raises(gs.UnsupportedError):
        gs.sample({"kind": "multivariate_gamma", "C": [[2, 0.5], [0.5, 1]], "alpha": 0.7,
                   "lambdas": [1.0, -0.5]}, 10, 1)

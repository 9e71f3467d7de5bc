"""Smoke tests for the imexms Python bindings."""
import math

import pytest

import imexms


def test_make_scheme_bdf2():
    s = imexms.make_scheme("wbdf", 2, 1)
    assert s["a"] == [1.5, -0.5]
    assert len(s["b"]) == 3 and len(s["c"]) == 2
    assert not s["warning"]


def test_exact_parameter_strings():
    # "11/5" is taken as an exact rational.
    s = imexms.make_scheme("siems", 7, "11/5")
    assert abs(sum(s["a"]) - 1) < 1e-9


def test_euler_indicators_are_optimal():
    r = imexms.indicators("euler", 1)
    for key in ("sigma_F", "sigma_E", "lambda_I", "intensity"):
        assert abs(r[key] - 1) < 1e-13


def test_wbdf2_closed_form():
    r = imexms.indicators("wbdf", 2, 2)
    assert r["intensity"] == pytest.approx(3 / 5, abs=1e-9)
    assert r["sigma_E"] == pytest.approx(5 / 4, abs=1e-9)


def test_sweep_rows():
    rows = imexms.sweep("mbdf", 2, "2:10:9", threads=2)
    assert len(rows) == 9
    assert all(r["report"] is not None for r in rows)


def test_toeplitz_bdf2():
    t = imexms.toeplitz_verify("bdf", 2, n=64)
    assert t["min_eig_sym_Bhat"] >= 0.5 - 1e-8
    assert t["checks"]["min_eig_ge_lambda_I"]


def test_doc_kernels_geometric():
    d = imexms.doc_kernels([1.5, -0.5], 8)
    for j, v in enumerate(d):
        assert v == pytest.approx(2 / 3 * 3.0 ** -j, rel=1e-14)


def test_poly_roots():
    roots = sorted(r.real for r in imexms.poly_roots([-1.0, 0.0, 1.0]))
    assert roots == pytest.approx([-1.0, 1.0], abs=1e-12)


def test_truncation_and_closed_forms():
    order, cu, cf = imexms.truncation("bdf", 2)
    assert order == 2
    assert math.isfinite(cu) and math.isfinite(cf)
    bounds = imexms.closed_forms("gbdf", 4, 9.0)
    assert any(q == "intensity" and kind == "lower" and abs(v - 547 / 773) < 1e-12 for q, v, kind in bounds)


def test_convergence_study_euler():
    st = imexms.convergence_study("P1", "euler", 1, None, [1 / 80, 1 / 160, 1 / 320, 1 / 640])
    assert abs(st["slope"] - 1) <= 0.1
    assert not st["unstable"]
    assert len(st["rows"]) == 4


def test_error_mapping():
    with pytest.raises(imexms.DomainError, match="unsupported order"):
        imexms.make_scheme("wbdf", 7, 2)
    with pytest.raises(ValueError):
        imexms.make_scheme("rk4", 2, 1)
    with pytest.raises(imexms.DomainError):
        imexms.doc_kernels([0.0, 1.0], 4)
    assert issubclass(imexms.NumericalError, ArithmeticError)
    assert issubclass(imexms.DomainError, ValueError)

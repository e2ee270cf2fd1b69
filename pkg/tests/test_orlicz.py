import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from speclab.errors import InvalidDomain
from speclab.orlicz import (ExpA, LLogLB, MeasurableSample, Power, average_norm, dual_sup_direct,
                            embedding_constant_M, luxemburg_norm, orlicz_norm)

cells = st.lists(
    st.tuples(st.floats(0.01, 3.0), st.floats(0.0, 50.0)), min_size=1, max_size=8
).filter(lambda cs: any(v > 1e-6 for _, v in cs))


def _sample(cs):
    m, v = zip(*cs)
    return MeasurableSample.piecewise_constant(m, v)


# --- oracles ---------------------------------------------------------------


def test_zero_function_has_zero_norms():
    f = MeasurableSample.piecewise_constant([1.0, 2.0], [0.0, 0.0])
    assert luxemburg_norm(f, LLogLB) == 0
    assert orlicz_norm(f, LLogLB) == 0
    assert average_norm(f, LLogLB) == 0


def test_constant_on_unit_measure_gauge_norm():
    # B(s1) = 1 at s1 = e - 1; the gauge norm of c is c / s1
    s1 = LLogLB.inverse(1.0)
    lo, hi = 1.0, 3.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if (1 + mid) * math.log1p(mid) - mid < 1 else (lo, mid)
    assert s1 == pytest.approx(lo, rel=1e-12)
    assert s1 == pytest.approx(math.e - 1, rel=1e-12)
    for c in (0.3, 1.0, 7.0):
        f = MeasurableSample.piecewise_constant([1.0], [c])
        assert luxemburg_norm(f, LLogLB) == pytest.approx(c / s1, rel=1e-9)


def test_log_singularity_on_unit_disk():
    f = MeasurableSample.radial(lambda r: -np.log(r), 0.0, 1.0, singular="lo")
    assert luxemburg_norm(f, ExpA) <= 2 * math.pi


def test_orlicz_norm_of_one_is_scalar_minimum():
    f = MeasurableSample.piecewise_constant([1.0], [1.0])
    ks = np.geomspace(1e-3, 1e3, 200001)
    brute = np.min((1 + ((1 + ks) * np.log1p(ks) - ks)) / ks)
    assert orlicz_norm(f, LLogLB) == pytest.approx(brute, rel=1e-8)
    assert average_norm(f, LLogLB) == pytest.approx(orlicz_norm(f, LLogLB), rel=1e-12)


def test_quadrature_matches_cells():
    f_q = MeasurableSample.interval(lambda x: 2.0 + 0 * x, 0.0, 1.5)
    f_c = MeasurableSample.piecewise_constant([1.5], [2.0])
    assert luxemburg_norm(f_q, LLogLB) == pytest.approx(luxemburg_norm(f_c, LLogLB), rel=1e-8)
    assert orlicz_norm(f_q, ExpA) == pytest.approx(orlicz_norm(f_c, ExpA), rel=1e-8)


def test_average_norm_needs_finite_measure():
    f = MeasurableSample.piecewise_constant([0.0], [1.0])
    with pytest.raises(InvalidDomain):
        average_norm(f, LLogLB)


def test_power_complement_is_conjugate():
    psi = Power(3.0, scale=0.5)
    phi = psi.complementary
    s = np.linspace(0.01, 5, 50)
    t = np.linspace(0.01, 5, 50)
    S_, T_ = np.meshgrid(s, t)
    assert np.all(S_ * T_ <= psi(S_) + phi(T_) + 1e-12)


def test_embedding_constant_examples():
    M, t, m = embedding_constant_M(2.0)
    assert m == pytest.approx(0.5) and t == 0.0
    M, t, m = embedding_constant_M(1.5)
    grid = np.geomspace(1e-3, 1e6, 400001)
    brute = np.max(((1 + grid) * np.log1p(grid) - grid) / grid ** 1.5)
    assert m >= brute * (1 - 1e-12)
    assert m == pytest.approx(brute, rel=1e-6)


# --- properties --------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(cells)
def test_luxemburg_orlicz_sandwich(cs):
    f = _sample(cs)
    lux, orl = luxemburg_norm(f, LLogLB), orlicz_norm(f, LLogLB)
    assert lux <= orl * (1 + 1e-9)
    assert orl <= 2 * lux * (1 + 1e-9)


@settings(max_examples=40, deadline=None)
@given(cells, st.floats(0.01, 100.0))
def test_norms_are_homogeneous(cs, lam):
    f = _sample(cs)
    g = f.scaled(lam)
    for norm in (luxemburg_norm, orlicz_norm):
        assert norm(g, LLogLB) == pytest.approx(lam * norm(f, LLogLB), rel=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.floats(0.05, 2.0), st.floats(0.0, 5.0)), min_size=1, max_size=6)
       .filter(lambda cs: any(v > 1e-3 for _, v in cs)))
def test_dual_formula_matches_direct_maximisation(cs):
    m, v = zip(*cs)
    f = MeasurableSample.piecewise_constant(m, v)
    assert orlicz_norm(f, LLogLB) == pytest.approx(dual_sup_direct(m, v, ExpA), rel=1e-6)
    assert average_norm(f, LLogLB) == pytest.approx(dual_sup_direct(m, v, ExpA, level=sum(m)), rel=1e-6)


@given(st.floats(0.0, 30.0), st.floats(0.0, 30.0))
def test_young_inequality_for_the_pair(s, t):
    assert s * t <= float(ExpA(s)) + float(LLogLB(t)) + 1e-9 * (1 + s * t)


@given(st.floats(1e-6, 1e6))
def test_inverse_roundtrip(y):
    s = LLogLB.inverse(y)
    assert float(LLogLB(s)) == pytest.approx(y, rel=1e-9)

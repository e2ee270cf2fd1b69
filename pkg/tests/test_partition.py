import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from speclab import constructions as C
from speclab.partition import profile, thresholded_sqrt_sum, thresholded_sum, weak_l1
from speclab.potentials import parse_potential
from speclab.values import is_finite, is_infinite

seqs = st.lists(st.floats(0.0, 1e3), max_size=40)


def _weak_brute(seq):
    a = np.abs(np.asarray(seq, dtype=float))
    best = 0.0
    for v in np.unique(a[a > 0]):
        # s slightly below each breakpoint v
        best = max(best, v * np.sum(a >= v))
    return best


def test_weak_l1_examples():
    assert weak_l1([0.0, 0.0, 0.0]) == 0
    N = 50
    assert weak_l1([1 / n for n in range(1, N + 1)]) == pytest.approx(1.0)


def test_thresholded_sqrt_sum_example():
    a = [1.0, 0.5, 0.04]
    assert thresholded_sqrt_sum(a, 0.25) == pytest.approx(1 + math.sqrt(0.5))
    assert thresholded_sqrt_sum([0.1, 0.2], 0.25) == 0


@given(seqs)
def test_weak_l1_matches_breakpoint_enumeration(seq):
    assert weak_l1(seq) == pytest.approx(_weak_brute(seq), rel=1e-12, abs=1e-300)


@given(seqs, st.floats(1e-3, 1e2))
def test_sqrt_sum_below_weak_norm(seq, c):
    assert thresholded_sqrt_sum(seq, c) <= 2 / math.sqrt(c) * weak_l1(seq) * (1 + 1e-12) + 1e-300


@given(seqs, st.floats(1e-3, 1e2), st.floats(0.1, 3.0))
def test_thresholded_sum_brute(seq, c, power):
    want = sum(x ** power for x in seq if x > c)
    assert thresholded_sum(seq, c, power) == pytest.approx(want, rel=1e-12, abs=1e-300)


def test_zero_potential_profile_vanishes():
    V = C.build("zero").potential
    prof = profile(V, "A", (-3, 3))
    assert all(v == 0 for _, v in prof.items())


def test_log3_bold_a_closed_form():
    V = C.build("log3").potential
    prof = profile(V, "boldA", (2, 8))
    for n, v in prof.items():
        assert v == pytest.approx(math.log(1 + 1 / (n - 1)), rel=1e-7)
    assert is_finite(weak_l1(profile(V, "boldA")))


def test_inverse_square_sum_diverges():
    V = C.build("inverse_square").potential
    from speclab.partition import profile_sum

    assert is_infinite(profile_sum(profile(V, "boldB")))


def test_plateau_dyadic_entries():
    # V = 3 on |x| < 1; U_0 = {1/e < r < e}, U_-1 = {e^-2 < r < e^-1} carries weight |ln r|
    V = parse_potential("region t=[-inf, 0]\n  radial = 3\n  angular = 1\n")
    prof = dict(profile(V, "A", (-1, 1)).items())
    assert prof[0] == pytest.approx(3 * math.pi * (1 - math.exp(-2)), rel=1e-9)
    e2, e4 = math.exp(-2), math.exp(-4)
    assert prof[-1] == pytest.approx(6 * math.pi * (0.75 * e2 - 1.25 * e4), rel=1e-9)
    assert prof[1] == 0

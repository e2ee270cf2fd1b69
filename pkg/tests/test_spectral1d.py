import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from speclab import spectral1d as S
from speclab.constructions import _numeric_chain
from speclab.errors import InvalidParameters
from speclab.potentials import parse_potential


def test_dirichlet_count_thresholds():
    a, b = 1.0, math.e ** 2
    L = 2.0
    thr1 = 0.25 + (math.pi / L) ** 2
    assert S.dirichlet_count(a, b, thr1) == 0
    assert S.dirichlet_count(a, b, thr1 * (1 + 1e-12)) == 1
    assert S.dirichlet_count(a, b, 0.2) == 0
    with pytest.raises(InvalidParameters):
        S.dirichlet_count(2.0, 1.0, 1.0)


@settings(max_examples=80, deadline=None)
@given(st.floats(1e-2, 10.0), st.floats(0.2, 6.0), st.floats(1e-3, 20.0))
def test_pruefer_matches_dirichlet(a, L, beta):
    b = a * math.exp(L)
    # keep away from the exact thresholds, which the acceptance suite probes separately
    x = math.sqrt(max(beta - 0.25, 0.0)) * L / math.pi
    assume(beta <= 0.25 or abs(x - round(x)) > 1e-9)
    got = S.pruefer_count(S.inverse_square_problem(a, b, beta), 1.0)
    assert got.lower == got.upper == S.dirichlet_count(a, b, beta)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(0.2, 4.0), st.floats(0.01, 3.0)), min_size=1, max_size=5),
       st.one_of(st.none(), st.floats(-0.24, -0.01)))
def test_chain_composition_matches_shooting(pieces, tail_q):
    lengths, q = zip(*pieces)
    tail = None if tail_q is None else (tail_q, tail_q)
    ch = S.InverseSquareChain(lengths, q, tail)
    exact = S.chain_count(ch)
    numeric, why = _numeric_chain({"lengths": list(lengths), "q": list(q), "tail": tail})
    assume(numeric is not None)
    assert exact.count == numeric, why


def test_weak_coupling_gives_one_bound_state():
    V = parse_potential("region t=[-inf, 0]\n  radial = 0.01\n  angular = 1\n")
    r = S.radial_eigencount(V, 1.0)
    assert r.count == 1


def test_zero_potential_has_no_bound_state():
    V = parse_potential("region t=[-inf, 0]\n  radial = 0\n  angular = 1\n")
    assert S.radial_eigencount(V, 1.0).count == 0


def test_counts_are_monotone_in_coupling():
    V = parse_potential("region t=[-inf, 0]\n  radial = 30\n  angular = 1\n")
    counts = [S.radial_eigencount(V, a).count for a in (0.2, 0.5, 1.0, 2.0, 4.0)]
    assert counts == sorted(counts)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.1, 3.0), st.floats(0.3, 3.0))
def test_sobolev_constant_closed_form(kappa, a, L):
    b = a * math.exp(L)
    sc = S.sharp_sobolev_C(kappa, a, b)
    assert sc.C == pytest.approx(S.sharp_sobolev_C_at(kappa, a, b, a), rel=1e-12)
    xs = np.geomspace(a, b, 50)
    assert max(S.sharp_sobolev_C_at(kappa, a, b, x) for x in xs) <= sc.C * (1 + 1e-12)
    assert S.sharp_sobolev_C0(kappa, a, b) == pytest.approx(1 / (math.sqrt(kappa) * math.tanh(math.sqrt(kappa))))


def test_discrete_rayleigh_never_exceeds_constant():
    kappa, a, b = 1.559, 1.0, 2.0
    C = S.sharp_sobolev_C(kappa, a, b).C
    _, vals = S.grid_rayleigh_max("hardy", kappa, a, b, 400)
    assert vals.max() <= C * (1 + 1e-12)
    assert vals.max() >= 0.99 * C

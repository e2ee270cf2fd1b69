import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from speclab import bounds as Bd
from speclab import constructions as C
from speclab.errors import InconsistentVerdict
from speclab.values import Infinite


def _phi_direct(k):
    s = math.sqrt(4 * k + 1)
    return k / (4 * k + 1) / (1 + s * (2 ** s + 1) / (2 ** s - 1))


@given(st.floats(1e-3, 50.0))
def test_phi_matches_closed_form(k):
    assert Bd.phi_kappa(k) == pytest.approx(_phi_direct(k), rel=1e-12)


def test_phi_maximum_is_global_on_grid():
    k, phi = Bd.maximize_phi()
    grid = [0.01 * i for i in range(1, 3000)]
    assert phi >= max(_phi_direct(x) for x in grid) * (1 - 1e-12)
    assert abs(k - 1.559) < 0.01


def test_implication_closure():
    for x in Bd.ESTIMATES:
        for y in Bd.ESTIMATES:
            for z in Bd.ESTIMATES:
                if x != z and Bd.implies(x, y) and Bd.implies(y, z):
                    assert Bd.implies(x, z), (x, y, z)
    assert Bd.implies("LNS", "Sol")
    assert Bd.implies("Laptev", "clCLR")
    assert not Bd.implies("clCLR", "Sol")


def test_estimate_names_are_case_insensitive():
    assert Bd.canonical("sol") == "Sol"
    assert Bd.canonical("CLclr") == "clCLR"
    with pytest.raises(KeyError):
        Bd.canonical("nonsense")


def test_zero_potential_gives_one():
    V = C.build("zero").potential
    for e in ("clCLR", "Sol", "RadMain", "LNS", "GrigNad"):
        assert Bd.evaluate(V, e, {"p": 2.0}).value == 1.0


def test_log3_separates_sol_from_clclr():
    V = C.build("log3").potential
    reps = dict(Bd.compare(V, ["Sol", "clCLR"]))
    assert reps["Sol"].status == "finite"
    assert reps["clCLR"].status == "infinite"
    js = reps["clCLR"].to_json()
    assert js["value"] == "inf" and js["reason"]


def test_consistency_check_catches_violation():
    class Fake:
        def __init__(self, st):
            self.status = st

    with pytest.raises(InconsistentVerdict):
        Bd.check_consistency([("LNS", Fake("infinite")), ("Sol", Fake("finite"))])
    Bd.check_consistency([("LNS", Fake("finite")), ("Sol", Fake("infinite"))])


def test_rad_main_on_plateau_is_explicit():
    from speclab.potentials import parse_potential
    from speclab.partition import profile

    V = parse_potential("region t=[-inf, 0]\n  radial = 3\n  angular = 1\n")
    A = [v for _, v in profile(V, "A").items()]
    want = 1 + 4 * sum(math.sqrt(a) for a in A if a > 0.25)
    assert Bd.rad_main_bound(V) == pytest.approx(want, rel=1e-9)


def test_lower_bound_counts_large_entries():
    from speclab.potentials import parse_potential

    V = parse_potential("region t=[-inf, 0]\n  radial = 20000\n  angular = 1\n")
    val, card = Bd.lower_bound_10pi(V)
    assert card >= 1 and val == pytest.approx(card / 3)
    assert isinstance(Bd.lower_bound_10pi(C.build("inverse_square").potential)[0], Infinite)

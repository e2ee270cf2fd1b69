import math

import pytest

from speclab import constructions as C
from speclab.cli import parse_config
from speclab.errors import InvalidParameters
from speclab.orlicz import Power


def _statuses(c):
    return {r["claim"]: r["status"] for r in C.verify_claims(c)}


def test_alpha1_ii_default_claims_pass():
    st = _statuses(C.build("alpha1_ii"))
    assert st and all(v == "pass" for v in st.values()), st


def test_alpha1_iii_summable_family_passes():
    c = C.build("alpha1_iii", q=2, p=2)
    assert c.potential is None and c.profile is not None
    st = _statuses(c)
    assert all(v == "pass" for v in st.values()), st


def test_alpha1_iii_rejects_divergent_family():
    with pytest.raises(InvalidParameters, match="diverges"):
        C.build("alpha1_iii", q=4, p=1)


def test_llogl_construction_claims_pass():
    st = _statuses(C.build("llogl_sharpness"))
    assert all(v == "pass" for v in st.values()), st


@pytest.mark.parametrize("psi", ["B", Power(1.5)])
def test_llogl_rejects_fast_n_functions(psi):
    with pytest.raises(InvalidParameters):
        C.build("llogl_sharpness", psi=psi)


def test_unknown_construction():
    with pytest.raises(InvalidParameters, match="unknown construction"):
        C.build("nope")


def test_config_export_reparses():
    c = C.build("alpha1_i", N=3)
    cfg = parse_config(c.to_config())
    assert cfg.task == "verify" and cfg.construction == "alpha1_i"
    assert cfg.params["N"] == 3
    V = cfg.load_potential()
    for r in (0.5, 1.5, 3.0, 50.0, 1e4):
        assert V.value(r, 0.0) == pytest.approx(c.potential.value(r, 0.0), rel=1e-12, abs=0)


def test_verify_runs_in_threads():
    c = C.build("alpha1_i", N=2)
    one = C.verify_claims(c, jobs=1)
    many = C.verify_claims(c, jobs=3)
    assert [r["status"] for r in one] == [r["status"] for r in many]

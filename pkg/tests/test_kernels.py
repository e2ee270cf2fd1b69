"""The compiled kernels and the pure-Python fallback give identical counts."""

import json
import os
import subprocess
import sys

SCRIPT = """
import json
from speclab import _kernels, spectral1d as S
from speclab.potentials import parse_potential
V = parse_potential("region t=[-inf, 0]\\n  radial = 200\\n  angular = 1\\n")
W = parse_potential("region t=[0, 3]\\n  radial = 10 * |r|^-2\\n  angular = 1\\n")
out = {"numba": _kernels.USE_NUMBA}
out["plateau"] = S.radial_eigencount(V, 1.0).count
out["inv_sq"] = S.radial_eigencount(W, 1.0).count
out["dirichlet"] = [S.pruefer_count(S.inverse_square_problem(1.0, 20.0, b), 1.0).count for b in (0.5, 3.0, 11.0)]
print(json.dumps(out))
"""


def _run(no_numba: bool) -> dict:
    env = dict(os.environ)
    if no_numba:
        env["SPECLAB_NO_NUMBA"] = "1"
    else:
        env.pop("SPECLAB_NO_NUMBA", None)
    res = subprocess.run([sys.executable, "-c", SCRIPT], capture_output=True, text=True, env=env, timeout=600)
    assert res.returncode == 0, res.stderr
    return json.loads(res.stdout.strip().splitlines()[-1])


def test_fallback_agrees_with_compiled():
    fast, slow = _run(False), _run(True)
    assert slow["numba"] is False
    fast.pop("numba"), slow.pop("numba")
    assert fast == slow

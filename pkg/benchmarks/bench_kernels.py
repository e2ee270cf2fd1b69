"""Timing of the shooting kernels, compiled against the pure-Python fallback.

Usage::

    python benchmarks/bench_kernels.py            # both back ends, side by side
    python benchmarks/bench_kernels.py --single   # current back end only

The fallback is selected by ``SPECLAB_NO_NUMBA=1``; each back end runs in
its own interpreter because the choice is fixed at import time.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def workload() -> dict:
    from speclab import _kernels
    from speclab import spectral1d as S
    from speclab.potentials import parse_potential

    plateau = parse_potential("region t=[-inf, 0]\n  radial = 2000\n  angular = 1\n")
    ramp = parse_potential("region t=[0, 4]\n  radial = 40 * |r|^-2\n  angular = 1\n")
    t0 = time.perf_counter()
    S.pruefer_count(S.inverse_square_problem(1.0, 2.0, 5.0), 1.0)  # includes compilation
    warm = time.perf_counter() - t0

    rows = {}
    t0 = time.perf_counter()
    n = S.radial_eigencount(plateau, 1.0).count
    rows["plateau 2000, all modes"] = (time.perf_counter() - t0, n)
    t0 = time.perf_counter()
    n = S.radial_eigencount(ramp, 1.0).count
    rows["40/r^2 on (1, e^4), all modes"] = (time.perf_counter() - t0, n)
    t0 = time.perf_counter()
    tot = sum(S.pruefer_count(S.inverse_square_problem(1.0, 50.0, 0.1 * k), 1.0).count for k in range(1, 101))
    rows["100 Dirichlet problems"] = (time.perf_counter() - t0, tot)
    return {"numba": _kernels.USE_NUMBA, "warmup": warm, "rows": rows}


def _child(no_numba: bool) -> dict:
    env = dict(os.environ)
    env.pop("SPECLAB_NO_NUMBA", None)
    if no_numba:
        env["SPECLAB_NO_NUMBA"] = "1"
    res = subprocess.run([sys.executable, __file__, "--single", "--json"], env=env, capture_output=True,
                         text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--single", action="store_true", help="time the current back end only")
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    args = ap.parse_args(argv)
    if args.single:
        out = workload()
        if args.json:
            print(json.dumps(out))
        else:
            print(f"numba={out['numba']} warm-up {out['warmup']:.2f}s")
            for k, (t, n) in out["rows"].items():
                print(f"  {k:32s} {t:8.3f}s  result {n}")
        return 0
    fast, slow = _child(False), _child(True)
    print(f"{'case':32s} {'numba':>9s} {'python':>9s} {'speed-up':>9s}  result")
    print(f"{'first call (compile)':32s} {fast['warmup']:9.3f} {slow['warmup']:9.3f}")
    for k in fast["rows"]:
        tf, nf = fast["rows"][k]
        ts, ns = slow["rows"][k]
        flag = "" if nf == ns else "  MISMATCH"
        print(f"{k:32s} {tf:9.3f} {ts:9.3f} {ts / tf:9.1f}x  {nf}{flag}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

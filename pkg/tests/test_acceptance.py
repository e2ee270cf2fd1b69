"""Acceptance criteria 1-10, each pinned at its stated tolerance.

Every test records a single PASS/FAIL line (shown in the pytest terminal
summary, or printed directly with ``python tests/test_acceptance.py``) and
then asserts, so an unmet criterion fails visibly.
"""

import math
import time

import numpy as np
import pytest

from acceptance_log import record
from speclab import bounds as Bd
from speclab import constructions as C
from speclab import spectral1d as S
from speclab.orlicz import (ExpA, LLogLB, MeasurableSample, Power, average_norm, dual_sup_direct,
                            embedding_constant_M, luxemburg_norm, orlicz_norm)
from speclab.partition import thresholded_sqrt_sum, thresholded_sum, weak_l1
from speclab.potentials import log_reduce, parse_potential
from speclab.values import Infinite, is_infinite

SLACK = 1e-9


def _le(x, y, rel=SLACK) -> bool:
    """``x <= y`` up to relative slack, with infinite values ordered last."""
    if is_infinite(y):
        return True
    if is_infinite(x):
        return False
    return x <= y + rel * max(1.0, abs(y))


# ---------------------------------------------------------------------------
# 1


def test_c01_phi_maximum():
    t0 = time.perf_counter()
    k, phi = Bd.maximize_phi()
    root = math.sqrt(2 * (4 * k + 1) * phi)
    dt = time.perf_counter() - t0
    ok = abs(k - 1.559) <= 0.01 and abs(phi - 0.046) <= 0.001 and abs(root - 0.816) <= 0.005 and dt < 1
    record(1, ok, "Phi maximum", f"kappa*={k:.5f} Phi*={phi:.6f} sqrt term={root:.5f} in {dt:.3f}s")
    assert ok


# ---------------------------------------------------------------------------
# 2


def _dirichlet_cases(rng):
    cases = []
    for _ in range(180):
        a = 10 ** rng.uniform(-2, 1)
        b = a * math.exp(rng.uniform(0.2, 6.0))
        cases.append((a, b, rng.uniform(1e-6, 20.0)))
    while len(cases) < 200:
        a = 10 ** rng.uniform(-2, 1)
        L = rng.uniform(0.5, 6.0)
        n_max = int(math.sqrt(20 - 0.25) * L / math.pi)
        if n_max < 1:
            continue
        N = int(rng.integers(1, n_max + 1))
        thr = 0.25 + (N * math.pi / L) ** 2
        beta = thr + rng.uniform(-1e-6, 1e-6)
        if 0 < beta <= 20:
            cases.append((a, a * math.exp(L), beta))
    return cases


def test_c02_dirichlet_oracle():
    rng = np.random.default_rng(20240602)
    cases = _dirichlet_cases(rng)
    t0 = time.perf_counter()
    bad = []
    for a, b, beta in cases:
        want = S.dirichlet_count(a, b, beta)
        got = S.pruefer_count(S.inverse_square_problem(a, b, beta), 1.0)
        if not (got.count == want and got.lower == got.upper == want):
            bad.append((a, b, beta, want, got.lower, got.upper))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30
    record(2, ok, "Dirichlet oracle", f"{len(cases) - len(bad)}/{len(cases)} exact (20 near thresholds) in {dt:.1f}s")
    assert ok, bad[:5]


# ---------------------------------------------------------------------------
# 3


def _rayleigh_hardy(kappa, a, b, x):
    from scipy.integrate import quad

    u = S.sobolev_extremizer(kappa, a, b, x)
    pts = [x] if a < x < b else None
    e1 = quad(lambda t: u.du(t) ** 2, a, b, points=pts, epsabs=0, epsrel=1e-13, limit=400)[0]
    e2 = quad(lambda t: u(t) ** 2 / t ** 2, a, b, points=pts, epsabs=0, epsrel=1e-13, limit=400)[0]
    return u(x) ** 2 / x / (e1 + kappa * e2)


def _rayleigh_flat(kappa, x, a, b):
    from scipy.integrate import quad

    u = S.sobolev_C0_extremizer(kappa, x, a, b)
    pts = [x] if a < x < b else None
    L = b - a
    e1 = quad(lambda t: u.du(t) ** 2, a, b, points=pts, epsabs=0, epsrel=1e-13, limit=400)[0]
    e2 = quad(lambda t: u(t) ** 2, a, b, points=pts, epsabs=0, epsrel=1e-13, limit=400)[0]
    return u(x) ** 2 / (L * e1 + kappa / L * e2)


def test_c03_sharp_constants():
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    worst_ratio, worst_grid_lo, worst_grid_hi = 0.0, math.inf, 0.0
    argmax_ok = True
    for _ in range(25):
        kappa = 10 ** rng.uniform(-1, 1)
        a = 10 ** rng.uniform(-1, 0.5)
        b = a * math.exp(rng.uniform(0.3, 3.0))
        # Hardy-weighted constant C(kappa; x)
        for x in (a, rng.uniform(a, b), b):
            ref = S.sharp_sobolev_C_at(kappa, a, b, x)
            worst_ratio = max(worst_ratio, abs(_rayleigh_hardy(kappa, a, b, x) / ref - 1))
        C = S.sharp_sobolev_C(kappa, a, b).C
        xs = np.geomspace(a, b, 2000)
        cx = np.array([S.sharp_sobolev_C_at(kappa, a, b, x) for x in xs])
        argmax_ok &= int(np.argmax(cx)) == 0 and abs(cx[0] / C - 1) < 1e-12
        _, vals = S.grid_rayleigh_max("hardy", kappa, a, b, 2000)
        worst_grid_lo = min(worst_grid_lo, vals.max() / C)
        worst_grid_hi = max(worst_grid_hi, vals.max() / C)
        # flat constant C0(kappa) = coth(sqrt kappa)/sqrt kappa
        for x in (a, rng.uniform(a, b), b):
            ref = S.sharp_sobolev_C0_at(kappa, x, a, b)
            worst_ratio = max(worst_ratio, abs(_rayleigh_flat(kappa, x, a, b) / ref - 1))
        C0 = S.sharp_sobolev_C0(kappa, a, b)
        xs = np.linspace(a, b, 2000)
        c0x = np.array([S.sharp_sobolev_C0_at(kappa, x, a, b) for x in xs])
        argmax_ok &= int(np.argmax(c0x)) in (0, len(xs) - 1) and abs(c0x.max() / C0 - 1) < 1e-12
        _, vals0 = S.grid_rayleigh_max("flat", kappa, a, b, 2000)
        worst_grid_lo = min(worst_grid_lo, vals0.max() / C0)
        worst_grid_hi = max(worst_grid_hi, vals0.max() / C0)
    dt = time.perf_counter() - t0
    ok = worst_ratio <= 1e-6 and argmax_ok and worst_grid_lo >= 0.999 and worst_grid_hi <= 1 + 1e-3 and dt < 60
    record(3, ok, "sharp constants",
           f"extremizer rel err {worst_ratio:.1e}, argmax at end point {argmax_ok}, "
           f"grid/C in [{worst_grid_lo:.6f}, {worst_grid_hi:.6f}] in {dt:.1f}s")
    assert ok


# ---------------------------------------------------------------------------
# 4


def test_c04_alpha1_i():
    t0 = time.perf_counter()
    rows, ok = [], True
    for N in (1, 2, 3, 5):
        c = C.build("alpha1_i", N=N)
        r = S.radial_eigencount(c.potential, 1 - 1e-3)
        div = [x for x in C.verify_claims(c) if x["kind"] == "divergence"][0]
        counts = div["observed"]
        grows = all(x < y for x, y in zip(counts, counts[1:])) and counts[-1] > 3 * N
        good = r.count == N and r.lower == r.upper == N and grows
        ok &= good
        rows.append(f"N={N}: count {r.lower}..{r.upper}, cutoffs {counts}")
    dt = time.perf_counter() - t0
    ok &= dt < 120
    record(4, ok, "alpha1 (i)", "; ".join(rows) + f" in {dt:.1f}s")
    assert ok


# ---------------------------------------------------------------------------
# 5


def test_c05_alpha1_iii_geometric():
    t0 = time.perf_counter()
    try:
        C.build("alpha1_iii", q=4, p=1)
        premise = "series accepted"
    except Exception as exc:  # the condition on the alpha_k fails for this family
        premise = f"rejected ({exc})"
    c = C.build("alpha1_iii", q=4, p=1, force=True)
    rep = C.verify_claims(c)
    diffs = [r["observed"] for r in rep if r["kind"] == "count_difference"]
    zeros = [r["observed"] for r in rep if r["kind"] == "zero_count"]
    ok_rows = all(r["status"] == "pass" for r in rep if r["kind"] in ("count_difference", "zero_count"))
    alt = C.verify_claims(C.build("alpha1_iii", q=2, p=2))
    alt_ok = all(r["status"] == "pass" for r in alt)
    dt = time.perf_counter() - t0
    ok = ok_rows and dt < 120
    record(5, ok, "alpha1 (iii) with alpha_k = 1 - 4^-k",
           f"{premise}; forced run: differences {diffs}, zero counts {zeros} (want 1s and k = 1..6); "
           f"alpha_k = 1 - 2^(-k^2) passes all rows: {alt_ok}; {dt:.1f}s")
    assert ok


# ---------------------------------------------------------------------------
# 6


def _radial(name, lo, hi, f):
    return parse_potential(f"name = {name}\nregion t=[{lo}, {hi}]\n  radial = {f}\n  angular = 1\n")


def radial_corpus() -> list:
    out = [_radial(f"plateau{c}", "-inf", 0, c) for c in (1, 20, 200, 2000, 20000)]
    out += [_radial(f"ring{c}", 1, 2, c) for c in (5, 80)]
    out += [_radial(f"inv_sq_{b}", 0, 3, f"{b} * |r|^-2") for b in (0.2, 1.0, 3.0, 10.0, 40.0)]
    out.append(_radial("inv_sq_far", 2, 6, "25 * |r|^-2"))
    out.append(_radial("inv_sq_near", -4, -1, "60 * |r|^-2"))
    for cid, kw in (("alpha1_i", {"N": 1}), ("alpha1_i", {"N": 2}), ("alpha1_i", {"N": 3}),
                    ("alpha1_ii", {}), ("log3", {}), ("inverse_square", {})):
        out.append(C.build(cid, **kw).potential)
    return out


def test_c06_lower_vs_direct():
    t0 = time.perf_counter()
    corpus = radial_corpus()
    bad = []
    for V in corpus:
        ing = Bd.Ingredients(V)
        lower, _ = Bd.lower_bound_10pi(V, ing)
        direct = S.radial_eigencount(V, 1.0)
        if not _le(lower, direct.lower, 0.0) and not is_infinite(direct.upper):
            bad.append((V.name, "lower", lower, direct.lower))
        m0 = S.pruefer_count(S.SturmProblem(log_reduce(V)), 2.0)
        rad = Bd.rad_main_bound(V, ing)
        if not _le(m0.upper, rad, 0.0):
            bad.append((V.name, "radmain", m0.upper, rad))
    dt = time.perf_counter() - t0
    ok = len(corpus) == 20 and not bad and dt < 300
    record(6, ok, "lower vs direct sandwich", f"{len(corpus)} potentials, {len(bad)} violations in {dt:.1f}s")
    assert ok, bad


# ---------------------------------------------------------------------------
# 7


def test_c07_comparison_table():
    t0 = time.perf_counter()
    failed, inconsistent = [], []
    every = [e for e in Bd.ESTIMATES if e not in ("Lower10pi", "CKMW")]
    for cid in C.COMPARISON_IDS:
        c = C.build(cid)
        for r in C.verify_claims(c):
            if r["status"] != "pass":
                failed.append((cid, r["claim"], r["status"]))
        try:
            Bd.compare(c.potential, every, {"p": 2.0}, check=True)
        except Exception as exc:
            inconsistent.append((cid, type(exc).__name__, str(exc)))
    dt = time.perf_counter() - t0
    ok = not failed and not inconsistent and dt < 120
    record(7, ok, "comparison table",
           f"{len(C.COMPARISON_IDS)} constructions, {len(failed)} verdict mismatches, "
           f"{len(inconsistent)} diagram violations in {dt:.1f}s")
    assert ok, (failed, inconsistent)


# ---------------------------------------------------------------------------
# 8


def _random_cells(rng, n_max=12, mu_scale=1.0):
    n = int(rng.integers(1, n_max + 1))
    m = rng.uniform(0.02, 2.0, n) * mu_scale
    v = rng.exponential(1.0, n) * 10 ** rng.uniform(-1.5, 1.5)
    return m, v


def _B(s):
    return (1 + s) * np.log1p(s) - s


def _A(s):
    return np.expm1(s) - s


def test_c08_orlicz_properties():
    rng = np.random.default_rng(8)
    trials = 1000
    viol = {k: 0 for k in ("sandwich", "gauge", "holder", "avequiv", "avequivB", "pointwise")}
    psis = (LLogLB, ExpA, Power(1.5), Power(3.0))
    t0 = time.perf_counter()
    for i in range(trials):
        psi = psis[i % len(psis)]
        m, v = _random_cells(rng)
        if psi is ExpA:
            v = np.minimum(v, 5.0)
        f = MeasurableSample.piecewise_constant(m, v)
        lux = luxemburg_norm(f, psi)
        orl = orlicz_norm(f, psi)
        viol["sandwich"] += not (_le(lux, orl) and _le(orl, 2 * lux))
        k0 = 10 ** rng.uniform(-1, 1) * lux
        c0 = max(1.0, f.integrate(psi, 1.0 / k0))
        viol["gauge"] += not _le(lux, c0 * k0)

        m, v = _random_cells(rng)
        w = rng.exponential(1.0, len(m)) * 10 ** rng.uniform(-1, 0.5)
        f = MeasurableSample.piecewise_constant(m, v)
        g = MeasurableSample.piecewise_constant(m, w)
        lhs = float(np.dot(m, v * w))
        viol["holder"] += not _le(lhs, orlicz_norm(f, LLogLB) * luxemburg_norm(g, ExpA))

        m, v = _random_cells(rng, mu_scale=10 ** rng.uniform(-1, 1))
        f = MeasurableSample.piecewise_constant(m, v)
        mu = float(m.sum())
        orl, av = orlicz_norm(f, LLogLB), average_norm(f, LLogLB)
        viol["avequiv"] += not (_le(min(1, mu) * orl, av) and _le(av, max(1, mu) * orl))
        if mu > 1:
            viol["avequivB"] += not _le(av, orl + math.log(3.5 * mu) * float(np.dot(m, v)))
    # pointwise lemmas on the pair A, B
    s = np.concatenate([10 ** rng.uniform(-6, 6, trials), rng.uniform(0, 1, trials)])
    lnp = np.log(np.maximum(s, 1.0))
    B, A = _B(s), _A(np.minimum(s, 700))
    tol = SLACK * np.maximum(1, np.abs(B))
    viol["pointwise"] += int(np.sum(0.5 * s * lnp > B + tol) + np.sum(B > s + 2 * s * lnp + tol))
    u = s[trials:]
    viol["pointwise"] += int(np.sum(_B(u) > 0.5 * u * u + SLACK) + np.sum(0.5 * u * u > _A(u) + SLACK)
                             + np.sum(_A(u) > math.e / 2 * u * u + SLACK))
    sa = np.minimum(s, 700)
    viol["pointwise"] += int(np.sum(np.exp(sa) > (2 * _A(sa) + 1.5) * (1 + SLACK)))
    # dual representation against direct constrained maximisation
    worst = 0.0
    for _ in range(40):
        m, v = _random_cells(rng)
        f = MeasurableSample.piecewise_constant(m, v)
        d1 = dual_sup_direct(m, v, ExpA)
        d2 = dual_sup_direct(m, v, ExpA, level=float(m.sum()))
        worst = max(worst, abs(orlicz_norm(f, LLogLB) / d1 - 1), abs(average_norm(f, LLogLB) / d2 - 1))
    dt = time.perf_counter() - t0
    ok = not any(viol.values()) and worst <= 1e-6
    record(8, ok, "Orlicz properties",
           f"{trials} trials each, violations {viol}, dual vs direct rel err {worst:.1e} in {dt:.1f}s")
    assert ok


# ---------------------------------------------------------------------------
# 9


def test_c09_embedding_constant():
    t0 = time.perf_counter()
    ps = (1.1, 1.05, 1.01)
    vals = [embedding_constant_M(p)[0] * math.e * (p - 1) for p in ps]
    dt = time.perf_counter() - t0
    trend = all(abs(y - 1) < abs(x - 1) for x, y in zip(vals, vals[1:]))
    ok = all(0.8 <= x <= 1.2 for x in vals) and trend and dt < 5
    record(9, ok, "M(p) asymptotics",
           ", ".join(f"p={p}: {x:.4f}" for p, x in zip(ps, vals)) + f" (trend to 1: {trend}) in {dt:.2f}s")
    assert ok


# ---------------------------------------------------------------------------
# 10


def _slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def test_c10_sequence_lemma():
    rng = np.random.default_rng(10)
    bad = 0
    for _ in range(500):
        n = int(rng.integers(0, 60))
        kind = rng.integers(0, 3)
        if kind == 0:
            seq = rng.exponential(1.0, n)
        elif kind == 1:
            seq = 1.0 / (1 + np.arange(n)) ** rng.uniform(0.3, 2) * rng.uniform(0.1, 10)
        else:
            seq = np.where(rng.random(n) < 0.3, 0.0, rng.pareto(1.5, n))
        c = 10 ** rng.uniform(-2, 1)
        lhs = thresholded_sqrt_sum(list(seq), c)
        rhs = 2 / math.sqrt(c) * weak_l1(list(seq))
        bad += not _le(lhs, rhs)
    # (alph) <=> (s): both slopes recover q for a_n = n^(-1/q)
    worst = 0.0
    for q, sigma in ((1.0, 0.5), (2.0, 1.0), (0.5, 0.25)):
        n_max = 200000
        a = np.arange(1, n_max + 1, dtype=float) ** (-1 / q)
        c = 1.0
        alphas = np.geomspace(10.0, 0.3 * a[-1] ** -1, 12)
        sums = [a_ ** sigma * thresholded_sum(list(a), c / a_, sigma) for a_ in alphas]
        s_vals = np.geomspace(a[n_max // 20], 0.3, 12)
        cards = [int(np.sum(a > s)) for s in s_vals]
        worst = max(worst, abs(_slope(alphas, sums) - q), abs(-_slope(s_vals, cards) - q))
    ok = bad == 0 and worst <= 0.1
    record(10, ok, "sequence lemma", f"500 sequences, {bad} violations; worst slope error {worst:.3f}")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))

"""Right-hand sides of the eigenvalue-counting estimates and their comparison.

Each estimate bounds the number of negative eigenvalues of ``-Laplace - V`` on
the plane by ``1 + (constant) * (functional of V)``.  Only two of them carry
explicit constants (``RadMain`` and ``Lower10pi``); the others are evaluated
with every unknown universal constant set to 1 and listed as such in the
report.  Finite-versus-infinite verdicts do not depend on these constants,
which is what :func:`compare` checks against the implication diagram.
"""

from __future__ import annotations

import math
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import partition as P
from .errors import InconsistentVerdict, MissingDecayClass, MissingParameter, UnboundedLevelSet
from .orlicz import LLogLB, golden_section
from .potentials import (Potential, annulus_sample, kmw_phi, rearrange, weighted_integral,
                         _region_weighted_check, WEIGHTS)
from .values import Infinite, Unknown, Value, fmt, is_finite, status, to_json, vscale, vsum

__all__ = [
    "ESTIMATES", "BoundReport", "Ingredients", "evaluate", "evaluate_many", "rad_main_bound",
    "rad_main_bound_sharp", "lower_bound_10pi", "phi_kappa", "maximize_phi", "compare",
    "IMPLICATIONS", "implies", "reverse_triangle_check", "DEFAULT_C_A", "DEFAULT_C_B",
]

DEFAULT_C_A = 0.25
DEFAULT_C_B = 0.046

ESTIMATES = {
    "clCLR": "C (||V||_{LlogL, R^2} + int V ln(1+|x|)) + 1",
    "MV": "C (int_{V>=1} V ln V + int V ln(2+|x|)) + 1",
    "KMW_my": "C6 (int V ln(2+|x|) + int V_*(|x|) ln_+(1/|x|)) + 1",
    "KMW": "c1 int V_* ln_+(1/|x|) + c2 int V ln_+|x| + c3 int V + 1",
    "CKMW": "d1 int V_* ln_+(1/|x|) + d2 int V ln|x| + d3 int V + 1 (conjectured d's)",
    "GrigTalk": "1 + 4 sum_{A_n>1/4} sqrt(A_n) + C7 sum_{scriptB_n>c} scriptB_n",
    "Sol": "1 + C8 (||(boldA_n)_{n>=0}||_{1,inf} + sum_{n>=0} boldB_n)",
    "GrigNad": "1 + C7 sum_{A_n>c} sqrt(A_n) + C7 sum_{B_n>c} B_n",
    "LNS": "1 + 4 sum_{A_n>1/4} sqrt(A_n) + C9 sum_{D_n>c} D_n",
    "LNS2": "1 + C10 (||(A_n)||_{1,inf} + sum_n D_n)",
    "LNS3": "1 + C11 (||(A_n)||_{1,inf} + int (int V^p dth)^{1/p} r dr)",
    "LNS4": "1 + C12 (||(A_n)||_{1,inf} + int (int |V_N|^p dth)^{1/p} r dr)",
    "LNS5": "1 + C13 (||(A_n)||_{1,inf} + sum_n D_n(V_N))",
    "Laptev": "1 + 4 sum_{A_n>1/4} sqrt(A_n) + C23 sum_{G_n>c} G_n",
    "RadMain": "1 + 4 sum_{A_n>1/4} sqrt(A_n)",
    "Lower10pi": "(1/3) card{n : A_n >= 10 pi}",
}
_ALIASES = {k.lower(): k for k in ESTIMATES}
_NEEDS_P = ("GrigNad", "LNS3", "LNS4")

# X -> Y: the right-hand side of X is finite whenever that of Y is
_EDGES = [
    ("LNS", "LNS2"), ("LNS2", "LNS5"), ("LNS5", "LNS2"), ("LNS2", "LNS3"),
    ("LNS3", "LNS4"), ("LNS4", "LNS3"), ("LNS", "GrigTalk"), ("LNS2", "Sol"),
    ("Laptev", "GrigTalk"), ("GrigTalk", "Sol"), ("Sol", "clCLR"),
    ("clCLR", "KMW_my"), ("KMW_my", "KMW"), ("KMW", "clCLR"), ("KMW_my", "clCLR"),
    ("KMW", "KMW_my"), ("GrigTalk", "GrigNad"),
]


def _closure(edges) -> frozenset:
    nodes = {a for a, _ in edges} | {b for _, b in edges}
    reach = {n: {b for a, b in edges if a == n} for n in nodes}
    changed = True
    while changed:
        changed = False
        for n in nodes:
            new = set(reach[n])
            for m in reach[n]:
                new |= reach[m]
            new.discard(n)
            if new != reach[n]:
                reach[n] = new
                changed = True
    return frozenset((a, b) for a in nodes for b in reach[a])


IMPLICATIONS = _closure(_EDGES)


def implies(x: str, y: str) -> bool:
    """Does estimate ``x`` imply estimate ``y`` (transitively)?"""
    return (x, y) in IMPLICATIONS


def canonical(name: str) -> str:
    key = name.strip()
    if key in ESTIMATES:
        return key
    if key.lower() in _ALIASES:
        return _ALIASES[key.lower()]
    raise KeyError(f"unknown estimate {name!r}")


# ---------------------------------------------------------------------------
# Phi(kappa)


def phi_kappa(kappa: float) -> float:
    """Threshold below which a log-annulus carries no negative eigenvalue.

    ``Phi(k) = k/(4k+1) * (1 + s (2^s+1)/(2^s-1))^{-1}`` with ``s = sqrt(4k+1)``.
    """
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    s = math.sqrt(4 * kappa + 1)
    ratio = 1.0 / math.tanh(0.5 * s * math.log(2.0))  # (2^s+1)/(2^s-1)
    return kappa / (4 * kappa + 1) / (1.0 + s * ratio)


def maximize_phi(lo: float = 0.1, hi: float = 20.0) -> tuple:
    """``(kappa*, Phi(kappa*))`` by golden section."""
    x, fx = golden_section(lambda k: -phi_kappa(k), lo, hi, tol=1e-12)
    return x, -fx


# ---------------------------------------------------------------------------
# ingredients


_SHARED: "OrderedDict[int, tuple]" = OrderedDict()
_SHARED_MAX = 16
_SHARED_LOCK = threading.Lock()


def _shared_cache(V: Potential) -> dict:
    """One cache per potential object, so repeated evaluations reuse profiles and norms.

    Keys carry every parameter they depend on, so instances with different
    ``p`` can share it.  The object itself is held to keep ``id`` unambiguous.
    """
    with _SHARED_LOCK:
        hit = _SHARED.get(id(V))
        if hit is not None and hit[0] is V:
            _SHARED.move_to_end(id(V))
            return hit[1]
        cache: dict = {}
        _SHARED[id(V)] = (V, cache)
        while len(_SHARED) > _SHARED_MAX:
            _SHARED.popitem(last=False)
        return cache


class Ingredients:
    """Lazily computed and cached building blocks for one potential."""

    def __init__(self, V: Potential, p: Optional[float] = None):
        self.V = V
        self.p = p
        self._cache: dict = _shared_cache(V)

    def _get(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def profile(self, pid: str) -> P.AnnularProfile:
        p = self.p if pid in ("B_p", "Lp_slice", "Lp_slice_N") else None
        if pid in ("B_p", "Lp_slice", "Lp_slice_N") and p is None:
            raise MissingParameter(f"{pid} needs p")
        return self._get(("profile", pid, p), lambda: P.profile(self.V, pid, p=p))

    def weighted(self, weight: str) -> Value:
        return self._get(("w", weight), lambda: weighted_integral(self.V, weight))

    def plane_norm(self) -> Value:
        return self._get("plane_norm", self._plane_norm)

    def _plane_norm(self) -> Value:
        V = self.V
        if V.is_zero():
            return 0.0
        for reg in V.live_regions:
            try:
                why = _region_weighted_check(reg, WEIGHTS["One"], "B")
            except MissingDecayClass as exc:
                return Unknown(str(exc))
            if why:
                return Infinite("V not in LlogL(R^2): " + why)
        return P._norm(annulus_sample(V, -math.inf, math.inf), False)

    def rearranged(self):
        return self._get("rearr", lambda: rearrange(self.V))

    def kmw_term(self) -> Value:
        """``int V_*(|x|) ln_+(1/|x|) dx``."""
        return self._get("kmw", self._kmw)

    def _kmw(self) -> Value:
        if self.V.is_zero():
            return 0.0
        bad = _large_values_check(self.V)
        if bad is not None:
            return bad
        try:
            R = self.rearranged()
        except UnboundedLevelSet as exc:
            return Infinite(f"|{{V > s}}| infinite: {exc}")
        v = R.layer_integral(kmw_phi)
        return v if math.isfinite(v) else Unknown("layer-cake quadrature failed")

    def vlogv_term(self) -> Value:
        """``int_{V >= 1} V ln V dx``."""
        return self._get("vlogv", self._vlogv)

    def _vlogv(self) -> Value:
        if self.V.is_zero():
            return 0.0
        bad = _large_values_check(self.V)
        if bad is not None:
            return bad
        try:
            R = self.rearranged()
        except UnboundedLevelSet as exc:
            return Infinite(str(exc))
        if R.steps is not None:
            return sum((m - (R.steps[k - 1][1] if k else 0.0)) * v * math.log(v)
                       for k, (v, m) in enumerate(R.steps) if v >= 1)
        # int_{V>1} V ln V = int_1^inf (ln s + 1) mu(s) ds
        from scipy import integrate

        hi = math.log(R.sup) if math.isfinite(R.sup) else math.inf
        if hi <= 0:
            return 0.0
        val, _ = integrate.quad(lambda sg: (sg + 1.0) * R.mu(math.exp(sg)) * math.exp(sg), 0.0, hi,
                                limit=400, epsrel=1e-9)
        return val


def _large_values_check(V: Potential) -> Optional[Value]:
    """Infinite when ``{V > 1}`` has infinite measure or ``V ln V`` is not integrable on it."""
    for reg in V.live_regions:
        F, H = reg.radial, reg.angular
        f_unb, h_unb = [], []
        try:
            if reg.t_hi == math.inf:
                g = F.end_class("inf")
                if g.trend() != "zero":
                    return Infinite("V does not tend to zero at infinity")
            if reg.t_lo == -math.inf:
                g = F.end_class("origin")
                if g.trend() == "inf":
                    f_unb.append(("r->0", g, 1.0))
            for c in reg.radial_centers():
                g = F.end_class("center", math.exp(c))
                if g.trend() == "inf":
                    f_unb.append((f"r->{math.exp(c):g}", g, 0.0))
            for c in reg.angular_centers():
                g = H.end_class("center", c)
                if g.trend() == "inf":
                    h_unb.append((f"theta->{c:g}", g, 0.0))
        except MissingDecayClass as exc:
            return Unknown(str(exc))
        if f_unb and h_unb:
            return Unknown("both factors unbounded: VlnV integrability not decided by exponents")
        for label, g, m in f_unb + h_unb:
            comp = g.times(g.log_factor())
            if not comp.integrable(m):
                return Infinite(f"V ln V not integrable near {label}: {comp.describe()}")
    return None


# ---------------------------------------------------------------------------
# reports


@dataclass
class BoundReport:
    """Evaluated right-hand side of one estimate.

    ``constants`` lists ``(symbol, status, value)``; unknown constants are
    displayed with value 1.  ``ingredients`` lists ``(name, value)``.
    """

    estimate: str
    value: Value
    constants: list = field(default_factory=list)
    thresholds: dict = field(default_factory=dict)
    ingredients: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def status(self) -> str:
        return status(self.value)

    @property
    def unknown_constants(self) -> list:
        return [s for s, st, _ in self.constants if st == "unknown"]

    def to_json(self) -> dict:
        v = self.value
        out = {
            "estimate": self.estimate,
            "value": "inf" if isinstance(v, Infinite) else "unknown" if isinstance(v, Unknown) else fmt(v),
            "status": self.status,
            "constants": [{"symbol": s, "status": st, "value": fmt(val)} for s, st, val in self.constants],
            "thresholds": {k: fmt(x) for k, x in sorted(self.thresholds.items())},
            "ingredients": [dict(name=n, **to_json(x)) for n, x in self.ingredients],
        }
        if isinstance(v, (Infinite, Unknown)):
            out["reason"] = v.reason
        if isinstance(v, Unknown):
            out["partial"] = fmt(v.partial)
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _one_plus(*terms: Value) -> Value:
    return vsum([1.0, *terms])


def _unknown(sym: str) -> tuple:
    return (sym, "unknown", 1.0)


def evaluate(V: Potential, estimate: str, params: Optional[dict] = None,
             ingredients: Optional[Ingredients] = None) -> BoundReport:
    """Evaluate the right-hand side of ``estimate`` for ``V``.

    ``params`` may hold ``p`` (needed by GrigNad, LNS3, LNS4), ``c_A`` and
    ``c`` (thresholds, defaults 1/4 and 0.046).
    """
    est = canonical(estimate)
    params = dict(params or {})
    p = params.get("p")
    if est in _NEEDS_P and p is None:
        raise MissingParameter(f"estimate {est} needs p > 1")
    if p is not None and not p > 1:
        raise ValueError("p must exceed 1")
    ing = ingredients if ingredients is not None else Ingredients(V, p)
    if ing.p is None and p is not None:
        ing.p = p
    c_a = float(params.get("c_A", DEFAULT_C_A))
    c_b = float(params.get("c", DEFAULT_C_B))
    rep = BoundReport(est, 0.0)

    def a_part(name="A"):
        prof = ing.profile(name)
        s = P.thresholded_sqrt_sum(prof, c_a)
        rep.ingredients.append((f"sum_{{{name}_n>{c_a:g}}} sqrt({name}_n)", s))
        rep.thresholds["c_A"] = c_a
        return s

    def weak(name="A"):
        w = P.weak_l1(ing.profile(name))
        rep.ingredients.append((f"||{name}||_1,inf", w))
        return w

    if est == "clCLR":
        n1, n2 = ing.plane_norm(), ing.weighted("Log1p")
        rep.ingredients += [("||V||_LlogL(R^2)", n1), ("int V ln(1+|x|)", n2)]
        rep.constants.append(_unknown("C"))
        rep.value = _one_plus(vsum([n1, n2]))
    elif est == "MV":
        n1, n2 = ing.vlogv_term(), ing.weighted("Log2p")
        rep.ingredients += [("int_{V>=1} V ln V", n1), ("int V ln(2+|x|)", n2)]
        rep.constants.append(_unknown("C"))
        rep.value = _one_plus(vsum([n1, n2]))
    elif est == "KMW_my":
        n1, n2 = ing.weighted("Log2p"), ing.kmw_term()
        rep.ingredients += [("int V ln(2+|x|)", n1), ("int V_* ln_+(1/|x|)", n2)]
        rep.constants.append(_unknown("C6"))
        rep.value = _one_plus(vsum([n1, n2]))
    elif est == "KMW":
        n1, n2, n3 = ing.kmw_term(), ing.weighted("LogPlusAbs"), ing.weighted("One")
        rep.ingredients += [("int V_* ln_+(1/|x|)", n1), ("int V ln_+|x|", n2), ("int V", n3)]
        rep.constants += [_unknown("c1"), _unknown("c2"), _unknown("c3")]
        rep.value = _one_plus(n1, n2, n3)
    elif est == "CKMW":
        d1, d2, d3 = 2 / (2 * math.pi), 1 / (2 * math.pi), 2 / math.sqrt(3) / (2 * math.pi)
        n1 = ing.kmw_term()
        pos, neg = ing.weighted("LogPlusAbs"), ing.weighted("LogPlusInv")
        if is_finite(pos) and is_finite(neg):
            n2 = pos - neg
        elif isinstance(pos, Infinite) and is_finite(neg):
            n2 = pos
        elif isinstance(neg, Infinite) and is_finite(pos):
            n2 = Unknown("int V ln|x| diverges to -inf")
        else:
            n2 = Unknown("int V ln|x| undetermined")
        n3 = ing.weighted("One")
        rep.ingredients += [("int V_* ln_+(1/|x|)", n1), ("int V ln|x|", n2), ("int V", n3)]
        rep.constants += [("d1", "conjectured", d1), ("d2", "conjectured", d2), ("d3", "conjectured", d3)]
        rep.notes.append("second integral may be negative; constants are the conjectured 2 pi d = (2, 1, 2/sqrt 3)")
        if isinstance(n2, Unknown) or not is_finite(n2):
            rep.value = n2 if isinstance(n2, (Infinite, Unknown)) else n2
            if isinstance(n1, Infinite) or isinstance(n3, Infinite):
                rep.value = Infinite("a nonnegative term diverges")
        else:
            parts = [vscale(d1, n1), vscale(d3, n3)]
            s = vsum(parts)
            rep.value = (1.0 + s + d2 * n2) if is_finite(s) else s
    elif est in ("GrigTalk", "LNS", "Laptev"):
        pid, sym = {"GrigTalk": ("scriptB", "C7"), "LNS": ("D", "C9"), "Laptev": ("G", "C23")}[est]
        a = a_part()
        b = P.thresholded_sum(ing.profile(pid), c_b)
        rep.ingredients.append((f"sum_{{{pid}_n>{c_b:g}}} {pid}_n", b))
        rep.thresholds["c"] = c_b
        rep.constants.append(_unknown(sym))
        rep.value = _one_plus(vscale(4.0, a), b)
    elif est == "Sol":
        w = weak("boldA")
        s = P.profile_sum(ing.profile("boldB"))
        rep.ingredients.append(("sum_{n>=0} boldB_n", s))
        rep.constants.append(_unknown("C8"))
        rep.value = _one_plus(vsum([w, s]))
    elif est == "GrigNad":
        prof = ing.profile("A")
        a = P.thresholded_sqrt_sum(prof, c_a)
        rep.ingredients.append((f"sum_{{A_n>{c_a:g}}} sqrt(A_n)", a))
        b = P.thresholded_sum(ing.profile("B_p"), c_b)
        rep.ingredients.append((f"sum_{{B_n>{c_b:g}}} B_n (p={p:g})", b))
        rep.thresholds.update({"c_A": c_a, "c": c_b, "p": p})
        rep.constants.append(_unknown("C7"))
        rep.value = _one_plus(a, b)
    elif est in ("LNS2", "LNS3", "LNS4", "LNS5"):
        pid, sym = {"LNS2": ("D", "C10"), "LNS3": ("Lp_slice", "C11"), "LNS4": ("Lp_slice_N", "C12"),
                    "LNS5": ("D_N", "C13")}[est]
        w = weak("A")
        s = P.profile_sum(ing.profile(pid))
        rep.ingredients.append((f"sum_n {pid}_n" + (f" (p={p:g})" if pid.startswith("Lp") else ""), s))
        if pid.startswith("Lp"):
            rep.thresholds["p"] = p
        rep.constants.append(_unknown(sym))
        rep.value = _one_plus(vsum([w, s]))
    elif est == "RadMain":
        a = a_part()
        rep.constants.append(("4", "explicit", 4.0))
        rep.value = _one_plus(vscale(4.0, a))
    elif est == "Lower10pi":
        val, cnt = _lower(ing)
        rep.ingredients.append(("card{A_n >= 10 pi}", cnt))
        rep.constants.append(("1/3", "explicit", 1.0 / 3.0))
        rep.thresholds["level"] = 10 * math.pi
        rep.value = val
    else:  # pragma: no cover
        raise AssertionError(est)
    return rep


def evaluate_many(V: Potential, estimates: Sequence[str], params: Optional[dict] = None) -> list:
    params = dict(params or {})
    ing = Ingredients(V, params.get("p"))
    return [evaluate(V, e, params, ing) for e in estimates]


def rad_main_bound(V: Potential, ingredients: Optional[Ingredients] = None) -> Value:
    """``1 + 4 sum_{A_n > 1/4} sqrt(A_n)`` (explicit constants)."""
    return evaluate(V, "RadMain", {}, ingredients).value


def rad_main_bound_sharp(V: Potential, ingredients: Optional[Ingredients] = None) -> Value:
    """The sharper variant ``1 + 3.04 sum_{A_n > 0.29} sqrt(A_n)``."""
    ing = ingredients or Ingredients(V)
    s = P.thresholded_sqrt_sum(ing.profile("A"), 0.29)
    return _one_plus(vscale(3.04, s))


def _lower(ing: Ingredients) -> tuple:
    prof = ing.profile("A")
    level = 10 * math.pi
    cnt = 0
    for _, v in prof.items():
        if isinstance(v, Infinite):
            cnt += 1
        elif isinstance(v, Unknown):
            return Unknown("entry undetermined", cnt / 3.0), Unknown("entry undetermined", cnt)
        elif v >= level:
            cnt += 1
    for side, tc in prof.tails.items():
        if tc.empty:
            continue
        tr = tc.cls.trend()
        if tr == "inf" or (tr == "const" and tc.limit is not None and tc.limit >= level):
            inf = Infinite("infinitely many A_n >= 10 pi")
            return inf, inf
    return cnt / 3.0, cnt


def lower_bound_10pi(V: Potential, ingredients: Optional[Ingredients] = None) -> tuple:
    """``((1/3) card{A_n >= 10 pi}, card)``."""
    return _lower(ingredients or Ingredients(V))


# ---------------------------------------------------------------------------
# comparison


def compare(V: Potential, estimates: Sequence[str], params: Optional[dict] = None,
            *, check: bool = True) -> list:
    """Verdicts per estimate, checked against the implication diagram.

    Returns ``[(estimate, BoundReport)]`` in the given order.

    Raises
    ------
    InconsistentVerdict
        If a stronger estimate is infinite while a weaker one is finite.
    """
    params = dict(params or {})
    ing = Ingredients(V, params.get("p"))
    reps = [(canonical(e), evaluate(V, e, params, ing)) for e in estimates]
    if check:
        check_consistency(reps)
    return reps


def check_consistency(reps) -> None:
    verdict = {e: r.status for e, r in reps}
    for x, vx in verdict.items():
        for y, vy in verdict.items():
            if implies(x, y) and vx == "infinite" and vy == "finite":
                raise InconsistentVerdict(f"{x} is infinite while the weaker {y} is finite")


# ---------------------------------------------------------------------------
# reverse triangle inequality for ring norms


def reverse_triangle_check(V: Potential) -> dict:
    """Both sides of the ring-norm inequality, with the proof's explicit constant.

    For ``W = V / lam`` normalised by the Luxemburg norm on ``|x| > e`` the
    proof gives ``sum_{n>=1} ||W||_{LlogL, ring_n} <= pi^2/3 + 8 +
    2 int_{|x|>e} W (1 + 4 ln ln|x|)``.  Returned in the original scaling.
    """
    from .orlicz import luxemburg_norm

    regs = [r.clipped(1.0, math.inf) for r in V.live_regions]
    Vout = Potential(tuple(r for r in regs if r is not None))
    if Vout.is_zero():
        return {"lhs": 0.0, "rhs": 0.0, "lux": 0.0}
    lam = luxemburg_norm(annulus_sample(Vout, 1.0, math.inf), LLogLB)
    prof = P.profile(Vout, "orlicz_ring")
    lhs = P.profile_sum(prof)
    one = weighted_integral(Vout, "One", t_range=(1.0, math.inf))
    ll = weighted_integral(Vout, "LogLog", t_range=(1.0, math.inf))
    rhs = vsum([lam * (math.pi ** 2 / 3 + 8), vscale(2.0, one), vscale(8.0, ll)])
    return {"lhs": lhs, "rhs": rhs, "lux": lam}

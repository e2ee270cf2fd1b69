"""Negative-eigenvalue counts for one-dimensional reductions.

The count of negative eigenvalues of ``-u'' - (alpha*G + shift) u`` is read
off the Pruefer phase of the zero-energy solution: the solution satisfying
the left boundary condition is shot across the interval and the number of
times its phase passes the right boundary angle is the count.  Semi-infinite
ends are truncated at a cutoff where the neglected tail is replaced by Robin
conditions bracketing its energy from both sides, so every count comes with an
integer interval ``lower <= count <= upper``.

Boundary conditions are ratios ``u'/u`` at the end point: ``+inf`` on the
left and ``-inf`` on the right are Dirichlet, ``0`` is Neumann.  The names
``"dirichlet"``, ``"neumann"`` and ``"free"`` are accepted; ``"free"`` means
that ``G`` vanishes beyond the end and the decaying (or bounded) continuation
is used, which is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import _kernels as K
from .errors import BracketGap, InvalidParameters, InvalidPotential
from .potentials import LogProfile, Potential, log_reduce, profile_from_g, Formula, _point, _y_of, _seg_t_range
from .values import Infinite, fmt

__all__ = [
    "SturmProblem", "EigencountResult", "dirichlet_count", "pruefer_count", "zero_count",
    "cutoff_counts", "radial_eigencount", "mode_cutoff", "inverse_square_problem",
    "sharp_sobolev_C", "sharp_sobolev_C_at", "sobolev_extremizer", "sharp_sobolev_C0",
    "sharp_sobolev_C0_at", "sobolev_C0_extremizer", "grid_rayleigh_max", "SobolevConstant",
    "InverseSquareChain", "chain_count", "chain_zero_count",
]

BC = Union[str, float]
_ATOL = 1e-11


def dirichlet_count(a: float, b: float, beta: float) -> int:
    """Closed-form count for ``-u'' - beta u / t^2`` on ``(a, b)`` with Dirichlet ends.

    Zero when ``beta <= 1/4 + (pi/ln(b/a))^2`` and ``N`` when
    ``1/4 + (N pi/ln(b/a))^2 < beta <= 1/4 + ((N+1) pi/ln(b/a))^2``.
    """
    if not 0 < a < b:
        raise InvalidParameters("need 0 < a < b")
    if beta <= 0.25:
        return 0
    L = math.log(b / a)
    x = math.sqrt(beta - 0.25) * L / math.pi
    n = math.ceil(x) - 1
    # the thresholds are inclusive on the lower side
    while n >= 1 and not beta > 0.25 + (n * math.pi / L) ** 2:
        n -= 1
    while beta > 0.25 + ((n + 1) * math.pi / L) ** 2:
        n += 1
    return max(n, 0)


@dataclass
class SturmProblem:
    """``E[u] = int |u'|^2 - int (alpha G + shift) |u|^2`` on ``(a, b)``.

    ``profile`` holds ``G >= 0``; ``shift`` is a constant (``-m^2`` for the
    angular mode ``m``).  ``left``/``right`` are boundary conditions as
    described in the module docstring.
    """

    profile: LogProfile
    a: float = -math.inf
    b: float = math.inf
    left: BC = "free"
    right: BC = "free"
    shift: float = 0.0
    label: str = ""

    def __post_init__(self):
        if not self.a < self.b:
            raise InvalidParameters("need a < b")
        if self.shift > 0:
            raise InvalidParameters("shift must be nonpositive")
        if not self.profile.kernel_ready:
            raise InvalidPotential("profiles with offset disks cannot be shot; use a radial potential")
        for end, bc in (("left", self.left), ("right", self.right)):
            if isinstance(bc, str) and bc not in ("dirichlet", "neumann", "free"):
                raise InvalidParameters(f"unknown {end} boundary condition {bc!r}")
        if math.isinf(self.a) and self.left not in ("free",):
            raise InvalidParameters("an infinite end needs the 'free' condition")
        if math.isinf(self.b) and self.right not in ("free",):
            raise InvalidParameters("an infinite end needs the 'free' condition")


@dataclass
class EigencountResult:
    """Count with its Dirichlet/Robin bracket and truncation data."""

    count: Union[int, Infinite, None]
    lower: Union[int, Infinite]
    upper: Union[int, Infinite, None]
    method: str
    cutoffs: dict = field(default_factory=dict)
    m_max: Optional[int] = None
    justification: str = ""
    modes: list = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.count is not None

    def to_json(self) -> dict:
        def j(v):
            if isinstance(v, Infinite):
                return "inf"
            return v

        out = {
            "count": j(self.count), "lower": j(self.lower), "upper": j(self.upper),
            "method": self.method,
            "cutoffs": {k: fmt(v) if isinstance(v, float) else v for k, v in sorted(self.cutoffs.items())},
            "justification": self.justification,
        }
        if isinstance(self.count, Infinite):
            out["reason"] = self.count.reason
        if self.m_max is not None:
            out["m_max"] = self.m_max
        if self.modes:
            out["modes"] = [{"m": m, "lower": j(lo), "upper": j(hi)} for m, lo, hi in self.modes]
        return out


# ---------------------------------------------------------------------------
# shooting


def _end_ratio(bc: BC, side: str, shift: float) -> float:
    if bc == "dirichlet":
        return math.inf if side == "left" else -math.inf
    if bc == "neumann":
        return 0.0
    if bc == "free":
        m = math.sqrt(-shift)
        return m if side == "left" else -m
    return float(bc)


def _angle(coord: int, center: float, k: float, t: float, y: float, ratio: float, over_t: bool) -> float:
    """Scaled Pruefer angle in ``[0, pi]`` of a solution with ``u'/u = ratio`` (or ``ratio/t``)."""
    if math.isinf(ratio):
        return 0.0 if ratio > 0 else math.pi
    if coord == 0:
        r = ratio / t if over_t else ratio
    else:
        x = math.exp(y) if coord == 1 else math.exp(-y)
        if over_t:
            xt = 1.0 if center == 0.0 else x / t
            xr = xt * ratio
        else:
            xr = x * ratio
        r = xr - 0.5 if coord == 1 else xr + 0.5
    return math.atan2(1.0, r / k)


class _Plan:
    """Pieces of a profile clipped to ``[t_lo, t_hi]`` with gaps filled in."""

    def __init__(self, prof: LogProfile, t_lo: float, t_hi: float, alpha: float, shift: float):
        self.items = []
        segs = []
        for i in range(len(prof.pieces)):
            a, b = prof.t_range(i)
            lo, hi = max(a, t_lo), min(b, t_hi)
            if lo < hi:
                segs.append((lo, hi, i))
        segs.sort()
        cur = t_lo
        for lo, hi, i in segs:
            if lo > cur:
                self.items.append(("gap", cur, lo))
            coord, c, ylo, yhi = prof.seg(i)
            y0 = max(ylo, _y_of(coord, c, lo)) if math.isfinite(lo) else ylo
            y1 = min(yhi, _y_of(coord, c, hi)) if math.isfinite(hi) else yhi
            if coord == 1 and lo == c:
                y0 = ylo
            if coord == 2 and hi == c:
                y1 = yhi
            self.items.append(("piece", i, coord, c, y0, y1))
            cur = max(cur, hi)
        if cur < t_hi:
            self.items.append(("gap", cur, t_hi))
        self.prof = prof
        self.alpha = alpha
        self.shift = shift

    def scale(self, i, coord, c, y0, y1) -> float:
        P = self.prof.pieces
        a = y0 if math.isfinite(y0) else y1 - 1.0
        b = y1 if math.isfinite(y1) else y0 + 1.0
        qs = []
        for y in (a, 0.5 * (a + b), b):
            q = K.local_q(float(y), coord, c, self.prof.terms, int(P[i, 4]), int(P[i, 5]), self.prof.atoms,
                          self.alpha, self.shift)
            if math.isfinite(q):
                qs.append(abs(q))
        if not qs:
            return 1.0
        qm = sorted(qs)[len(qs) // 2]
        if qm < 1e-280 or qm > 1e280:
            return 1.0
        return math.sqrt(qm)


def _gap_step(phi: float, length: float, w: float) -> float:
    """Advance a plain phase across an interval where the coefficient is the constant ``w <= 0``."""
    n = math.floor(phi / math.pi)
    psi = phi - n * math.pi
    s, c = math.sin(psi), math.cos(psi)
    if w == 0.0:
        u1, d1 = s + length * c, c
    else:
        m = math.sqrt(-w)
        e = math.exp(-2.0 * m * length) if m * length < 350 else 0.0
        # common factor exp(m*length)/2 dropped
        u1 = (s + c / m) + (s - c / m) * e
        d1 = (m * s + c) - (m * s - c) * e
    if u1 >= 0:
        out = math.atan2(u1, d1)
        if out < 0:
            out += math.pi
        return n * math.pi + out
    return (n + 1) * math.pi + math.atan2(-u1, -d1) % math.pi


def _shoot(prof: LogProfile, alpha: float, shift: float, t_lo: float, t_hi: float,
           left_ratio: float, atol: float = _ATOL, left_over_t: bool = False):
    """Shoot from ``t_lo`` to ``t_hi``; returns ``(phase, coord, center, k, t_end, y_end)``.

    The phase starts in ``[0, pi)`` and is expressed in the coordinate and
    scale of the final item (plain with ``k = 1`` after a gap).
    """
    plan = _Plan(prof, t_lo, t_hi, alpha, shift)
    phi = None
    coord, center, k, t_cur, y_cur = 0, 0.0, 1.0, t_lo, t_lo
    P = prof.pieces
    for it in plan.items:
        if it[0] == "gap":
            _, a, b = it
            if phi is None:
                phi = _angle(0, 0.0, 1.0, a, a, left_ratio, left_over_t)
            else:
                phi = K.convert_phase(phi, coord, center, k, 0, 0.0, 1.0, a)
            if not (math.isfinite(a) and math.isfinite(b)):
                raise InvalidParameters("an unbounded gap cannot be crossed; give a finite cutoff")
            phi = _gap_step(phi, b - a, shift)
            coord, center, k, t_cur, y_cur = 0, 0.0, 1.0, b, b
            continue
        _, i, cd, c, y0, y1 = it
        kk = plan.scale(i, cd, c, y0, y1)
        t0, *_ = _point(cd, c, y0)
        if phi is None:
            phi = _angle(cd, c, kk, t0, y0, left_ratio, left_over_t)
        else:
            phi = K.convert_phase(phi, coord, center, k, cd, c, kk, t0)
        phi, _, _ = K.integrate_phase(phi, y0, y1, cd, c, prof.terms, int(P[i, 4]), int(P[i, 5]),
                                      prof.atoms, alpha, shift, kk, atol, 0.0)
        if not math.isfinite(phi):
            raise BracketGap("phase integration failed", None, None)
        coord, center, k = cd, c, kk
        y_cur = y1
        t_cur, *_ = _point(cd, c, y1)
    if phi is None:
        raise InvalidParameters("empty interval")
    return phi, coord, center, k, t_cur, y_cur


def _count_from(phi: float, phi_r: float) -> int:
    x = (phi - phi_r) / math.pi
    return max(0, math.ceil(x - 1e-13)) if x > 1e-13 else 0


def _shoot_count(prof, alpha, shift, t_lo, t_hi, lr, rr, atol=_ATOL, l_over_t=False, r_over_t=False) -> int:
    phi, cd, c, k, t_end, y_end = _shoot(prof, alpha, shift, t_lo, t_hi, lr, atol, l_over_t)
    return _count_from(phi, _angle(cd, c, k, t_end, y_end, rr, r_over_t))


def zero_count(profile: LogProfile, alpha: float, t_lo: float, t_hi: float, *, shift: float = 0.0,
               left: BC = "dirichlet", atol: float = _ATOL) -> int:
    """Zeros in the open interval ``(t_lo, t_hi)`` of the zero-energy solution with the left condition."""
    phi, *_ = _shoot(profile, alpha, shift, t_lo, t_hi, _end_ratio(left, "left", shift), atol)
    # zeros are crossings of multiples of pi after the start
    return max(0, math.ceil(phi / math.pi - 1e-13) - 1) if phi > 0 else 0


# ---------------------------------------------------------------------------
# tail brackets


def _hardy_mu(c: float) -> float:
    # smaller root of mu^2 - mu + c = 0
    return 0.5 * (1.0 - math.sqrt(max(0.0, 1.0 - 4.0 * c)))


def _right_tail(prof: LogProfile, alpha: float, shift: float, T: float):
    """``(ratio_lo_count, ratio_hi_count, over_t, note)`` for the tail beyond ``T``.

    Ratios are ``u'/u`` at ``T`` (times ``T`` when ``over_t``); the first
    gives a lower bound on the count, the second an upper bound.  Returns
    ``None`` for the upper ratio when the tail is not certified subcritical.
    """
    end = _support(prof)[1]
    tail = prof.tail
    if shift < 0:
        m = math.sqrt(-shift)
        _, s = prof.extrema(T, math.inf)
        if tail is not None:
            s = max(s, tail[1] / (T * T)) if T > 0 else math.inf
        s *= alpha
        if s < m * m:
            return -m, -math.sqrt(m * m - s), False, f"sup alpha G beyond cutoff {s:.3g} < m^2"
        return -m, None, False, "tail potential exceeds m^2"
    if T <= 0:
        return 0.0, None, True, "cutoff must be positive for the Hardy tail bound"
    if tail is None:
        lo2, hi2 = prof.extrema(T, math.inf, weight="t2")
    elif T >= end:
        lo2, hi2 = tail
    else:
        lo2, hi2 = prof.extrema(T, end, weight="t2")
        lo2, hi2 = min(lo2, tail[0]), max(hi2, tail[1])
    c_lo, c_hi = alpha * lo2, alpha * hi2
    # the mass of the described part is a lower bound for the whole tail
    mass = alpha * prof.integrate(t_lo=T)
    lam_lo = T * mass
    if c_lo < 0.25:
        lam_lo = max(lam_lo, _hardy_mu(c_lo))
    if c_hi < 0.25:
        return lam_lo, _hardy_mu(c_hi), True, f"alpha t^2 G in [{c_lo:.6g}, {c_hi:.6g}] beyond cutoff"
    if c_lo > 0.25:
        return lam_lo, math.inf, True, f"alpha t^2 G >= {c_lo:.6g} > 1/4 beyond cutoff: oscillatory tail"
    return lam_lo, None, True, f"alpha t^2 G reaches {c_hi:.6g} >= 1/4 beyond cutoff"


def _left_tail(prof: LogProfile, alpha: float, shift: float, ts: float):
    """Ratios at ``ts`` (left end) for lower and upper counts, or ``None`` if not certified."""
    if shift < 0:
        m = math.sqrt(-shift)
        _, s = prof.extrema(-math.inf, ts)
        s *= alpha
        if s < m * m:
            return m, math.sqrt(m * m - s), f"sup alpha G before cutoff {s:.3g} < m^2"
        return m, None, "tail potential exceeds m^2"
    mass = alpha * prof.integrate(t_hi=ts)
    J = alpha * prof.integrate(lambda t, *_: math.log(ts - t) if t < ts else -math.inf, t_hi=ts)
    if J < 1:
        return -mass, -mass / (1.0 - J), f"left tail mass {mass:.3g}, moment {J:.3g}"
    return -mass, None, f"left tail moment {J:.3g} >= 1"


def _support(prof: LogProfile) -> tuple:
    lo, hi = math.inf, -math.inf
    for i in range(len(prof.pieces)):
        if prof.pieces[i, 5] > prof.pieces[i, 4]:
            a, b = prof.t_range(i)
            lo, hi = min(lo, a), max(hi, b)
    return lo, hi


def _finite_breaks(prof: LogProfile) -> list:
    out = []
    for i in range(len(prof.pieces)):
        out += [x for x in prof.t_range(i) if math.isfinite(x)]
    return sorted(out)


def pruefer_count(problem: SturmProblem, alpha: float = 1.0, *, atol: float = _ATOL,
                  cutoff: Optional[float] = None, max_refine: int = 8) -> EigencountResult:
    """Count negative eigenvalues of the problem with coupling ``alpha``.

    Raises
    ------
    BracketGap
        If truncation brackets do not meet after ``max_refine`` refinements.
    """
    if alpha < 0:
        raise InvalidParameters("alpha must be nonnegative")
    prof, shift = problem.profile, problem.shift
    s_lo, s_hi = _support(prof)
    if alpha == 0 or prof.is_zero() or s_lo >= s_hi:
        # free operator: no negative spectrum; Robin ends handled by shooting below
        if problem.left in ("free", "dirichlet", "neumann") and problem.right in ("free", "dirichlet", "neumann"):
            return EigencountResult(0, 0, 0, "pruefer", justification="no potential")
    a, b = problem.a, problem.b
    # effective interval: outside the support the free continuation is exact
    left_exact = math.isfinite(a) or s_lo > -math.inf
    right_exact = math.isfinite(b) or (s_hi < math.inf and prof.tail is None)
    t_lo = a if math.isfinite(a) else s_lo
    t_hi = b if math.isfinite(b) else s_hi
    if math.isfinite(a) and problem.left == "free" and s_lo > a:
        t_lo = s_lo
    if math.isfinite(b) and problem.right == "free" and s_hi < b:
        t_hi = s_hi
    lr = _end_ratio(problem.left, "left", shift)
    rr = _end_ratio(problem.right, "right", shift)
    cut = {}
    if left_exact and right_exact:
        n = _shoot_count(prof, alpha, shift, t_lo, t_hi, lr, rr, atol)
        cut.update(t_lo=t_lo, t_hi=t_hi)
        return EigencountResult(n, n, n, "pruefer", cut, justification="exact continuation beyond the support")

    breaks = _finite_breaks(prof)
    ts0 = t_lo if left_exact else (min(breaks) if breaks else 0.0)
    T0 = t_hi if right_exact else max([1.0, ts0 + 1.0] + breaks)
    note = []
    last = None
    for j in range(max_refine + 1):
        ts = ts0 if left_exact else ts0 - 4.0 * 2 ** j
        if right_exact:
            T = T0
        elif prof.tail is not None:
            # nothing is known beyond the described part except the tail bound
            T = s_hi
        else:
            T = T0 if cutoff is None else max(cutoff, T0)
            T = T * math.exp(2.0 * 2 ** j) if j else T
        # left
        if left_exact:
            llo = lhi = lr
            lnote = ""
        else:
            llo, lhi, lnote = _left_tail(prof, alpha, shift, ts)
        # right
        if right_exact:
            rlo = rhi = rr
            rover = False
            rnote = ""
        else:
            rlo, rhi, rover, rnote = _right_tail(prof, alpha, shift, T)
        phi, cd, c, k, t_end, y_end = _shoot(prof, alpha, shift, ts, T, llo, atol)
        n_lo = _count_from(phi, _angle(cd, c, k, t_end, y_end, rlo, rover))
        if lhi is None or rhi is None:
            n_hi = None
        elif rhi == math.inf:
            n_hi = Infinite(rnote)
        else:
            if lhi != llo:
                phi, cd, c, k, t_end, y_end = _shoot(prof, alpha, shift, ts, T, lhi, atol)
            n_hi = _count_from(phi, _angle(cd, c, k, t_end, y_end, rhi, rover))
        cut = {"t_left": ts, "t_right": T, "refinements": j}
        note = [x for x in (lnote, rnote) if x]
        last = (n_lo, n_hi)
        if isinstance(n_hi, Infinite):
            return EigencountResult(n_hi, n_lo, n_hi, "pruefer", cut, justification="; ".join(note))
        if n_hi is not None and n_lo == n_hi:
            return EigencountResult(n_lo, n_lo, n_hi, "pruefer", cut, justification="; ".join(note))
        if left_exact and prof.tail is not None:
            break
    n_lo, n_hi = last
    raise BracketGap(f"brackets [{n_lo}, {n_hi}] did not meet: {'; '.join(note)}", n_lo, n_hi)


def cutoff_counts(profile: LogProfile, alpha: float, t_lo: float, cutoffs: Sequence[float], *,
                  shift: float = 0.0, left: BC = "free") -> list:
    """Dirichlet-truncated counts on ``(t_lo, T)`` for each cutoff ``T`` (lower bounds)."""
    lr = _end_ratio(left, "left", shift)
    return [_shoot_count(profile, alpha, shift, t_lo, T, lr, -math.inf) for T in cutoffs]


def inverse_square_problem(a: float, b: float, beta: float) -> SturmProblem:
    """``-u'' - beta u/t^2`` on ``(a, b)`` with Dirichlet ends, as a shooting problem."""
    if not 0 < a < b:
        raise InvalidParameters("need 0 < a < b")
    f = Formula.parse(f"{beta!r} * L(|r|)^-2", "r") if beta > 0 else Formula("r", 0.0, ())
    prof = profile_from_g([("s", math.log(a), math.log(b), f)])
    return SturmProblem(prof, a, b, "dirichlet", "dirichlet", label=f"beta/t^2 on ({a:g}, {b:g})")


# ---------------------------------------------------------------------------
# radial potentials


def mode_cutoff(prof: LogProfile, alpha: float) -> int:
    """Smallest ``M`` with ``m^2 - 1/4 >= alpha * sup G`` for all ``m >= M`` (Hardy comparison)."""
    _, s = prof.extrema(-math.inf, math.inf)
    s *= alpha
    if not math.isfinite(s):
        raise InvalidPotential("the reduced potential is unbounded; mode cutoff undefined")
    return max(1, math.ceil(math.sqrt(s + 0.25) - 1e-12)) if s > 0.75 else 1


def radial_eigencount(V: Union[Potential, LogProfile], alpha: float = 1.0, *, m_max: Optional[int] = None,
                      atol: float = _ATOL) -> EigencountResult:
    """Negative eigenvalues of ``-Laplace - alpha V`` for radial ``V`` (or a reduced profile ``G``).

    Sums the angular modes ``m = 0, +-1, ...``; each mode is the line problem
    ``-u'' + m^2 u - alpha G u`` in ``t = ln r``.  Modes with
    ``m^2 - 1/4 >= alpha sup G`` are nonnegative by the Hardy comparison and
    are not computed.
    """
    if isinstance(V, Potential):
        if not V.is_radial:
            raise InvalidPotential("radial_eigencount needs a radial potential")
        prof = log_reduce(V)
    else:
        prof = V
    if prof.is_zero() or alpha == 0:
        return EigencountResult(0, 0, 0, "mode_sum", m_max=0, justification="zero potential")
    M = mode_cutoff(prof, alpha) if m_max is None else m_max
    lo_tot, hi_tot = 0, 0
    modes = []
    cut = {}
    for m in range(M):
        r = pruefer_count(SturmProblem(prof, shift=-float(m * m)), alpha, atol=atol)
        mult = 1 if m == 0 else 2
        modes.append((m, r.lower, r.upper))
        if m == 0:
            cut = dict(r.cutoffs)
        if isinstance(r.upper, Infinite):
            return EigencountResult(r.upper, lo_tot + mult * r.lower, r.upper, "mode_sum", cut, M,
                                    r.justification, modes)
        lo_tot += mult * r.lower
        hi_tot += mult * r.upper
    just = f"modes |m| >= {M} vanish since m^2 - 1/4 >= alpha sup G"
    return EigencountResult(lo_tot if lo_tot == hi_tot else None, lo_tot, hi_tot, "mode_sum", cut, M, just, modes)


# ---------------------------------------------------------------------------
# piecewise inverse-square profiles by exact phase composition


@dataclass(frozen=True)
class InverseSquareChain:
    """``alpha G = (q_j + 1/4)/t^2`` on consecutive intervals of log-length ``lengths[j]``.

    In ``s = ln t`` and ``w = u/sqrt(t)`` each piece is ``w'' + q_j w = 0``,
    solved exactly, so callers may pass ``q_j`` computed from deficits
    ``1 - alpha`` without the cancellation of ``alpha c - 1/4`` in floats.
    ``G`` vanishes before the first piece.  ``tail = (q_lo, q_hi)`` bounds
    ``alpha t^2 G - 1/4`` after the last piece; ``None`` means ``G = 0`` there.
    """

    lengths: tuple
    q: tuple
    tail: Optional[tuple] = None

    def __post_init__(self):
        if len(self.lengths) != len(self.q) or not self.q:
            raise InvalidParameters("need one q per piece and at least one piece")
        if any(not L > 0 for L in self.lengths):
            raise InvalidParameters("piece lengths must be positive")
        if any(not qj > 0 for qj in self.q):
            raise InvalidParameters("exact composition needs oscillatory pieces (q > 0)")
        if self.tail is not None and not (self.tail[0] <= self.tail[1] < 0):
            raise InvalidParameters("the tail must be non-oscillatory: q_lo <= q_hi < 0")


def _chain_phase(ch: InverseSquareChain, theta: float) -> float:
    # theta is the scaled angle atan2(k w, w') in the first piece
    ks = [math.sqrt(qj) for qj in ch.q]
    for j, (k, L) in enumerate(zip(ks, ch.lengths)):
        if j:
            n = math.floor(theta / math.pi)
            r = theta - n * math.pi
            theta = n * math.pi + math.atan2(k * math.sin(r), ks[j - 1] * math.cos(r))
        theta += k * L
    return theta


def chain_count(ch: InverseSquareChain) -> EigencountResult:
    """Negative eigenvalues of ``-u'' - alpha G u`` on the line for a chain profile.

    The left end is the bounded continuation (``w'/w = -1/2``); the right end
    is the decaying solution of the tail, bracketed by its two bounds.
    """
    k1, kn = math.sqrt(ch.q[0]), math.sqrt(ch.q[-1])
    theta = _chain_phase(ch, math.atan2(k1, -0.5))
    q_lo, q_hi = ch.tail if ch.tail is not None else (-0.25, -0.25)
    # decaying branch w'/w = -sqrt(-q); a weaker tail is closer to Dirichlet
    lo = _count_from(theta, math.atan2(kn, -math.sqrt(-q_lo)))
    hi = _count_from(theta, math.atan2(kn, -math.sqrt(-q_hi)))
    return EigencountResult(lo if lo == hi else None, lo, hi, "chain",
                            justification="exact phase composition of inverse-square pieces")


def chain_zero_count(ch: InverseSquareChain) -> int:
    """Interior zeros across the chain of the solution vanishing at its left end."""
    theta = _chain_phase(ch, 0.0)
    return max(0, math.ceil(theta / math.pi - 1e-13) - 1) if theta > 0 else 0


# ---------------------------------------------------------------------------
# sharp one-dimensional Sobolev constants


@dataclass(frozen=True)
class SobolevConstant:
    """Best constant ``C``, the point ``x_star`` where it is attained and the extremizer there."""

    C: float
    x_star: float
    extremizer: Callable = field(repr=False)
    kappa: float = 0.0
    a: float = 0.0
    b: float = 0.0

    def at(self, x: float) -> float:
        return sharp_sobolev_C_at(self.kappa, self.a, self.b, x)


def _check_kab(kappa, a, b):
    if not kappa > 0:
        raise InvalidParameters("kappa must be positive")
    if not 0 < a < b:
        raise InvalidParameters("need 0 < a < b")


def sharp_sobolev_C_at(kappa: float, a: float, b: float, x: float) -> float:
    """Best ``C(kappa; x)`` in ``|u(x)|^2/x <= C (int |u'|^2 + kappa int |u|^2/t^2)`` on ``[a, b]``.

    Evaluated with every power divided by ``b^s`` (``s = sqrt(1+4 kappa)``) so
    that large ``s ln b`` cannot overflow.
    """
    _check_kab(kappa, a, b)
    if not a <= x <= b:
        raise InvalidParameters("x must lie in [a, b]")
    s = math.sqrt(1 + 4 * kappa)
    g1, g2 = (-1 + s) / 2, (-1 - s) / 2
    rab = math.exp(s * math.log(a / b))
    num = g1 * g1 * math.exp(s * math.log(x / b)) + kappa * (1 + rab) + g2 * g2 * math.exp(s * math.log(a / x))
    return num / (kappa * s * -math.expm1(s * math.log(a / b)))


def sobolev_extremizer(kappa: float, a: float, b: float, x: float) -> Callable:
    """Extremizer of ``C(kappa; x)`` normalised by ``u(x) = 1``.

    Returns ``u`` with attributes ``du`` (derivative) and ``energy`` (the
    value of ``int |u'|^2 + kappa int |u|^2/t^2`` by the closed form).
    """
    _check_kab(kappa, a, b)
    s = math.sqrt(1 + 4 * kappa)
    g1, g2 = (-1 + s) / 2, (-1 - s) / 2
    p1, p2 = g1 + 1, g2 + 1

    def side(t, ref):
        return g1 * (t / ref) ** p1 - g2 * (t / ref) ** p2

    def dside(t, ref):
        return (g1 * p1 * (t / ref) ** p1 - g2 * p2 * (t / ref) ** p2) / t

    nl = side(x, a)
    nr = side(x, b) if x < b else 1.0

    def u(t):
        if t < x or x == b:
            return side(t, a) / nl
        return side(t, b) / nr

    def du(t):
        if t < x or x == b:
            return dside(t, a) / nl
        return dside(t, b) / nr

    # integration by parts on each side (u'(a) = u'(b) = 0)
    eL = dside(x, a) / nl if x > a else 0.0
    eR = dside(x, b) / nr if x < b else 0.0
    u.du = du
    u.energy = eL - eR
    return u


def sharp_sobolev_C(kappa: float, a: float, b: float) -> SobolevConstant:
    """``C(kappa) = (1/2 kappa)(1 + s coth(s ln(b/a)/2))``, attained at ``x = a``."""
    _check_kab(kappa, a, b)
    s = math.sqrt(1 + 4 * kappa)
    C = (1 + s / math.tanh(0.5 * s * math.log(b / a))) / (2 * kappa)
    return SobolevConstant(C, a, sobolev_extremizer(kappa, a, b, a), kappa, a, b)


def sharp_sobolev_C0_at(kappa: float, x: float, a: float = 0.0, b: float = 1.0) -> float:
    """Best ``C0(kappa; x)`` in ``|u(x)|^2 <= C0 ((b-a) int |u'|^2 + kappa/(b-a) int |u|^2)``."""
    if not kappa > 0:
        raise InvalidParameters("kappa must be positive")
    if not a < b or not a <= x <= b:
        raise InvalidParameters("need a <= x <= b with a < b")
    r = math.sqrt(kappa)
    L = b - a
    num = math.sinh(2 * r) + math.sinh(2 * r * (x - a) / L) + math.sinh(2 * r * (b - x) / L)
    return num / (4 * r * math.sinh(r) ** 2)


def sharp_sobolev_C0(kappa: float, a: float = 0.0, b: float = 1.0) -> float:
    """``C0(kappa) = coth(sqrt(kappa))/sqrt(kappa)``, attained at both end points."""
    if not kappa > 0:
        raise InvalidParameters("kappa must be positive")
    if not a < b:
        raise InvalidParameters("need a < b")
    r = math.sqrt(kappa)
    return 1.0 / (r * math.tanh(r))


def sobolev_C0_extremizer(kappa: float, x: float, a: float = 0.0, b: float = 1.0) -> Callable:
    """Piecewise ``cosh`` extremizer of ``C0(kappa; x)``."""
    r = math.sqrt(kappa)
    L = b - a

    def u(t):
        if t < x:
            return math.cosh(r * (b - x) / L) * math.cosh(r * (t - a) / L)
        return math.cosh(r * (x - a) / L) * math.cosh(r * (b - t) / L)

    def du(t):
        if t < x:
            return math.cosh(r * (b - x) / L) * math.sinh(r * (t - a) / L) * r / L
        return -math.cosh(r * (x - a) / L) * math.sinh(r * (b - t) / L) * r / L

    u.du = du
    return u


_GL_X, _GL_W = np.polynomial.legendre.leggauss(6)


def grid_rayleigh_max(kind: str, kappa: float, a: float, b: float, n: int = 2000) -> tuple:
    """Exact Rayleigh maximisation over continuous piecewise-linear functions on ``n`` nodes.

    ``kind`` is ``"hardy"`` (weight ``kappa/t^2``, nodes geometric, ratio
    ``|u(x)|^2/x``) or ``"flat"`` (weight ``kappa/(b-a)``, uniform nodes,
    gradient term scaled by ``b-a``).  Returns ``(nodes, values)`` where
    ``values[i]`` is the sup of the ratio with ``x`` at node ``i``.  Since the
    trial space lies in ``W^1_2`` these never exceed the true constants.
    """
    from scipy.linalg import solve_banded

    if kind == "hardy":
        _check_kab(kappa, a, b)
        t = np.geomspace(a, b, n)
    elif kind == "flat":
        t = np.linspace(a, b, n)
    else:
        raise InvalidParameters(f"unknown kind {kind!r}")
    h = np.diff(t)
    diag = np.zeros(n)
    off = np.zeros(n - 1)
    if kind == "hardy":
        # stiffness plus kappa * int phi_i phi_j / t^2, Gauss-Legendre per element
        for e in range(n - 1):
            xs = t[e] + 0.5 * h[e] * (_GL_X + 1.0)
            w = 0.5 * h[e] * _GL_W / xs ** 2
            pl = (t[e + 1] - xs) / h[e]
            pr = (xs - t[e]) / h[e]
            diag[e] += 1 / h[e] + kappa * np.sum(w * pl * pl)
            diag[e + 1] += 1 / h[e] + kappa * np.sum(w * pr * pr)
            off[e] += -1 / h[e] + kappa * np.sum(w * pl * pr)
    else:
        L = b - a
        diag[:-1] += L / h + kappa / L * h / 3
        diag[1:] += L / h + kappa / L * h / 3
        off += -L / h + kappa / L * h / 6
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = diag
    ab[2, :-1] = off
    inv = solve_banded((1, 1), ab, np.eye(n))
    vals = np.diag(inv).copy()
    if kind == "hardy":
        vals /= t
    return t, vals

"""Annular decompositions of the plane and the sequences built on them.

Every sequence here is indexed by ``n`` in ``Z`` (or ``n >= 0``) and is
computed entry by entry over a finite window.  What lies beyond the window is
described by a :class:`TailCertificate`, derived from the exponent classes of
the potential at ``r -> 0`` and ``r -> inf``.  Sums are declared infinite only
when the tail class is certified divergent.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import integrate

from ._asymptotics import Growth, SeqClass, dominant, tail_sum_estimate
from .errors import MissingDecayClass, MissingParameter, NonIntegrable
from .orlicz import (Domain, LLogLB, MeasurableSample, Piece, average_norm, orlicz_norm)
from .potentials import (Potential, Region, _annulus_area, _region_weighted_check,
                         angular_integral, annulus_sample, log_reduce, radial_integral,
                         radial_line_sample, weighted_integral, WEIGHTS, _w_abs_t, _w_one,
                         _t_log_piece, TWO_PI)
from .values import Infinite, Unknown, Value, is_finite, status, vsum, fmt

__all__ = [
    "AnnulusFamily", "AnnularProfile", "TailCertificate", "PROFILE_IDS", "profile", "entry",
    "weak_l1", "thresholded_sum", "thresholded_sqrt_sum", "profile_sum", "jobs",
]

LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class AnnulusFamily:
    """Annuli described by their ``ln r`` ranges.

    ``dyadic``: ``U_0 = {1/e < r < e}``, ``U_n = {e^{2^{n-1}} < r < e^{2^n}}``
    for ``n > 0`` and the mirror image for ``n < 0``.
    ``exponential``: ``e^n < r < e^{n+1}``.
    ``ball``: the single set ``r <= e``.
    ``interval``: the radial intervals ``(e^n, e^{n+1})`` (measure ``dr``).
    """

    kind: str

    def t_range(self, n: int) -> tuple:
        k = self.kind
        if k == "dyadic":
            if n == 0:
                return (-1.0, 1.0)
            if n > 0:
                return (float(2 ** (n - 1)), float(2 ** n))
            m = -n
            return (-float(2 ** m), -float(2 ** (m - 1)))
        if k in ("exponential", "interval"):
            return (float(n), float(n + 1))
        if k == "ball":
            return (-math.inf, 1.0)
        raise ValueError(k)

    def radii(self, n: int) -> tuple:
        a, b = self.t_range(n)
        return (math.exp(a) if a > -745 else 0.0, math.exp(b) if b < 709 else math.inf)

    def measure(self, n: int) -> float:
        a, b = self.t_range(n)
        if self.kind == "interval":
            r1, r2 = self.radii(n)
            return r2 - r1
        return TWO_PI * _annulus_area(a, b)

    def index_of(self, t: float) -> int:
        """Index of the member whose closure contains ``ln r = t``."""
        if self.kind == "dyadic":
            if -1 <= t <= 1:
                return 0
            m = max(1, math.ceil(math.log2(abs(t))))
            return m if t > 0 else -m
        if self.kind == "ball":
            return 0
        return math.floor(t)


DYADIC = AnnulusFamily("dyadic")
EXPONENTIAL = AnnulusFamily("exponential")
INTERVAL = AnnulusFamily("interval")
BALL = AnnulusFamily("ball")

# id -> (family, nonnegative indices only, description)
PROFILE_IDS = {
    "A": (DYADIC, False, "A_0 = int_{U_0} V, A_n = int_{U_n} V |ln|x|| dx"),
    "A_log": (DYADIC, False, "2 pi int_{I_n} |t| G(t) dt from the logarithmic reduction"),
    "boldA": (DYADIC, True, "int_{|x|<=e} V |ln|x|| at n = 0, A_n for n >= 1"),
    "scriptB": (EXPONENTIAL, False, "average LlogL norm of V on e^n < |x| < e^{n+1}"),
    "boldB": (EXPONENTIAL, True, "average LlogL norm on |x| <= e at n = 0, scriptB_n for n >= 1"),
    "B_p": (EXPONENTIAL, False, "(int V^p |x|^{2(p-1)} dx)^{1/p} over e^n < |x| < e^{n+1}"),
    "orlicz_ring": (EXPONENTIAL, False, "plain LlogL Orlicz norm of V on e^n < |x| < e^{n+1}"),
    "D": (INTERVAL, False, "int_{I_n} ||V(r, .)||_{LlogL, circle} r dr"),
    "D_N": (INTERVAL, False, "same as D for V minus its angular mean"),
    "Lp_slice": (INTERVAL, False, "int_{I_n} (int V(r, th)^p dth)^{1/p} r dr"),
    "Lp_slice_N": (INTERVAL, False, "same as Lp_slice for V minus its angular mean"),
    "G": (INTERVAL, False, "e^n int ||V(., th)||^(av)_{LlogL, I_n} dth"),
}
_NEEDS_P = ("B_p", "Lp_slice", "Lp_slice_N")
_NORM_FAILURES = (NonIntegrable, OverflowError, ZeroDivisionError)


def jobs() -> int:
    """Worker count from ``SPECLAB_JOBS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("SPECLAB_JOBS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# single entries


def _clip_regions(V: Potential, t_lo: float, t_hi: float) -> list:
    out = []
    for reg in V.live_regions:
        r = reg.clipped(t_lo, t_hi)
        if r is not None:
            out.append(r)
    return out


def _check(regs, psi: str, weight: str = "One", p: float = 1.0) -> Optional[Value]:
    w = WEIGHTS[weight]
    for r in regs:
        try:
            why = _region_weighted_check(r, w, psi, p)
        except MissingDecayClass as exc:
            return Unknown(str(exc))
        if why is not None:
            return Infinite(why)
    return None


def _angular_B_check(reg: Region) -> Optional[Value]:
    """Is the angular factor in L log L?"""
    for c in reg.angular_centers():
        g = reg.angular.end_class("center", c).compose("B")
        if not g.integrable(0.0):
            return Infinite(f"angular factor not in LlogL near theta={c:g}: {g.describe()}")
    return None


def _angular_pow_check(reg: Region, p: float) -> Optional[Value]:
    for c in reg.angular_centers():
        g = reg.angular.end_class("center", c).power(p)
        if not g.integrable(0.0):
            return Infinite(f"angular factor not in L^{p:g} near theta={c:g}: {g.describe()}")
    return None


def _radial_line_B_check(reg: Region) -> Optional[Value]:
    """Is the radial factor in L log L(dr) on the region's (finite) range?"""
    for c in reg.radial_centers():
        r0 = math.exp(c)
        g = reg.radial.end_class("center", r0).compose("B")
        if not g.integrable(0.0):
            return Infinite(f"radial factor not in LlogL near r={r0:g}: {g.describe()}")
    return None


def _radial_r_check(reg: Region) -> Optional[Value]:
    """Is ``int F(r) r dr`` finite on the region's range?"""
    return _check([Region(reg.t_lo, reg.t_hi, reg.radial)], "id")


def _norm(sample: MeasurableSample, average: bool) -> Value:
    if sample.is_zero():
        return 0.0
    try:
        return average_norm(sample, LLogLB) if average else orlicz_norm(sample, LLogLB)
    except _NORM_FAILURES as exc:
        return Infinite(f"LlogL integral diverges for every scale ({exc.__class__.__name__})")


def _angular_centered_sample(reg: Region) -> MeasurableSample:
    """``|H 1_Theta - mean|`` on the circle, mean taken over the whole circle."""
    hbar = angular_integral(reg) / TWO_PI
    H = reg.angular
    dom = Domain("circle")
    outside = TWO_PI - reg.theta_length
    cm, cv = ([outside], [hbar]) if outside > 0 else ([], [])
    if H.is_constant:
        cm.append(reg.theta_length)
        cv.append(abs(H.coef - hbar))
        return MeasurableSample(dom, tuple(cm), tuple(cv))
    pieces = []
    for coord, c, ylo, yhi in reg.angular_segments():
        from .potentials import _seg_t_range

        lo, hi = _seg_t_range((coord, c, ylo, yhi))
        sing = "lo" if coord == 1 else "hi" if coord == 2 else None
        pieces.append(Piece(lo, hi, lambda th: abs(H.value_at(th) - hbar), None, sing))
    return MeasurableSample(dom, tuple(cm), tuple(cv), tuple(pieces))


def _angular_B_norm(reg: Region, centered: bool) -> Value:
    if centered:
        if reg.full_circle and reg.angular.is_constant:
            return 0.0
        return _norm(_angular_centered_sample(reg), False)
    from .potentials import angular_sample

    return _norm(angular_sample(reg), False)


def _angular_p_norm(reg: Region, p: float, centered: bool) -> float:
    if not centered:
        return angular_integral(reg, p) ** (1.0 / p)
    if reg.full_circle and reg.angular.is_constant:
        return 0.0
    s = _angular_centered_sample(reg)
    from .orlicz import Power

    return s.integrate(Power(p), 1.0) ** (1.0 / p)


def _groups(regs: list, key_lo: str, key_hi: str) -> list:
    """Cut the union of ranges at every region end point.

    Returns ``[(lo, hi, [regions active on (lo, hi)])]``.
    """
    cuts = sorted(set([getattr(r, key_lo) for r in regs] + [getattr(r, key_hi) for r in regs]))
    out = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        act = [r for r in regs if getattr(r, key_lo) <= a and b <= getattr(r, key_hi)]
        if act:
            out.append((a, b, act))
    return out


def _entry_D(V: Potential, n: int, centered: bool = False, p: Optional[float] = None) -> Value:
    """Mixed norm over ``e^n < r < e^{n+1}``: slice norms on circles integrated against ``r dr``.

    ``p`` switches the slice norm from LlogL to ``L^p``.
    """
    regs = _clip_regions(V, float(n), float(n + 1))
    if V.live_disks and any(d.area_in_annulus(n, n + 1) > 0 for d in V.live_disks):
        return _entry_D_numeric(V, n, centered, p)
    total: list = []
    for a, b, act in _groups(regs, "t_lo", "t_hi"):
        base = act[0].radial
        prop = all(r.radial.atoms == base.atoms for r in act)
        if len(act) > 1 and not prop:
            total.append(_entry_D_numeric(V, n, centered, p, (a, b)))
            continue
        # slice = F(r) * sum_j (c_j / c_0) H_j 1_{Theta_j}
        for r in act:
            bad = _radial_r_check(Region(a, b, r.radial))
            if bad is not None:
                return bad
            bad = _angular_pow_check(r, p) if p else _angular_B_check(r)
            if bad is not None:
                return bad
        rad = radial_integral(Region(a, b, base.scaled(1.0 / base.coef) if base.coef else base), a, b)
        if len(act) == 1:
            r = act[0]
            ang = _angular_p_norm(r, p, centered) if p else _angular_B_norm(r, centered)
            if not is_finite(ang):
                return ang
            total.append(rad * base.coef * ang)
        else:
            slice_sample = _combined_angular(act, 1.0, centered)
            if p:
                from .orlicz import Power

                ang = slice_sample.integrate(Power(p), 1.0) ** (1.0 / p)
            else:
                ang = _norm(slice_sample, False)
            if not is_finite(ang):
                return ang
            total.append(rad * ang)
    return vsum(total)


def _combined_angular(act: list, c0: float, centered: bool) -> MeasurableSample:
    """Angular function ``sum_j (c_j/c_0) H_j 1_{Theta_j}`` (optionally minus its mean)."""
    from .potentials import angular_sample

    dom = Domain("circle")
    out = MeasurableSample(dom)
    mean = 0.0
    for r in act:
        k = (r.radial.coef / c0) if c0 else 0.0
        out = out.joined(angular_sample(r, k), dom) if k > 0 else out
        mean += k * angular_integral(r) / TWO_PI
    if not centered:
        return out

    def f(th):
        return abs(sum((r.radial.coef / c0) * r.angular.value_at(th)
                       for r in act if r.th_lo < th <= r.th_hi) - mean)

    cuts = sorted(set([-math.pi, math.pi] + [r.th_lo for r in act] + [r.th_hi for r in act]
                      + [c for r in act for c in r.angular_centers()]))
    pieces = tuple(Piece(a, b, f, None, "both") for a, b in zip(cuts[:-1], cuts[1:]))
    return MeasurableSample(dom, pieces=pieces)


def _slice_sample(V: Potential, t: float, centered: bool) -> MeasurableSample:
    """Angular slice ``theta -> V(e^t, theta)``."""
    r = math.exp(t)
    act = [reg for reg in V.live_regions if reg.t_lo < t < reg.t_hi]
    dom = Domain("circle")
    cm, cv = [], []
    for d in V.live_disks:
        a = d.arc(r)
        if a > 0:
            cm.append(a)
            cv.append(d.value)
    if not centered:
        from .potentials import angular_sample

        out = MeasurableSample(dom, tuple(cm), tuple(cv))
        for reg in act:
            fr = reg.radial.value_at(t)
            if fr > 0:
                out = out.joined(angular_sample(reg, fr), dom)
        return out
    mean = sum(m * v for m, v in zip(cm, cv)) / TWO_PI
    mean += sum(reg.radial.value_at(t) * angular_integral(reg) for reg in act) / TWO_PI

    def f(th):
        return abs(V.value_t(t, th) - mean)

    cuts = sorted(set([-math.pi, math.pi] + [reg.th_lo for reg in act] + [reg.th_hi for reg in act]
                      + [c for reg in act for c in reg.angular_centers()]
                      + [s * d.arc(r) / 2 for d in V.live_disks for s in (-1, 1) if d.arc(r) > 0]))
    pieces = tuple(Piece(a, b, f, None, "both") for a, b in zip(cuts[:-1], cuts[1:]) if b > a)
    return MeasurableSample(dom, pieces=pieces)


def _entry_D_numeric(V: Potential, n: int, centered: bool, p: Optional[float],
                     sub: Optional[tuple] = None) -> Value:
    a, b = sub if sub else (float(n), float(n + 1))
    regs = _clip_regions(V, a, b)
    for r in regs:
        bad = _radial_r_check(r) or (_angular_pow_check(r, p) if p else _angular_B_check(r))
        if bad is not None:
            return bad
    from .orlicz import Power

    def g(t):
        s = _slice_sample(V, t, centered)
        if s.is_zero():
            return 0.0
        if p:
            v = s.integrate(Power(p), 1.0) ** (1.0 / p)
        else:
            v = _norm(s, False)
            if not is_finite(v):
                raise OverflowError
        return v * math.exp(2 * t)

    cuts = sorted(set([a, b] + [x for r in regs for x in (r.t_lo, r.t_hi) if a < x < b]
                      + [math.log(d.cx + s * d.rho) for d in V.live_disks for s in (-1, 1)
                         if a < math.log(d.cx + s * d.rho) < b]))
    total = 0.0
    try:
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            val, _ = integrate.quad(g, lo, hi, epsabs=1e-12, epsrel=1e-7, limit=60)
            total += val
    except OverflowError:
        return Infinite("slice norm infinite on a set of positive measure")
    return total


def _entry_G(V: Potential, n: int) -> Value:
    """``e^n * int ||V(., theta)||^(av)_{LlogL, (e^n, e^{n+1})} dtheta``."""
    regs = _clip_regions(V, float(n), float(n + 1))
    if V.live_disks and any(d.area_in_annulus(n, n + 1) > 0 for d in V.live_disks):
        return _entry_G_numeric(V, n)
    en = math.exp(n)
    dom = Domain("interval", (en, math.exp(n + 1)))
    total: list = []
    for a, b, act in _groups(regs, "th_lo", "th_hi"):
        base = act[0].angular
        if len(act) > 1 and not all(r.angular.atoms == base.atoms for r in act):
            total.append(_entry_G_numeric(V, n, (a, b)))
            continue
        for r in act:
            bad = _radial_line_B_check(r)
            if bad is not None:
                return bad
        sub = Region(-1.0, 1.0, angular=base.scaled(1.0 / base.coef) if base.coef else base,
                     th_lo=a, th_hi=b)
        ang = angular_integral(sub)
        if not math.isfinite(ang):
            return Infinite("angular factor not integrable")
        line = MeasurableSample(dom)
        for r in act:
            line = line.joined(radial_line_sample(r, float(n), float(n + 1), r.angular.coef), dom)
        nv = _norm(line, True)
        if not is_finite(nv):
            return nv
        total.append(en * ang * nv)
    return vsum(total)


def _line_sample(V: Potential, n: int, th: float) -> MeasurableSample:
    dom = Domain("interval", (math.exp(n), math.exp(n + 1)))
    out = MeasurableSample(dom)
    for reg in V.live_regions:
        if reg.th_lo < th <= reg.th_hi:
            h = reg.angular.value_at(th)
            if h > 0:
                out = out.joined(radial_line_sample(reg, float(n), float(n + 1), h), dom)
    cm, cv = [], []
    lo, hi = dom.params
    for d in V.live_disks:
        s2 = d.rho ** 2 - (d.cx * math.sin(th)) ** 2
        if s2 <= 0 or math.cos(th) <= 0:
            continue
        mid = d.cx * math.cos(th)
        r1, r2 = max(mid - math.sqrt(s2), lo), min(mid + math.sqrt(s2), hi)
        if r2 > r1:
            cm.append(r2 - r1)
            cv.append(d.value)
    if cm:
        out = out.joined(MeasurableSample.piecewise_constant(cm, cv, dom), dom)
    return out


def _entry_G_numeric(V: Potential, n: int, sub: Optional[tuple] = None) -> Value:
    a, b = sub if sub else (-math.pi, math.pi)
    regs = [r for r in _clip_regions(V, float(n), float(n + 1)) if r.th_lo < b and a < r.th_hi]
    for r in regs:
        bad = _radial_line_B_check(r)
        if bad is not None:
            return bad

    def g(th):
        v = _norm(_line_sample(V, n, th), True)
        if not is_finite(v):
            raise OverflowError
        return v

    cuts = sorted(set([a, b] + [x for r in regs for x in (r.th_lo, r.th_hi) if a < x < b]
                      + [c for r in regs for c in r.angular_centers() if a < c < b]))
    for d in V.live_disks:
        if d.area_in_annulus(n, n + 1) > 0:
            half = math.asin(d.rho / d.cx)
            cuts = sorted(set(cuts + [x for x in (-half, half) if a < x < b]))
    total = 0.0
    try:
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            val, _ = integrate.quad(g, lo, hi, epsabs=1e-12, epsrel=1e-7, limit=60)
            total += val
    except OverflowError:
        return Infinite("radial slice norm infinite on a set of angles of positive measure")
    return math.exp(n) * total


def _entry_Bp(V: Potential, n: int, p: float) -> Value:
    regs = _clip_regions(V, float(n), float(n + 1))
    bad = _check(regs, "pow", p=p)
    if bad is not None:
        return bad
    total = 0.0
    for r in regs:
        total += angular_integral(r, p) * radial_integral(r, n, n + 1, power=p, measure_t=2.0 * p)
    for d in V.live_disks:
        if d.area_in_annulus(n, n + 1) > 0:
            from .potentials import _disk_radial_integral

            total += d.value ** p * _disk_radial_integral(d, lambda r: r ** (2 * (p - 1)), (n, n + 1))
    if not math.isfinite(total):
        return Unknown("quadrature overflow")
    return total ** (1.0 / p)


def entry(V: Potential, pid: str, n: int, p: Optional[float] = None) -> Value:
    """One entry of a profile (see :data:`PROFILE_IDS`)."""
    if pid not in PROFILE_IDS:
        raise ValueError(f"unknown profile id {pid!r}")
    fam, nonneg, _ = PROFILE_IDS[pid]
    if pid in _NEEDS_P and p is None:
        raise MissingParameter(f"profile {pid} needs p")
    if nonneg and n < 0:
        raise ValueError(f"profile {pid} is indexed by n >= 0")
    if V.is_zero():
        return 0.0
    if pid in ("boldA", "boldB") and n == 0:
        t_lo, t_hi = -math.inf, 1.0
    else:
        t_lo, t_hi = fam.t_range(n)
    s_lo, s_hi = V.t_support()
    if s_hi <= t_lo or t_hi <= s_lo:
        return 0.0
    if pid in ("A", "boldA"):
        w = "One" if (pid == "A" and n == 0) else "AbsLog"
        return weighted_integral(V, w, t_range=(t_lo, t_hi))
    if pid == "A_log":
        G = log_reduce(V)
        bad = weighted_integral(V, "One" if n == 0 else "AbsLog", t_range=(t_lo, t_hi))
        if not is_finite(bad):
            return bad
        return TWO_PI * G.integrate(_w_one if n == 0 else _w_abs_t, t_lo, t_hi)
    if pid in ("scriptB", "boldB", "orlicz_ring"):
        regs = _clip_regions(V, t_lo, t_hi)
        bad = _check(regs, "B")
        if bad is not None:
            return bad
        return _norm(annulus_sample(V, t_lo, t_hi), pid != "orlicz_ring")
    if pid == "B_p":
        return _entry_Bp(V, n, p)
    if pid in ("D", "D_N"):
        return _entry_D(V, n, pid == "D_N")
    if pid in ("Lp_slice", "Lp_slice_N"):
        return _entry_D(V, n, pid == "Lp_slice_N", p)
    if pid == "G":
        return _entry_G(V, n)
    raise AssertionError(pid)


# ---------------------------------------------------------------------------
# tails


@dataclass(frozen=True)
class TailCertificate:
    """What the sequence does beyond the computed window on one side.

    ``cls`` is the asymptotic class in ``m = |n|``; ``bound`` estimates the
    sum of the entries beyond ``n_edge`` (``inf`` if the class is not
    summable); ``limit`` is the numerical limit when the class is constant.
    """

    side: int
    n_edge: int
    cls: SeqClass
    bound: float
    note: str = ""
    limit: Optional[float] = None
    exact_coef: bool = False

    @property
    def empty(self) -> bool:
        return self.cls.coef == 0


def _region_end_classes(V: Potential, side: int) -> list:
    """``(Growth of the angular-mean radial factor, region)`` for regions reaching ``side``."""
    out = []
    for reg in V.live_regions:
        if side > 0 and reg.t_hi == math.inf:
            g = reg.radial.end_class("inf")
        elif side < 0 and reg.t_lo == -math.inf:
            g = reg.radial.end_class("origin")
        else:
            continue
        hbar = angular_integral(reg) / TWO_PI
        out.append((g.scaled(hbar) if math.isfinite(hbar) else g, reg))
    return out


def _seq_class(V: Potential, pid: str, side: int, p: Optional[float]) -> SeqClass:
    classes = []
    for g, reg in _region_end_classes(V, side):
        a, b, c = g.a, g.b, g.c
        if pid in ("D_N", "Lp_slice_N") and reg.full_circle and reg.angular.is_constant:
            continue
        if pid in ("A", "A_log", "boldA"):
            e = a + 2.0
            if e * side < -1e-12:
                classes.append(SeqClass(-math.inf, 0, 0, 1.0))
            elif e * side > 1e-12:
                classes.append(SeqClass(math.inf, 0, 0, 1.0))
            else:
                k = b + 2.0
                if abs(k) < 1e-12:
                    K = TWO_PI * g.coef * LN2 ** (c + 1)
                    classes.append(SeqClass(0.0, c, 0.0, K))
                else:
                    K = TWO_PI * g.coef * LN2 ** c * (1 - 2 ** (-k)) / k
                    if k < 0:
                        K = abs(K)
                    classes.append(SeqClass(k * LN2, c, 0.0, K))
        elif pid == "orlicz_ring":
            if side > 0:
                classes.append(SeqClass(a + 1.0, b, c, g.coef))
            else:
                classes.append(SeqClass(-(a + 2.0), b + 1.0, c, g.coef))
        else:
            lam = (a + 2.0) * side
            classes.append(SeqClass(lam, b, c, g.coef))
    return dominant(classes)


# ---------------------------------------------------------------------------
# profiles


@dataclass
class AnnularProfile:
    """Entries ``n -> value`` over a window plus tail certificates on both sides."""

    pid: str
    values: dict
    tails: dict = field(default_factory=dict)
    p: Optional[float] = None

    @property
    def n_range(self) -> tuple:
        if not self.values:
            return (0, -1)
        return (min(self.values), max(self.values))

    def items(self):
        return sorted(self.values.items())

    def finite_entries(self) -> list:
        return [v for _, v in self.items() if is_finite(v)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "value", "status"])
        for n, v in self.items():
            val = repr(fmt(v)) if is_finite(v) else ("inf" if status(v) == "infinite" else "unknown")
            w.writerow([n, val, status(v)])
        return buf.getvalue()


def _entry_task(args):
    V, pid, n, p = args
    return n, entry(V, pid, n, p)


def _compute(V: Potential, pid: str, ns: Sequence[int], p: Optional[float]) -> dict:
    nj = jobs()
    if nj > 1 and len(ns) > 3:
        with ProcessPoolExecutor(max_workers=nj) as ex:
            res = list(ex.map(_entry_task, [(V, pid, n, p) for n in ns]))
        return dict(res)
    return {n: entry(V, pid, n, p) for n in ns}


def _default_window(V: Potential, pid: str) -> tuple:
    fam, nonneg, _ = PROFILE_IDS[pid]
    if V.is_zero():
        return (0, 0)
    lo, hi = V.t_support()
    pad = 3
    n_lo = fam.index_of(lo) if math.isfinite(lo) else None
    n_hi = fam.index_of(hi) if math.isfinite(hi) else None
    if fam is DYADIC:
        n_lo = (n_lo if n_lo is not None else -8)
        n_hi = (n_hi if n_hi is not None else 8)
        if not math.isfinite(lo):
            n_lo = min(n_lo, -8)
        if not math.isfinite(hi):
            n_hi = max(n_hi, 8)
    else:
        if n_lo is None:
            n_lo = min(-12, (n_hi if n_hi is not None else 0) - 12)
        elif not math.isfinite(lo):
            n_lo -= pad
        if n_hi is None:
            n_hi = max(12, n_lo + 12)
        if math.isfinite(hi) and fam.t_range(n_hi)[0] >= hi:
            n_hi -= 1
    if nonneg:
        n_lo = max(0, n_lo)
        n_hi = max(0, n_hi)
    return (n_lo, n_hi)


def profile(V: Potential, pid: str, n_range: Optional[tuple] = None, p: Optional[float] = None,
            *, extend: int = 48) -> AnnularProfile:
    """Compute a profile over ``n_range`` with tail certificates.

    When ``n_range`` is omitted the window covers the support and, on an
    unbounded side, grows until the entries are small and decreasing
    (at most ``extend`` extra entries).
    """
    if pid in _NEEDS_P and p is None:
        raise MissingParameter(f"profile {pid} needs p")
    fam, nonneg, _ = PROFILE_IDS[pid]
    auto = n_range is None
    n_lo, n_hi = _default_window(V, pid) if auto else n_range
    values = _compute(V, pid, list(range(n_lo, n_hi + 1)), p)
    tails = {}
    for side in (1, -1):
        if side < 0 and nonneg:
            continue
        cls = _seq_class(V, pid, side, p) if not V.is_zero() else SeqClass(-math.inf, 0, 0, 0.0)
        if auto and cls.coef != 0 and cls.trend() == "zero":
            # grow until three decreasing entries below 1e-3 relative to the largest
            edge = n_hi if side > 0 else n_lo
            for _ in range(extend):
                seq = [values[edge - side * k] for k in range(3) if (edge - side * k) in values]
                fin = [v for v in seq if is_finite(v)]
                peak = max([v for v in values.values() if is_finite(v)] + [0.0])
                if len(fin) == 3 and fin[0] <= fin[1] <= fin[2] and fin[0] <= 1e-3 * max(peak, 1e-300):
                    break
                edge += side
                values[edge] = entry(V, pid, edge, p)
            if side > 0:
                n_hi = edge
            else:
                n_lo = edge
        edge = n_hi if side > 0 else n_lo
        last = values.get(edge, 0.0)
        if cls.coef == 0:
            tails[side] = TailCertificate(side, edge, cls, 0.0, "support bounded on this side")
            continue
        lim = None
        if cls.trend() == "const":
            lim = last if is_finite(last) else None
            if pid in ("A", "A_log", "boldA"):
                lim = cls.coef
        m_last = max(abs(edge), 1)
        bound = tail_sum_estimate(cls, last if is_finite(last) else 0.0, m_last) if is_finite(last) else math.inf
        note = (f"entries beyond n={edge} behave like {cls.describe()}; "
                + ("summable" if cls.summable() else "not summable"))
        tails[side] = TailCertificate(side, edge, cls, bound, note, lim,
                                      pid in ("A", "A_log", "boldA"))
    return AnnularProfile(pid, values, tails, p)


# ---------------------------------------------------------------------------
# sequence functionals


def _raw(seq) -> tuple:
    if isinstance(seq, AnnularProfile):
        return [v for _, v in seq.items()], seq.tails
    return list(seq), {}


def _weak_l1_exact(vals: Sequence[float]) -> float:
    """``sup_s s * card{|a_n| > s}``, attained as ``s`` increases to a breakpoint."""
    a = np.sort(np.abs(np.asarray(vals, dtype=float)))[::-1]
    a = a[a > 0]
    if a.size == 0:
        return 0.0
    # for v_k, card{|a| >= v_k} is the last index holding v_k, plus one
    uniq, first = np.unique(-a, return_index=True)
    counts = np.searchsorted(-a, uniq, side="right")
    return float(np.max(-uniq * counts))


def weak_l1(seq: Union[AnnularProfile, Sequence[float]], *, tail_terms: int = 200000) -> Value:
    """Weak-l1 quasinorm ``sup_{s>0} s * card{n : |a_n| > s}``.

    For profiles, entries beyond the window are extrapolated from the tail
    class up to ``tail_terms`` further indices when the class is weak-l1
    finite; a class that is not weak-l1 finite gives :class:`Infinite`.
    """
    vals, tails = _raw(seq)
    for v in vals:
        if not is_finite(v):
            return v
    extra = []
    for side, tc in tails.items():
        if tc.empty or tc.cls.lam == -math.inf:
            continue
        if not tc.cls.weak_l1_finite():
            return Infinite(f"tail {tc.cls.describe()} has infinitely many entries above a fixed level "
                            f"or decays slower than 1/|n|")
        last = None
        for n, v in (seq.items() if isinstance(seq, AnnularProfile) else []):
            if n == tc.n_edge:
                last = v
        if last is None or last == 0:
            continue
        m0 = max(abs(tc.n_edge), 1)
        ms = np.arange(m0 + 1, m0 + 1 + tail_terms, dtype=float)
        c = tc.cls
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if tc.exact_coef and c.lam == 0:
                # the class coefficient is the exact leading constant
                shape = c.coef * ms ** c.beta * (np.log(ms) ** c.gamma if c.gamma else 1.0)
                scale = 1.0
            else:
                shape = np.exp(c.lam * (ms - m0)) * (ms / m0) ** c.beta
                if c.gamma and m0 > 1:
                    shape = shape * (np.log(ms) / math.log(m0)) ** c.gamma
                scale = last
        extra.extend((scale * shape[np.isfinite(shape)]).tolist())
    return _weak_l1_exact([float(v) for v in vals] + extra)


def thresholded_sum(seq: Union[AnnularProfile, Sequence[float]], c: float, power: float = 1.0) -> Value:
    """``sum over {n : a_n > c}`` of ``a_n ** power`` with tail handling."""
    if not c > 0:
        raise ValueError("threshold must be positive")
    vals, tails = _raw(seq)
    total: list = []
    for v in vals:
        if isinstance(v, Infinite):
            return v
        if isinstance(v, Unknown):
            total.append(Unknown(v.reason, v.partial ** power if v.partial > c else 0.0))
        elif v > c:
            total.append(v ** power)
    for side, tc in tails.items():
        if tc.empty:
            continue
        tr = tc.cls.trend()
        if tr == "inf":
            return Infinite(f"entries grow along n -> {'+' if side > 0 else '-'}inf: {tc.cls.describe()}")
        if tr == "const":
            lim = tc.limit
            if lim is None:
                return Unknown("constant tail with unknown limit", vsum(total) if total else 0.0)
            if lim > c * (1 + 1e-9):
                return Infinite(f"entries tend to {lim:.6g} > threshold {c:g} along n -> "
                                f"{'+' if side > 0 else '-'}inf")
            if abs(lim - c) <= 1e-9 * c:
                return Unknown(f"entries tend to the threshold {c:g}", _partial(total))
        # decaying tails: the window was grown past the last exceedance
        edge_val = dict(seq.items()).get(tc.n_edge) if isinstance(seq, AnnularProfile) else None
        if tr == "zero" and edge_val is not None and is_finite(edge_val) and edge_val > c:
            return Unknown("window ends above the threshold", _partial(total))
    return vsum(total)


def _partial(total: list) -> float:
    v = vsum(total)
    return v if is_finite(v) else getattr(v, "partial", 0.0)


def thresholded_sqrt_sum(seq: Union[AnnularProfile, Sequence[float]], c: float) -> Value:
    """``sum over {n : a_n > c}`` of ``sqrt(a_n)``."""
    return thresholded_sum(seq, c, 0.5)


def profile_sum(seq: AnnularProfile) -> Value:
    """``sum_n a_n`` including the certified tail estimate."""
    vals, tails = _raw(seq)
    s = vsum(vals)
    if not is_finite(s):
        return s
    for side, tc in tails.items():
        if tc.empty:
            continue
        if not tc.cls.summable():
            return Infinite(f"tail along n -> {'+' if side > 0 else '-'}inf is not summable: "
                            f"{tc.cls.describe()}")
        s += tc.bound
    return s

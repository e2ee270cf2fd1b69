"""Nonnegative potentials on the plane, built from closed-form polar regions.

A potential is a finite union of pairwise disjoint polar rectangles
``{t_lo < ln|x| < t_hi, th_lo < theta < th_hi}``.  On each rectangle it is a
product ``F(r) H(theta)`` of formulas from a small grammar.  Small disks off
the origin with constant values are also allowed.  Radial positions are
stored as ``t = ln r`` so that radii like ``exp(exp(46))`` stay representable.

Formula grammar (factors joined by ``*``)::

    0.5            a positive constant
    |r|^-2         power of X = |r - c|     (|r-1.5|, |th|, |th+0.3| ...)
    L(|r|)^-2      |ln X|^e
    LL(|r|)^-1     (ln|ln X|)^e
    P(|r-1|,2)^-1  (1 + |ln X|^k)^e

Integrability questions are settled from exponent classes
(:mod:`speclab._asymptotics`); quadrature is used only for finite values.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize

from . import _kernels as K
from ._asymptotics import Growth, const_growth
from .errors import InvalidPotential, MissingDecayClass, UnboundedLevelSet, ConfigError
from .orlicz import (Domain, LogPiece, MeasurableSample, ProductPiece, QuadratureSpec, _quad,
                     _safe_exp)
from .values import Infinite, Unknown, Value

__all__ = [
    "Atom", "Formula", "Region", "OffsetDisk", "Potential", "LogProfile", "RadialProfile",
    "log_reduce", "weighted_integral", "rearrange", "WEIGHTS", "parse_potential",
    "annulus_sample", "region_sample", "radial_line_sample", "angular_sample",
    "angular_integral", "radial_integral", "profile_from_g", "kmw_phi", "segments",
]

TWO_PI = 2.0 * math.pi
_KINDS = {"pow": 0, "log": 1, "loglog": 2, "onep": 3}


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Atom:
    """One factor of a formula, a function of ``X = |v - center|``."""

    kind: str
    var: str
    center: float = 0.0
    e: float = 1.0
    k: float = 0.0

    def text(self) -> str:
        v = self.var
        if self.center == 0:
            arg = f"|{v}|"
        elif self.center > 0:
            arg = f"|{v}-{_num(self.center)}|"
        else:
            arg = f"|{v}+{_num(-self.center)}|"
        if self.kind == "pow":
            body = arg
        elif self.kind == "log":
            body = f"L({arg})"
        elif self.kind == "loglog":
            body = f"LL({arg})"
        else:
            body = f"P({arg},{_num(self.k)})"
        return body if self.e == 1 else f"{body}^{_num(self.e)}"

    def row(self) -> list:
        c = self.center
        tc = math.log(c) if (self.var == "r" and c > 0) else math.nan
        return [0.0 if self.var == "r" else 1.0, c, tc, float(_KINDS[self.kind]), self.e, self.k]

    def at_constant(self, x: float) -> float:
        """Value of the atom at ``X = x`` (a fixed positive distance)."""
        if self.kind == "pow":
            return x ** self.e
        lx = abs(math.log(x)) if x > 0 else math.inf
        if self.kind == "log":
            return lx ** self.e
        if self.kind == "loglog":
            return math.log(lx) ** self.e if lx > 1 else math.nan
        return (1.0 + lx ** self.k) ** self.e

    def exponents(self) -> tuple:
        """Contribution ``(a, b, c)`` to the class as ``X -> 0`` or ``X -> inf``."""
        if self.kind == "pow":
            return self.e, 0.0, 0.0
        if self.kind == "log":
            return 0.0, self.e, 0.0
        if self.kind == "loglog":
            return 0.0, 0.0, self.e
        return 0.0, self.k * self.e, 0.0


def _num(x: float) -> str:
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    if x == math.pi:
        return "pi"
    if x == -math.pi:
        return "-pi"
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _parse_num(s: str) -> float:
    s = s.strip()
    m = re.fullmatch(r"(-?)exp\((.+)\)", s)
    if m:
        v = math.exp(_parse_num(m.group(2)))
        return -v if m.group(1) else v
    table = {"pi": math.pi, "-pi": -math.pi, "inf": math.inf, "-inf": -math.inf,
             "+inf": math.inf}
    if s in table:
        return table[s]
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"not a number: {s!r}") from None


_ARG = r"\|\s*(r|th)\s*(?:([+-])\s*([0-9.eE+-]+|pi))?\s*\|"
_ATOM_RES = [
    ("pow", re.compile(rf"^{_ARG}$")),
    ("log", re.compile(rf"^L\(\s*{_ARG}\s*\)$")),
    ("loglog", re.compile(rf"^LL\(\s*{_ARG}\s*\)$")),
    ("onep", re.compile(rf"^P\(\s*{_ARG}\s*,\s*([0-9.eE+-]+)\s*\)$")),
]


def _parse_atom(tok: str) -> Atom:
    base, exp = tok, 1.0
    m = re.fullmatch(r"(.*[|)])\s*\^\s*\(?\s*([0-9.eE+-]+)\s*\)?", tok)
    if m:
        base, exp = m.group(1), _parse_num(m.group(2))
    for kind, rx in _ATOM_RES:
        mm = rx.match(base.strip())
        if mm:
            var, sign, cnum = mm.group(1), mm.group(2), mm.group(3)
            c = 0.0
            if sign:
                c = _parse_num(cnum)
                c = c if sign == "-" else -c
            k = _parse_num(mm.group(4)) if kind == "onep" else 0.0
            return Atom(kind, var, c, exp, k)
    raise ConfigError(f"cannot parse formula factor {tok!r}")


@dataclass(frozen=True)
class Formula:
    """``coef * prod(atoms)`` in one variable (``"r"`` or ``"th"``)."""

    var: str
    coef: float = 1.0
    atoms: tuple = ()

    @classmethod
    def parse(cls, text: str, var: str) -> "Formula":
        coef = 1.0
        atoms = []
        for tok in text.split("*"):
            tok = tok.strip()
            if not tok:
                raise ConfigError(f"empty factor in {text!r}")
            if re.fullmatch(r"[0-9.eE+-]+|pi|exp\(.*\)", tok):
                coef *= _parse_num(tok)
                continue
            a = _parse_atom(tok)
            if a.var != var:
                raise ConfigError(f"factor {tok!r} uses {a.var!r} in a {var!r} formula")
            atoms.append(a)
        if coef < 0 or not math.isfinite(coef):
            raise ConfigError("formula coefficients must be finite and nonnegative")
        return cls(var, coef, tuple(atoms))

    def text(self) -> str:
        parts = [] if (self.coef == 1 and self.atoms) else [_num(self.coef)]
        parts += [a.text() for a in self.atoms]
        return " * ".join(parts)

    @property
    def is_constant(self) -> bool:
        return not any(a.e != 0 for a in self.atoms)

    def scaled(self, c: float) -> "Formula":
        return Formula(self.var, self.coef * c, self.atoms)

    def origin_power(self) -> float:
        if self.var != "r":
            return 0.0
        return sum(a.e for a in self.atoms if a.kind == "pow" and a.center == 0)

    def compiled(self, extra_t: float = 0.0, logw: float = 0.0):
        """``(term_row, atom_rows)`` for the kernels (see :mod:`speclab._kernels`)."""
        return _compile(self, extra_t, logw)

    def log_value(self, v: float, aux: int = 0, aux_c: float = 0.0, aux_sign: float = 1.0,
                  aux_log: float = 0.0) -> float:
        if self.coef == 0:
            return -math.inf
        terms, atoms = _compile(self, 0.0, 0.0)
        return K.log_term(terms, 0, atoms, v, aux, aux_c, aux_sign, aux_log)

    def value_at(self, v: float) -> float:
        """Value at ``v`` (``t = ln r`` for radial formulas, the angle otherwise)."""
        lv = self.log_value(v)
        return math.exp(lv) if lv < 709 else math.inf

    def centers(self) -> list:
        """Singular candidates in the natural variable (``t`` for radii)."""
        out = set()
        for a in self.atoms:
            if a.e == 0:
                continue
            if self.var == "r":
                if a.center > 0:
                    out.add(math.log(a.center))
            else:
                out.add(a.center)
        return sorted(out)

    def degenerate_points(self) -> list:
        """Points where a log factor vanishes or a double log is undefined."""
        pts = []
        for a in self.atoms:
            if a.kind == "log" and a.e < 0:
                xs = [1.0]
            elif a.kind == "loglog":
                xs = [math.e, 1.0 / math.e, 1.0]
            else:
                continue
            for x in xs:
                for v in (a.center + x, a.center - x):
                    if self.var == "r":
                        if v > 0:
                            pts.append((math.log(v), a))
                    else:
                        pts.append((v, a))
        return pts

    def end_class(self, where: str, point: float = 0.0) -> Growth:
        """Exponent class near ``where``.

        ``"inf"``: ``r -> inf``; ``"origin"``: ``r -> 0``; ``"center"``:
        ``X = |v - point| -> 0`` where ``point`` is a radius or an angle.
        """
        if self.coef == 0:
            return Growth("zero", 0, 0, 0, 0.0)
        a = b = c = 0.0
        coef = self.coef
        end = "inf" if where == "inf" else "zero"
        for at in self.atoms:
            if where == "inf":
                on = True
            elif where == "origin":
                on = at.center == 0
            else:
                on = at.center == point
            if on:
                da, db, dc = at.exponents()
                a, b, c = a + da, b + db, c + dc
            else:
                ref = 0.0 if where == "origin" else point
                x = abs(ref - at.center)
                val = at.at_constant(x)
                if not (val > 0 and math.isfinite(val)):
                    raise MissingDecayClass(f"factor {at.text()} degenerates at the limit point")
                coef *= val
        return Growth(end, a, b, c, coef)


@functools.lru_cache(maxsize=4096)
def _compile(f: Formula, extra_t: float, logw: float):
    rows = [a.row() for a in f.atoms if not (f.var == "r" and a.kind == "pow" and a.center == 0)]
    lin = f.origin_power() + extra_t
    lc = math.log(f.coef) if f.coef > 0 else -math.inf
    atoms = np.array(rows, dtype=float).reshape(-1, 6)
    terms = np.array([[lc + logw, lin, 0.0, float(len(rows))]])
    return terms, atoms


ONE_R = Formula("r", 1.0, ())
ONE_TH = Formula("th", 1.0, ())


# ---------------------------------------------------------------------------
# coordinate segments
#
# A segment is (coord, center, y_lo, y_hi) in the kernels' convention:
# coord 0 is v = y, coord 1 is v = center + exp(y), coord 2 is v = center - exp(-y).


def _point(coord: int, center: float, y: float):
    if coord == 0:
        return y, 0, 0.0, 1.0, 0.0, 0.0
    if coord == 1:
        return center + math.exp(min(y, 709.0)) if y < 709 else math.inf, 1, center, 1.0, y, y
    return (center - math.exp(-y)) if -y < 709 else -math.inf, 1, center, -1.0, -y, -y


def _y_of(coord: int, center: float, v: float) -> float:
    if coord == 0:
        return v
    if coord == 1:
        d = v - center
        return math.log(d) if d > 0 else -math.inf if d == 0 else math.nan
    d = center - v
    return -math.log(d) if d > 0 else math.inf if d == 0 else math.nan


def _plain(a: float, b: float, big: bool) -> list:
    if not a < b:
        return []
    if not big:
        return [(0, 0.0, a, b)]
    segs = []
    if a < -1:
        hi = min(b, -1.0)
        if a == -math.inf or a / hi > 4:
            segs.append((2, 0.0, -math.log(-a) if a > -math.inf else -math.inf, -math.log(-hi)))
        else:
            segs.append((0, 0.0, a, hi))
    lo, hi = max(a, -1.0), min(b, 1.0)
    if lo < hi:
        segs.append((0, 0.0, lo, hi))
    if b > 1:
        lo = max(a, 1.0)
        if b == math.inf or b / lo > 4:
            segs.append((1, 0.0, math.log(lo), math.log(b) if b < math.inf else math.inf))
        else:
            segs.append((0, 0.0, lo, b))
    return segs


def segments(lo: float, hi: float, centers: Sequence[float] = (), big: bool = True) -> list:
    """Cover ``[lo, hi]`` by segments with log substitutions at ``centers``."""
    cs = sorted(set(c for c in centers if lo <= c <= hi and math.isfinite(c)))
    cuts = sorted(set([lo, hi] + [c for c in cs if lo < c < hi]))
    out = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        sa, sb = a in cs, b in cs
        if sa and sb:
            mid = 0.5 * (a + b)
            out.append((1, a, -math.inf, math.log(mid - a)))
            out.append((2, b, -math.log(b - mid), math.inf))
        elif sa:
            w = min(1.0, b - a)
            out.append((1, a, -math.inf, math.log(w)))
            out += _plain(a + w, b, big)
        elif sb:
            w = min(1.0, b - a)
            out += _plain(a, b - w, big)
            out.append((2, b, -math.log(w), math.inf))
        else:
            out += _plain(a, b, big)
    return out


def _seg_t_range(seg) -> tuple:
    coord, c, ylo, yhi = seg
    if coord == 0:
        return ylo, yhi
    if coord == 1:
        f = lambda y: c + math.exp(y) if y < 709 else math.inf  # noqa: E731
        return (c if ylo == -math.inf else f(ylo)), f(yhi) if yhi < math.inf else math.inf
    g = lambda y: c - math.exp(-y) if -y < 709 else -math.inf  # noqa: E731
    return (g(ylo) if ylo > -math.inf else -math.inf), (c if yhi == math.inf else g(yhi))


def _clip_seg(seg, v_lo: float, v_hi: float):
    coord, c, ylo, yhi = seg
    a, b = _seg_t_range(seg)
    lo, hi = max(a, v_lo), min(b, v_hi)
    if not lo < hi:
        return None
    nylo = ylo if lo == a else _y_of(coord, c, lo)
    nyhi = yhi if hi == b else _y_of(coord, c, hi)
    if not nylo < nyhi:
        return None
    return coord, c, nylo, nyhi


def _log_abs_t(t: float, coord: int, center: float, y: float) -> float:
    if coord == 1 and center == 0.0:
        return y
    if coord == 2 and center == 0.0:
        return -y
    return math.log(abs(t)) if t != 0 else -math.inf


def _quad_segment(g: Callable[[float], float], seg, spec: QuadratureSpec = QuadratureSpec()) -> float:
    coord, c, ylo, yhi = seg
    lo = ylo if coord == 0 or ylo > -60 else -60.0 if coord == 1 else ylo
    hi = yhi if coord == 0 or yhi < 60 else 60.0 if coord == 2 else yhi
    if coord == 1 and ylo == -math.inf:
        lo = -math.inf
    if coord == 2 and yhi == math.inf:
        hi = math.inf
    span_pts = []
    if math.isfinite(lo) and math.isfinite(hi) and hi - lo > 50:
        span_pts = list(np.linspace(lo, hi, int(min(200, (hi - lo) / 25)) + 1)[1:-1])
    cuts = [lo] + span_pts + [hi]
    return sum(_quad(g, a, b, None, spec) for a, b in zip(cuts[:-1], cuts[1:]))


# ---------------------------------------------------------------------------
# regions and potentials


@dataclass(frozen=True)
class Region:
    """Polar rectangle ``t_lo < ln r < t_hi``, ``th_lo < theta < th_hi`` with ``V = F(r) H(theta)``."""

    t_lo: float
    t_hi: float
    radial: Formula = ONE_R
    angular: Formula = ONE_TH
    th_lo: float = -math.pi
    th_hi: float = math.pi

    def __post_init__(self):
        if not self.t_lo < self.t_hi:
            raise InvalidPotential("region needs t_lo < t_hi")
        if not (-math.pi <= self.th_lo < self.th_hi <= math.pi):
            raise InvalidPotential("angular range must lie in [-pi, pi]")
        if self.radial.var != "r" or self.angular.var != "th":
            raise InvalidPotential("radial/angular formulas use the wrong variable")
        for f, lo, hi in ((self.radial, self.t_lo, self.t_hi), (self.angular, self.th_lo, self.th_hi)):
            for v, a in f.degenerate_points():
                if lo <= v <= hi:
                    raise InvalidPotential(f"factor {a.text()} degenerates inside the region")

    @property
    def full_circle(self) -> bool:
        return self.th_lo == -math.pi and self.th_hi == math.pi

    @property
    def theta_length(self) -> float:
        return self.th_hi - self.th_lo

    @property
    def coef(self) -> float:
        return self.radial.coef * self.angular.coef

    def is_zero(self) -> bool:
        return self.coef == 0

    def clipped(self, t_lo: float, t_hi: float) -> Optional["Region"]:
        lo, hi = max(self.t_lo, t_lo), min(self.t_hi, t_hi)
        if not lo < hi:
            return None
        return Region(lo, hi, self.radial, self.angular, self.th_lo, self.th_hi)

    def radial_centers(self) -> list:
        return [c for c in self.radial.centers() if self.t_lo <= c <= self.t_hi]

    def angular_centers(self) -> list:
        return [c for c in self.angular.centers() if self.th_lo <= c <= self.th_hi]

    def radial_segments(self, t_lo: float = -math.inf, t_hi: float = math.inf) -> list:
        lo, hi = max(self.t_lo, t_lo), min(self.t_hi, t_hi)
        if not lo < hi:
            return []
        return segments(lo, hi, self.radial_centers())

    def angular_segments(self) -> list:
        return segments(self.th_lo, self.th_hi, self.angular_centers(), big=False)

    def value(self, t: float, th: float) -> float:
        if not (self.t_lo < t < self.t_hi and self.th_lo < th <= self.th_hi):
            return 0.0
        lv = self.radial.log_value(t) + self.angular.log_value(th)
        return math.exp(lv) if lv < 709 else math.inf

    def text(self) -> str:
        lines = [f"region t=[{_num(self.t_lo)}, {_num(self.t_hi)}] "
                 f"theta=[{_num(self.th_lo)}, {_num(self.th_hi)}]",
                 f"  radial = {self.radial.text()}",
                 f"  angular = {self.angular.text()}"]
        return "\n".join(lines)


@dataclass(frozen=True)
class OffsetDisk:
    """Constant ``value`` on the disk of radius ``rho`` centred at ``(cx, 0)``, ``cx > rho``."""

    cx: float
    rho: float
    value: float

    def __post_init__(self):
        if not (self.cx > self.rho > 0) or self.value < 0:
            raise InvalidPotential("offset disk needs cx > rho > 0 and value >= 0")

    @property
    def area(self) -> float:
        return math.pi * self.rho ** 2

    def arc(self, r: float) -> float:
        """Angular measure of ``{theta : r e^{i theta} in disk}``."""
        if r <= self.cx - self.rho or r >= self.cx + self.rho:
            return 0.0
        c = (r * r + self.cx ** 2 - self.rho ** 2) / (2 * r * self.cx)
        return 2.0 * math.acos(max(-1.0, min(1.0, c)))

    def area_within(self, R: float) -> float:
        """Area of the disk inside ``|x| < R`` (lens formula)."""
        d, p = self.cx, self.rho
        if R <= d - p:
            return 0.0
        if R >= d + p:
            return self.area
        a1 = p * p * math.acos(max(-1.0, min(1.0, (d * d + p * p - R * R) / (2 * d * p))))
        a2 = R * R * math.acos(max(-1.0, min(1.0, (d * d + R * R - p * p) / (2 * d * R))))
        k = max(0.0, (-d + p + R) * (d + p - R) * (d - p + R) * (d + p + R))
        return a1 + a2 - 0.5 * math.sqrt(k)

    def area_in_annulus(self, t_lo: float, t_hi: float) -> float:
        R2 = math.exp(t_hi) if t_hi < 700 else math.inf
        R1 = math.exp(t_lo) if t_lo > -700 else 0.0
        return self.area_within(R2) - self.area_within(R1)

    def contains(self, x: float, y: float) -> bool:
        return (x - self.cx) ** 2 + y * y < self.rho ** 2

    def text(self) -> str:
        return f"disk center={_num(self.cx)} radius={_num(self.rho)} value={_num(self.value)}"


@dataclass(frozen=True)
class Potential:
    """Nonnegative potential: disjoint polar regions plus offset disks."""

    regions: tuple = ()
    disks: tuple = ()
    name: str = ""
    params: tuple = ()

    def __post_init__(self):
        regs = [r for r in self.regions]
        for i in range(len(regs)):
            for j in range(i + 1, len(regs)):
                a, b = regs[i], regs[j]
                if a.t_lo < b.t_hi and b.t_lo < a.t_hi and a.th_lo < b.th_hi and b.th_lo < a.th_hi:
                    raise InvalidPotential("regions overlap")
        for d in self.disks:
            for r in regs:
                if r.t_lo < math.log(d.cx + d.rho) and math.log(d.cx - d.rho) < r.t_hi and r.th_lo < 0 < r.th_hi:
                    if r.coef > 0:
                        raise InvalidPotential("offset disks must not overlap regions")

    # basic queries -------------------------------------------------------
    @property
    def live_regions(self) -> tuple:
        return tuple(r for r in self.regions if not r.is_zero())

    @property
    def live_disks(self) -> tuple:
        return tuple(d for d in self.disks if d.value > 0)

    def is_zero(self) -> bool:
        return not self.live_regions and not self.live_disks

    @property
    def is_radial(self) -> bool:
        return not self.live_disks and all(r.full_circle and r.angular.is_constant
                                           for r in self.live_regions)

    @property
    def form(self) -> str:
        if self.is_radial:
            return "radial"
        if len(self.live_regions) == 1 and not self.live_disks:
            return "separable"
        return "piecewise"

    def support(self) -> tuple:
        """Radial support ``(r_min, r_max)``."""
        if self.is_zero():
            return (0.0, 0.0)
        ts = [(r.t_lo, r.t_hi) for r in self.live_regions]
        ts += [(math.log(d.cx - d.rho), math.log(d.cx + d.rho)) for d in self.live_disks]
        lo = min(a for a, _ in ts)
        hi = max(b for _, b in ts)
        return (math.exp(lo) if lo > -745 else 0.0, math.exp(hi) if hi < 709 else math.inf)

    def t_support(self) -> tuple:
        if self.is_zero():
            return (0.0, 0.0)
        ts = [(r.t_lo, r.t_hi) for r in self.live_regions]
        ts += [(math.log(d.cx - d.rho), math.log(d.cx + d.rho)) for d in self.live_disks]
        return min(a for a, _ in ts), max(b for _, b in ts)

    def value_polar(self, r: float, th: float) -> float:
        th = math.atan2(math.sin(th), math.cos(th))
        if r <= 0:
            return 0.0
        t = math.log(r)
        total = sum(reg.value(t, th) for reg in self.live_regions)
        x, y = r * math.cos(th), r * math.sin(th)
        total += sum(d.value for d in self.live_disks if d.contains(x, y))
        return total

    def value(self, x: float, y: float) -> float:
        return self.value_polar(math.hypot(x, y), math.atan2(y, x))

    def value_t(self, t: float, th: float) -> float:
        """``V`` at ``ln r = t`` (works for radii beyond floating range)."""
        total = sum(reg.value(t, th) for reg in self.live_regions)
        if self.live_disks and t < 700:
            r = math.exp(t)
            total += sum(d.value for d in self.live_disks
                         if d.contains(r * math.cos(th), r * math.sin(th)))
        return total

    def scaled(self, c: float) -> "Potential":
        if c < 0:
            raise InvalidPotential("scaling must be nonnegative")
        regs = tuple(Region(r.t_lo, r.t_hi, r.radial.scaled(c), r.angular, r.th_lo, r.th_hi)
                     for r in self.regions)
        disks = tuple(OffsetDisk(d.cx, d.rho, d.value * c) for d in self.disks)
        return Potential(regs, disks, self.name, self.params)

    def param(self, key: str, default=None):
        return dict(self.params).get(key, default)

    # serialisation --------------------------------------------------------
    def to_text(self) -> str:
        lines = []
        if self.name:
            lines.append(f"name = {self.name}")
        for k, v in self.params:
            lines.append(f"param {k} = {_num(v) if isinstance(v, float) else v}")
        for r in self.regions:
            lines.append(r.text())
        for d in self.disks:
            lines.append(d.text())
        return "\n".join(lines) + "\n"

    # validation -------------------------------------------------------------
    def check_sampled(self, n: int = 64, seed: int = 0) -> None:
        """Sampled ``V >= 0`` and finiteness away from declared singular points."""
        rng = np.random.default_rng(seed)
        for reg in self.live_regions:
            lo = reg.t_lo if reg.t_lo > -50 else -50.0
            hi = reg.t_hi if reg.t_hi < 50 else 50.0
            if not lo < hi:
                continue
            for _ in range(n):
                t = rng.uniform(lo, hi)
                th = rng.uniform(reg.th_lo, reg.th_hi)
                v = reg.value(t, th)
                if not v >= 0 or math.isnan(v):
                    raise InvalidPotential(f"negative or undefined value at t={t}, theta={th}")

    def decay_classes(self) -> dict:
        """Exponent classes of each region at ``r -> inf`` and ``r -> 0``."""
        out = {}
        for i, reg in enumerate(self.live_regions):
            if reg.t_hi == math.inf:
                out[(i, "inf")] = reg.radial.end_class("inf")
            if reg.t_lo == -math.inf:
                out[(i, "origin")] = reg.radial.end_class("origin")
        return out

    def check_decay(self, probes: Sequence[float] = (30.0, 60.0, 120.0)) -> None:
        """Declared classes agree with direct evaluation within a factor of two."""
        for (i, where), g in self.decay_classes().items():
            reg = self.live_regions[i]
            for p in probes:
                t = p if where == "inf" else -p
                lx = t
                pred = math.log(g.coef) + g.a * lx + g.b * math.log(abs(lx))
                if g.c:
                    pred += g.c * math.log(math.log(abs(lx)))
                got = reg.radial.log_value(t)
                if abs(got - pred) > math.log(2.0):
                    raise InvalidPotential(f"decay class mismatch at t={t}: {got} vs {pred}")


_REGION_RE = re.compile(r"^region\s+t\s*=\s*\[([^,\]]+),([^\]]+)\]\s*(?:theta\s*=\s*\[([^,\]]+),([^\]]+)\])?\s*$")
_DISK_RE = re.compile(r"^disk\s+center\s*=\s*(\S+)\s+radius\s*=\s*(\S+)\s+value\s*=\s*(\S+)\s*$")


def parse_potential(text: str) -> Potential:
    """Parse the line-oriented potential description written by :meth:`Potential.to_text`."""
    name = ""
    params = []
    regions = []
    disks = []
    cur = None

    def flush():
        if cur is not None:
            regions.append(Region(cur["t"][0], cur["t"][1], cur.get("radial", ONE_R),
                                  cur.get("angular", ONE_TH), cur["th"][0], cur["th"][1]))

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("name"):
                name = line.split("=", 1)[1].strip()
            elif line.startswith("param"):
                k, v = line[5:].split("=", 1)
                v = v.strip()
                try:
                    params.append((k.strip(), _parse_num(v)))
                except ConfigError:
                    params.append((k.strip(), v))
            elif line.startswith("region"):
                flush()
                m = _REGION_RE.match(line)
                if not m:
                    raise ConfigError("bad region header")
                th = (-math.pi, math.pi)
                if m.group(3) is not None:
                    th = (_parse_num(m.group(3)), _parse_num(m.group(4)))
                cur = {"t": (_parse_num(m.group(1)), _parse_num(m.group(2))), "th": th}
            elif line.startswith("radial") or line.startswith("angular"):
                if cur is None:
                    raise ConfigError("formula outside a region block")
                key, expr = line.split("=", 1)
                key = key.strip()
                cur[key] = Formula.parse(expr.strip(), "r" if key == "radial" else "th")
            elif line.startswith("disk"):
                flush()
                cur = None
                m = _DISK_RE.match(line)
                if not m:
                    raise ConfigError("bad disk line")
                disks.append(OffsetDisk(*(_parse_num(g) for g in m.groups())))
            else:
                raise ConfigError("unknown directive")
        except (ConfigError, InvalidPotential) as exc:
            raise ConfigError(f"line {lineno}: {exc}: {raw.strip()!r}") from None
    flush()
    try:
        return Potential(tuple(regions), tuple(disks), name, tuple(params))
    except InvalidPotential as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# one-dimensional integrals of region factors


def angular_integral(reg: Region, power: float = 1.0) -> float:
    """``int H(theta)^power dtheta`` over the region's angular range (``inf`` if divergent)."""
    H = reg.angular
    if H.is_constant:
        return (H.coef ** power) * reg.theta_length
    for c in reg.angular_centers():
        for side in (1, -1):
            if (side == 1 and c >= reg.th_hi) or (side == -1 and c <= reg.th_lo):
                continue
            g = H.end_class("center", c).power(power)
            if not g.integrable(0.0):
                return math.inf
    terms, atoms = _compile(H, 0.0, 0.0)
    total = 0.0
    for seg in reg.angular_segments():
        coord, c, _, _ = seg

        def g(y, coord=coord, c=c):
            v, aux, ac, sg, al, lj = _point(coord, c, y)
            lv = K.log_term(terms, 0, atoms, v, aux, ac, sg, al)
            return _safe_exp(power * lv + lj)

        total += _quad_segment(g, seg)
    return total


def _radial_log_integrand(reg: Region, logw: Callable, power: float = 1.0, measure_t: float = 2.0):
    """Integrand ``F^power * w * exp(measure_t * t)`` in segment coordinates."""
    terms, atoms = _compile(reg.radial, 0.0, 0.0)

    def make(seg):
        coord, c, _, _ = seg

        def g(y):
            t, aux, ac, sg, al, lj = _point(coord, c, y)
            lw = logw(t, coord, c, y)
            if lw == -math.inf:
                return 0.0
            # fold exp(measure_t * t) into the radial-power term to avoid inf*0
            lv = terms[0, 0] * power
            tc = terms[0, 1] * power + measure_t
            if tc != 0.0:
                lv += tc * t
            for j in range(atoms.shape[0]):
                lv += power * K.log_atom(atoms[j], t, aux, ac, sg, al)
            return _safe_exp(lv + lw + lj)

        return g

    return make


def radial_integral(reg: Region, t_lo: float, t_hi: float, logw: Optional[Callable] = None,
                    power: float = 1.0, measure_t: float = 2.0) -> float:
    """``int F(e^t)^power w(t) e^{measure_t t} dt`` over the region clipped to ``(t_lo, t_hi)``."""
    if logw is None:
        logw = _w_one
    make = _radial_log_integrand(reg, logw, power, measure_t)
    total = 0.0
    for seg in reg.radial_segments(t_lo, t_hi):
        total += _quad_segment(make(seg), seg)
        if not math.isfinite(total):
            return math.inf
    return total


# ---------------------------------------------------------------------------
# weights


def _w_one(t, coord, c, y):
    return 0.0


def _w_log1p(t, coord, c, y):
    if t > 30:
        lt = _log_abs_t(t, coord, c, y)
        return lt + math.log1p(math.log1p(math.exp(-t)) / t) if t < 1e300 else lt
    if t < -30:
        return t
    return math.log(math.log1p(math.exp(t)))


def _w_log2p(t, coord, c, y):
    if t > 30:
        lt = _log_abs_t(t, coord, c, y)
        return lt + math.log1p(math.log1p(2 * math.exp(-t)) / t) if t < 1e300 else lt
    return math.log(math.log(2.0 + math.exp(t)))


def _w_logplus(t, coord, c, y):
    return _log_abs_t(t, coord, c, y) if t > 0 else -math.inf


def _w_logplus_inv(t, coord, c, y):
    return _log_abs_t(t, coord, c, y) if t < 0 else -math.inf


def _w_loglog(t, coord, c, y):
    if t <= 1:
        return -math.inf
    return math.log(_log_abs_t(t, coord, c, y))


def _w_abs_t(t, coord, c, y):
    return _log_abs_t(t, coord, c, y)


def _w_log(t, coord, c, y):
    # signed weight ln r handled by splitting at t = 0; here |t|
    return _log_abs_t(t, coord, c, y)


@dataclass(frozen=True)
class Weight:
    """Radial weight ``w(|x|)`` with its classes at infinity, at the origin and near 1."""

    name: str
    logw: Callable = field(repr=False)
    at_inf: Growth
    at_origin: Optional[Growth]  # None: vanishes identically near the origin
    vanish_inf: bool = False  # vanishes identically for large r

    def at_radius(self, r0: float, side: int) -> Optional[Growth]:
        """Class of the weight near a finite radius ``r0`` approached from ``side``."""
        v = self.value(r0)
        if v > 0:
            return const_growth("zero", v)
        probe = r0 * (1 + 1e-6 * side)
        if self.value(probe) == 0:
            return None
        return Growth("zero", 1.0, 0.0, 0.0, 1.0)

    def value(self, r: float) -> float:
        t = math.log(r)
        lw = self.logw(t, 0, 0.0, t)
        return math.exp(lw) if lw > -745 else 0.0


WEIGHTS = {
    "One": Weight("One", _w_one, Growth("inf"), Growth("zero")),
    "Log1p": Weight("Log1p", _w_log1p, Growth("inf", 0, 1, 0), Growth("zero", 1, 0, 0)),
    "Log2p": Weight("Log2p", _w_log2p, Growth("inf", 0, 1, 0), Growth("zero", 0, 0, 0, math.log(2))),
    "LogPlusAbs": Weight("LogPlusAbs", _w_logplus, Growth("inf", 0, 1, 0), None),
    "LogPlusInv": Weight("LogPlusInv", _w_logplus_inv, Growth("inf", 0, 0, 0, 0.0),
                         Growth("zero", 0, 1, 0), vanish_inf=True),
    "LogLog": Weight("LogLog", _w_loglog, Growth("inf", 0, 0, 1), None),
    "AbsLog": Weight("AbsLog", _w_abs_t, Growth("inf", 0, 1, 0), Growth("zero", 0, 1, 0)),
}


def _region_weighted_check(reg: Region, w: Weight, psi: str = "id", p: float = 1.0) -> Optional[str]:
    """Reason string if ``int Psi(V) w`` over the region diverges, else ``None``.

    Raises :class:`MissingDecayClass` when the exponent calculus cannot decide.
    """
    F, H = reg.radial, reg.angular
    h_bounded = _angular_bounded(reg)
    f_bounded = _radial_bounded(reg)
    separable_ok = psi in ("id", "pow")
    if not (h_bounded or separable_ok or (f_bounded and math.isfinite(reg.t_lo) and math.isfinite(reg.t_hi))):
        raise MissingDecayClass("both factors unbounded: Orlicz integrability not decided by exponents")
    # radial ends
    checks = []
    if reg.t_hi == math.inf:
        if not w.vanish_inf:
            checks.append(("r->inf", F.end_class("inf"), w.at_inf, 1.0))
    if reg.t_lo == -math.inf and w.at_origin is not None:
        checks.append(("r->0", F.end_class("origin"), w.at_origin, 1.0))
    for c in reg.radial_centers():
        r0 = math.exp(c)
        for side in (1, -1):
            if (side == 1 and c >= reg.t_hi) or (side == -1 and c <= reg.t_lo):
                continue
            wc = w.at_radius(r0, side)
            if wc is None:
                continue
            checks.append((f"r->{r0:g}", F.end_class("center", r0), wc, 0.0))
    for label, fc, wc, m in checks:
        comp = fc.compose("B" if psi == "B" else psi, p) if psi != "id" else fc
        if psi == "B" and not h_bounded:
            continue  # radial factor is bounded here, angular checks decide
        g = comp.times(Growth(comp.end, wc.a, wc.b, wc.c, wc.coef))
        if not g.integrable(m):
            return f"divergent at {label}: integrand ~ {g.describe()} against X^{m:g} dX"
    # angular singularities
    for c in reg.angular_centers():
        gc = H.end_class("center", c)
        if psi == "id":
            comp = gc
        elif psi == "pow":
            comp = gc.power(p)
        else:
            if not f_bounded:
                continue
            comp = gc.compose("B")
        if not comp.integrable(0.0):
            return f"divergent at theta->{c:g}: {comp.describe()}"
    return None


def _radial_bounded(reg: Region) -> bool:
    F = reg.radial
    try:
        if reg.t_hi == math.inf and F.end_class("inf").trend() == "inf":
            return False
        if reg.t_lo == -math.inf and F.end_class("origin").trend() == "inf":
            return False
        for c in reg.radial_centers():
            if F.end_class("center", math.exp(c)).trend() == "inf":
                return False
    except MissingDecayClass:
        return False
    return True


def _angular_bounded(reg: Region) -> bool:
    H = reg.angular
    for c in reg.angular_centers():
        if H.end_class("center", c).trend() == "inf":
            return False
    return True


def weighted_integral(V: Potential, weight: str = "One", *, t_range: tuple = (-math.inf, math.inf)) -> Value:
    """``int V(x) w(|x|) dx`` over ``t_range`` (in ``ln|x|``).

    ``weight`` is one of ``One``, ``Log1p`` (``ln(1+|x|)``), ``Log2p``,
    ``LogPlusAbs`` (``ln_+|x|``), ``LogPlusInv`` (``ln_+(1/|x|)``), ``LogLog``
    (``ln ln|x|`` on ``|x| > e``, zero inside) or ``AbsLog`` (``|ln|x||``).
    Divergence is decided from exponent classes and returned as
    :class:`~speclab.values.Infinite` with the offending rate.
    """
    if weight not in WEIGHTS:
        raise ValueError(f"unknown weight {weight!r}")
    w = WEIGHTS[weight]
    total = 0.0
    for reg in V.live_regions:
        r = reg.clipped(*t_range)
        if r is None:
            continue
        try:
            why = _region_weighted_check(r, w)
        except MissingDecayClass as exc:
            return Unknown(str(exc), total)
        if why is not None:
            return Infinite(why)
        ang = angular_integral(r)
        if not math.isfinite(ang):
            return Infinite("angular factor not integrable")
        rad = radial_integral(r, -math.inf, math.inf, w.logw)
        if not math.isfinite(rad):
            return Unknown("quadrature did not converge although exponents allow it", total)
        total += ang * rad
    for d in V.live_disks:
        total += d.value * _disk_radial_integral(d, lambda r: w.value(r), t_range)
    return total


def _disk_radial_integral(d: OffsetDisk, wfun: Callable[[float], float],
                          t_range: tuple = (-math.inf, math.inf)) -> float:
    """``int_disk w(|x|) dx`` restricted to ``t_range``."""
    lo = max(d.cx - d.rho, math.exp(t_range[0]) if t_range[0] > -700 else 0.0)
    hi = min(d.cx + d.rho, math.exp(t_range[1]) if t_range[1] < 700 else math.inf)
    if not lo < hi:
        return 0.0
    # substitute r = cx + rho*cos(phi) to remove the square-root end behaviour
    def g(phi):
        r = d.cx + d.rho * math.cos(phi)
        return d.arc(r) * r * wfun(r) * d.rho * math.sin(phi)

    p_hi = math.acos(max(-1.0, min(1.0, (lo - d.cx) / d.rho)))
    p_lo = math.acos(max(-1.0, min(1.0, (hi - d.cx) / d.rho)))
    return _quad(g, p_lo, p_hi, None, QuadratureSpec(1e-15, 1e-11, 200))


# ---------------------------------------------------------------------------
# samples on annuli (for Orlicz norms)


def _t_log_piece(F: Formula, seg, extra_logf: float, measure_t: float, extra_logw: float) -> LogPiece:
    terms, atoms = _compile(F, 0.0, 0.0)
    coord, c, ylo, yhi = seg
    lo = -60.0 if (coord == 1 and ylo == -math.inf and False) else ylo

    def logf(y):
        t, aux, ac, sg, al, _ = _point(coord, c, y)
        return K.log_term(terms, 0, atoms, t, aux, ac, sg, al) + extra_logf

    def logw(y):
        t, aux, ac, sg, al, lj = _point(coord, c, y)
        mt = measure_t * t if measure_t else 0.0
        return mt + lj + extra_logw

    pts = ()
    if math.isfinite(ylo) and math.isfinite(yhi) and yhi - ylo > 50:
        pts = tuple(np.linspace(ylo, yhi, int(min(200, (yhi - ylo) / 25)) + 1)[1:-1])
    return LogPiece(lo, yhi, logf, logw, 0.0, pts)


def _annulus_area(t_lo: float, t_hi: float) -> float:
    if t_hi == math.inf:
        return math.inf
    hi = math.exp(2 * t_hi)
    lo = math.exp(2 * t_lo) if t_lo > -370 else 0.0
    return 0.5 * (hi - lo)


def region_sample(reg: Region) -> MeasurableSample:
    """``V`` on the region with area measure."""
    F, H = reg.radial, reg.angular
    theta = reg.theta_length
    if F.is_constant and H.is_constant:
        area = theta * _annulus_area(reg.t_lo, reg.t_hi)
        return MeasurableSample.piecewise_constant([area], [F.coef * H.coef])
    if H.is_constant:
        lp = tuple(_t_log_piece(F, s, math.log(H.coef), 2.0, math.log(theta))
                   for s in reg.radial_segments())
        return MeasurableSample(Domain("cells", (theta * _annulus_area(reg.t_lo, reg.t_hi),)),
                                log_pieces=lp)
    area_r = _annulus_area(reg.t_lo, reg.t_hi)
    if F.is_constant:
        lp = tuple(_t_log_piece(H, s, math.log(F.coef), 0.0, math.log(area_r))
                   for s in reg.angular_segments())
        return MeasurableSample(Domain("cells", (theta * area_r,)), log_pieces=lp)
    prods = []
    for rs in reg.radial_segments():
        inner = _t_log_piece(F, rs, 0.0, 2.0, 0.0)
        for s in reg.angular_segments():
            prods.append(ProductPiece(inner, _t_log_piece(H, s, 0.0, 0.0, 0.0)))
    return MeasurableSample(Domain("cells", (theta * area_r,)), products=tuple(prods))


def annulus_sample(V: Potential, t_lo: float, t_hi: float) -> MeasurableSample:
    """``V`` restricted to ``t_lo < ln|x| < t_hi`` with the area measure of the annulus."""
    dom = Domain("cells", (TWO_PI * _annulus_area(t_lo, t_hi),)) if t_hi < math.inf else Domain("plane")
    out = MeasurableSample(dom)
    for reg in V.live_regions:
        r = reg.clipped(t_lo, t_hi)
        if r is not None:
            out = out.joined(region_sample(r), dom)
    cells_m, cells_v = [], []
    for d in V.live_disks:
        a = d.area_in_annulus(t_lo, t_hi)
        if a > 0:
            cells_m.append(a)
            cells_v.append(d.value)
    if cells_m:
        out = out.joined(MeasurableSample.piecewise_constant(cells_m, cells_v), dom)
    return out


def radial_line_sample(reg: Region, t_lo: float, t_hi: float, factor: float = 1.0) -> MeasurableSample:
    """``r -> factor * F(r)`` on ``(e^t_lo, e^t_hi)`` with the measure ``dr``."""
    r = reg.clipped(t_lo, t_hi)
    lo = math.exp(t_lo)
    hi = math.exp(t_hi) if t_hi < 709 else math.inf
    dom = Domain("interval", (lo, hi))
    if r is None:
        return MeasurableSample(dom)
    F = r.radial
    if F.is_constant:
        a = math.exp(r.t_lo)
        b = math.exp(r.t_hi) if r.t_hi < 709 else math.inf
        return MeasurableSample.piecewise_constant([b - a], [F.coef * factor], dom)
    lp = tuple(_t_log_piece(F, s, math.log(factor), 1.0, 0.0) for s in r.radial_segments())
    return MeasurableSample(dom, log_pieces=lp)


def angular_sample(reg: Region, factor: float = 1.0) -> MeasurableSample:
    """``theta -> factor * H(theta)`` on the circle (zero outside the region's range)."""
    H = reg.angular
    dom = Domain("circle")
    if H.is_constant:
        return MeasurableSample.piecewise_constant([reg.theta_length], [H.coef * factor], dom)
    lp = tuple(_t_log_piece(H, s, math.log(factor), 0.0, 0.0) for s in reg.angular_segments())
    return MeasurableSample(dom, log_pieces=lp)


# ---------------------------------------------------------------------------
# logarithmic reduction


@dataclass(eq=False)
class LogProfile:
    """``G(t) = e^{2t} * (angular mean of V at r = e^t)`` as kernel-ready pieces.

    ``pieces`` rows are ``[coord, y_lo, y_hi, center, term_start, term_end]``
    and cover the support contiguously (gaps carry no terms).  ``disks``
    contribute to values and integrals but not to the shooting kernel.
    ``tail`` optionally bounds ``t^2 G(t)`` beyond the last piece as
    ``(lo, hi)`` for profiles that are truncations of infinite constructions.
    """

    pieces: np.ndarray
    terms: np.ndarray
    atoms: np.ndarray
    disks: tuple = ()
    tail: Optional[tuple] = None
    label: str = ""

    @classmethod
    def empty(cls) -> "LogProfile":
        return cls(np.zeros((0, 6)), np.zeros((0, 4)), np.zeros((0, 6)))

    @classmethod
    def from_terms(cls, segs_terms: Sequence, disks: tuple = (), tail=None, label: str = "") -> "LogProfile":
        """Build from ``[(segment, [(formula, extra_t, logw), ...]), ...]``."""
        pieces, terms, atoms = [], [], []
        for seg, fl in segs_terms:
            t0 = len(terms)
            for f, extra_t, logw in fl:
                tr, ar = _compile(f, extra_t, logw)
                row = tr[0].copy()
                row[2] += len(atoms)
                row[3] += len(atoms)
                terms.append(row)
                atoms.extend(ar.tolist())
            coord, c, ylo, yhi = seg
            pieces.append([coord, ylo, yhi, c, t0, len(terms)])
        return cls(np.array(pieces, dtype=float).reshape(-1, 6), np.array(terms, dtype=float).reshape(-1, 4),
                   np.array(atoms, dtype=float).reshape(-1, 6), tuple(disks), tail, label)

    # geometry ---------------------------------------------------------------
    def seg(self, i: int) -> tuple:
        p = self.pieces[i]
        return int(p[0]), float(p[3]), float(p[1]), float(p[2])

    def t_range(self, i: int) -> tuple:
        return _seg_t_range(self.seg(i))

    def support(self) -> tuple:
        """``(t_min, t_max)`` of the pieces carrying terms and of the disks."""
        lo, hi = math.inf, -math.inf
        for i in range(len(self.pieces)):
            if self.pieces[i, 5] > self.pieces[i, 4]:
                a, b = self.t_range(i)
                lo, hi = min(lo, a), max(hi, b)
        for d in self.disks:
            lo = min(lo, math.log(d.cx - d.rho))
            hi = max(hi, math.log(d.cx + d.rho))
        return lo, hi

    def is_zero(self) -> bool:
        return not np.any(self.pieces[:, 5] > self.pieces[:, 4]) and not self.disks if len(self.pieces) else not self.disks

    @property
    def kernel_ready(self) -> bool:
        return not self.disks

    # evaluation -------------------------------------------------------------
    def _log_at(self, i: int, y: float) -> float:
        coord, c, _, _ = self.seg(i)
        t, aux, ac, sg, al, _ = _point(coord, c, y)
        lo, hi = int(self.pieces[i, 4]), int(self.pieces[i, 5])
        vals = [K.log_term(self.terms, j, self.atoms, t, aux, ac, sg, al) for j in range(lo, hi)]
        if not vals:
            return -math.inf
        m = max(vals)
        if m == -math.inf or m == math.inf:
            return m
        return m + math.log(sum(math.exp(v - m) for v in vals))

    def _disk_value(self, t: float) -> float:
        if not self.disks or t > 700:
            return 0.0
        r = math.exp(t)
        return sum(d.value * d.arc(r) for d in self.disks) * r * r / TWO_PI

    def value(self, t: float) -> float:
        total = self._disk_value(t)
        for i in range(len(self.pieces)):
            a, b = self.t_range(i)
            if a < t < b or (t == a and i == 0):
                coord, c, _, _ = self.seg(i)
                lv = self._log_at(i, _y_of(coord, c, t))
                total += math.exp(lv) if lv < 709 else math.inf
                break
        return total

    def values(self, ts: Sequence[float]) -> np.ndarray:
        return np.array([self.value(float(t)) for t in ts])

    def integrate(self, logw: Callable = _w_one, t_lo: float = -math.inf, t_hi: float = math.inf) -> float:
        """``int G(t) w(t) dt`` over ``(t_lo, t_hi)``; ``logw(t, coord, center, y)``."""
        total = 0.0
        for i in range(len(self.pieces)):
            if self.pieces[i, 5] <= self.pieces[i, 4]:
                continue
            s = _clip_seg(self.seg(i), t_lo, t_hi)
            if s is None:
                continue
            coord, c, _, _ = s

            def g(y, i=i, coord=coord, c=c):
                t, _, _, _, _, lj = _point(coord, c, y)
                lw = logw(t, coord, c, y)
                if lw == -math.inf:
                    return 0.0
                return _safe_exp(self._log_at(i, y) + lw + lj)

            total += _quad_segment(g, s)
            if not math.isfinite(total):
                return math.inf
        for d in self.disks:
            def wr(r, d=d):
                t = math.log(r)
                lw = logw(t, 0, 0.0, t)
                return math.exp(lw) / (r * r) if lw > -745 else 0.0
            total += d.value * _disk_radial_integral(d, wr, (t_lo, t_hi)) / TWO_PI
        return total

    def mass(self) -> float:
        """``int 2 pi G(t) dt``, which equals ``int V dx``."""
        return TWO_PI * self.integrate()

    def extrema(self, t_lo: float, t_hi: float, weight: str = "one", n: int = 400) -> tuple:
        """Sampled ``(inf, sup)`` of ``G`` or ``t^2 G`` (``weight="t2"``) on ``(t_lo, t_hi)``.

        Pieces of the form ``c/t^2`` are evaluated exactly, others on a dense
        grid in the piece coordinate including the end points.
        """
        lo_v, hi_v = math.inf, -math.inf
        covered = []
        for i in range(len(self.pieces)):
            s = _clip_seg(self.seg(i), t_lo, t_hi)
            if s is None:
                continue
            coord, c, ylo, yhi = s
            covered.append(_seg_t_range(s))
            a = ylo if math.isfinite(ylo) else (yhi - 60 if math.isfinite(yhi) else -60)
            b = yhi if math.isfinite(yhi) else a + 60
            for y in np.linspace(a, b, n):
                t, *_ = _point(coord, c, float(y))
                lv = self._log_at(i, float(y))
                if weight == "t2":
                    lv += 2.0 * _log_abs_t(t, coord, c, float(y))
                v = math.exp(lv) if lv < 709 else math.inf
                lo_v, hi_v = min(lo_v, v), max(hi_v, v)
        # uncovered parts are zero
        if not covered:
            return 0.0, 0.0
        covered.sort()
        gap = covered[0][0] > t_lo or covered[-1][1] < t_hi or any(
            covered[k][1] < covered[k + 1][0] for k in range(len(covered) - 1))
        if gap:
            lo_v = 0.0
        return max(lo_v, 0.0), max(hi_v, 0.0)


def log_reduce(V: Potential) -> LogProfile:
    """``G(t) = (e^{2t}/2 pi) int V(e^t, theta) dtheta`` as a :class:`LogProfile`."""
    regs = V.live_regions
    if not regs:
        return LogProfile.from_terms([], V.live_disks)
    cuts = set()
    centers = set()
    for r in regs:
        cuts.update([r.t_lo, r.t_hi])
        centers.update(r.radial_centers())
    lo = min(r.t_lo for r in regs)
    hi = max(r.t_hi for r in regs)
    cuts = sorted(c for c in cuts | centers if lo <= c <= hi)
    hbar = {id(r): angular_integral(r) / TWO_PI for r in regs}
    out = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        active = [r for r in regs if r.t_lo <= a and b <= r.t_hi]
        sc = [c for c in centers if c in (a, b)]
        for seg in segments(a, b, sc):
            fl = []
            for r in active:
                hb = hbar[id(r)]
                lw = math.log(hb) if hb > 0 else -math.inf
                if lw == -math.inf:
                    continue
                fl.append((r.radial, 2.0, lw))
            out.append((seg, fl))
    return LogProfile.from_terms(out, V.live_disks)


def profile_from_g(pieces: Sequence, tail=None, label: str = "") -> LogProfile:
    """Profile from explicit ``(t_lo, t_hi, formula)`` pieces with ``G`` itself given by the formula.

    The formula is read as a function of ``t`` through its radial atoms
    (``L(|r|)^-2`` is ``|t|^-2``).  Bounds may be given in ``ln t`` by passing
    ``("s", s_lo, s_hi, formula)``, which keeps enormous ``t`` representable.
    """
    out = []
    for p in pieces:
        if p[0] == "s":
            _, s_lo, s_hi, f = p
            out.append(((1, 0.0, s_lo, s_hi), [(f, 0.0, 0.0)]))
        else:
            a, b, f = p
            for seg in segments(a, b, f.centers()):
                out.append((seg, [(f, 0.0, 0.0)]))
    return LogProfile.from_terms(out, (), tail, label)


# ---------------------------------------------------------------------------
# rearrangement


def _monotone_breaks(logf: Callable[[float], float], a: float, b: float, n: int = 257) -> list:
    """Interior local extrema of ``logf`` on ``(a, b)`` (grid scan plus golden refinement)."""
    ys = np.linspace(a, b, n)
    vs = np.array([logf(float(y)) for y in ys])
    d = np.sign(np.diff(vs))
    out = []
    for i in range(1, len(d)):
        if d[i] != 0 and d[i - 1] != 0 and d[i] != d[i - 1]:
            sgn = d[i - 1]
            res = optimize.minimize_scalar(lambda y: -sgn * logf(y), bounds=(ys[i - 1], ys[i + 1]),
                                           method="bounded", options={"xatol": 1e-12})
            out.append(float(res.x))
    return out


@dataclass(frozen=True)
class _MonoPiece:
    # a monotone stretch of log f in segment coordinates
    coord: int
    center: float
    y_lo: float
    y_hi: float
    logf: Callable = field(repr=False)
    f_lo: float = 0.0
    f_hi: float = 0.0


def _mono_pieces(F: Formula, segs: list, extra: float = 0.0) -> list:
    terms, atoms = _compile(F, 0.0, 0.0)
    out = []
    for seg in segs:
        coord, c, ylo, yhi = seg

        def logf(y, coord=coord, c=c):
            t, aux, ac, sg, al, _ = _point(coord, c, y)
            return K.log_term(terms, 0, atoms, t, aux, ac, sg, al) + extra

        a = ylo if math.isfinite(ylo) else (yhi if math.isfinite(yhi) else 0.0) - 200.0
        b = yhi if math.isfinite(yhi) else max(a, 0.0) + 200.0
        brk = _monotone_breaks(logf, a, b) if a < b else []
        pts = [ylo] + brk + [yhi]
        for p, q in zip(pts[:-1], pts[1:]):
            out.append(_MonoPiece(coord, c, p, q, logf, _lim(logf, p, q, True), _lim(logf, p, q, False)))
    return out


def _lim(logf, p, q, at_lo):
    y = p if at_lo else q
    if math.isfinite(y):
        return logf(y)
    # step outward until the value settles
    other = q if at_lo else p
    base = other if math.isfinite(other) else 0.0
    step = -1.0 if at_lo else 1.0
    v = logf(base + step)
    for k in range(1, 12):
        v = logf(base + step * 10.0 ** (k / 2))
        if not math.isfinite(v):
            return v
    return v


def _superlevel_y(mp: _MonoPiece, level: float) -> Optional[tuple]:
    """``y``-interval of ``{log f > level}`` within a monotone piece."""
    a, b = mp.f_lo, mp.f_hi
    if max(a, b) <= level:
        return None
    if min(a, b) > level:
        return mp.y_lo, mp.y_hi
    lo = mp.y_lo if math.isfinite(mp.y_lo) else None
    hi = mp.y_hi if math.isfinite(mp.y_hi) else None
    # finite bracket for the root
    if lo is None:
        lo = (hi if hi is not None else 0.0) - 1.0
        while (mp.logf(lo) - level) * (b - level) > 0 and lo > -1e6:
            lo = lo * 2 - 1 if lo < 0 else -1.0
    if hi is None:
        hi = lo + 1.0
        while (mp.logf(hi) - level) * (a - level) > 0 and hi < 1e6:
            hi = hi * 2 + 1 if hi > 0 else 1.0
    g = lambda y: mp.logf(y) - level  # noqa: E731
    try:
        root = optimize.brentq(g, lo, hi, xtol=1e-14, rtol=1e-14, maxiter=500)
    except ValueError:
        return None
    if b > a:
        return root, mp.y_hi
    return mp.y_lo, root


def _half_r2(coord: int, c: float, y: float) -> float:
    t, *_ = _point(coord, c, y)
    if t == -math.inf:
        return 0.0
    if t > 354:
        return math.inf
    return 0.5 * math.exp(2 * t)


@dataclass(frozen=True)
class RadialProfile:
    """Nonincreasing radial profile given by its distribution function.

    ``mu(s) = |{V > s}|``; ``steps`` holds an exact description
    ``[(value, cumulative measure), ...]`` (values decreasing) when ``V`` is
    piecewise constant.
    """

    mu: Callable = field(repr=False)
    sup: float = math.inf
    steps: Optional[tuple] = None
    nonincreasing: bool = True

    @property
    def breakpoints(self) -> tuple:
        if self.steps is None:
            return ()
        return tuple(math.sqrt(m / math.pi) for _, m in self.steps)

    def value(self, r: float) -> float:
        """``V_*(r) = sup{s : mu(s) > pi r^2}`` (right-continuous)."""
        area = math.pi * r * r
        if self.steps is not None:
            for v, m in self.steps:
                if area < m:
                    return v
            return 0.0
        if self.mu(0.0) <= area:
            return 0.0
        lo, hi = -40.0, 40.0
        while self.mu(math.exp(hi)) > area and hi < 700:
            hi += 40.0
        while self.mu(math.exp(lo)) <= area and lo > -700:
            lo -= 40.0
        for _ in range(200):
            m = 0.5 * (lo + hi)
            if self.mu(math.exp(m)) > area:
                lo = m
            else:
                hi = m
            if hi - lo < 1e-13:
                break
        return math.exp(lo)

    def layer_integral(self, phi: Callable[[float], float], s_min: float = 0.0) -> float:
        """``int_{s_min}^inf phi(mu(s)) ds`` (exact for step profiles)."""
        if self.steps is not None:
            total = 0.0
            for k, (v, m) in enumerate(self.steps):
                nxt = self.steps[k + 1][0] if k + 1 < len(self.steps) else 0.0
                a, b = max(nxt, s_min), v
                if b > a:
                    total += (b - a) * phi(m)
            return total

        def g(sig):
            s = math.exp(sig)
            try:
                m = self.mu(s)
            except UnboundedLevelSet:
                # superlevel area beyond floating range; phi sees it as unbounded
                m = math.inf
            if m == 0:
                return 0.0
            return phi(m) * s

        lo = math.log(s_min) if s_min > 0 else -math.inf
        hi = math.log(self.sup) if math.isfinite(self.sup) else math.inf
        cuts = [lo] + [x for x in (-20.0, 0.0, 20.0) if lo < x < hi] + [hi]
        return sum(_quad(g, a, b, None, QuadratureSpec(1e-13, 1e-9, 400)) for a, b in zip(cuts[:-1], cuts[1:]))


def rearrange(V: Potential) -> RadialProfile:
    """Spherical nonincreasing rearrangement ``V_*`` via the distribution function.

    Raises
    ------
    UnboundedLevelSet
        If ``|{V > s}|`` is infinite for some ``s > 0``.
    """
    regs = V.live_regions
    for reg in regs:
        if reg.t_hi == math.inf:
            tr = reg.radial.end_class("inf").trend()
            if tr != "zero":
                raise UnboundedLevelSet("V does not tend to zero at infinity")
    if all(r.radial.is_constant and r.angular.is_constant for r in regs):
        cells = [(r.coef, r.theta_length * _annulus_area(r.t_lo, r.t_hi)) for r in regs]
        cells += [(d.value, d.area) for d in V.live_disks]
        by_val = {}
        for v, m in cells:
            by_val[v] = by_val.get(v, 0.0) + m
        steps, acc = [], 0.0
        for v in sorted(by_val, reverse=True):
            acc += by_val[v]
            steps.append((v, acc))
        mu = lambda s: sum(m for v, m in steps_raw if v > s)  # noqa: E731
        steps_raw = list(by_val.items())
        return RadialProfile(mu, max(by_val) if by_val else 0.0, tuple(steps))

    parts = []
    sup = 0.0
    for reg in regs:
        F, H = reg.radial, reg.angular
        if H.is_constant:
            mps = _mono_pieces(F, reg.radial_segments(), math.log(H.coef))
            parts.append(("r", mps, reg.theta_length))
            sup = max([sup] + [math.exp(min(max(m.f_lo, m.f_hi), 709)) for m in mps])
        elif F.is_constant:
            mps = _mono_pieces(H, reg.angular_segments(), math.log(F.coef))
            parts.append(("th", mps, _annulus_area(reg.t_lo, reg.t_hi)))
            sup = max([sup] + [math.exp(min(max(m.f_lo, m.f_hi), 709)) for m in mps])
        else:
            rmps = _mono_pieces(F, reg.radial_segments())
            parts.append(("both", rmps, reg))
            sup = math.inf
    for d in V.live_disks:
        sup = max(sup, d.value)

    def mu(s: float) -> float:
        if s <= 0:
            total = 0.0
            for reg in regs:
                total += reg.theta_length * _annulus_area(reg.t_lo, reg.t_hi)
            return total + sum(d.area for d in V.live_disks)
        ls = math.log(s)
        total = 0.0
        for kind, mps, extra in parts:
            if kind == "r":
                for mp in mps:
                    iv = _superlevel_y(mp, ls)
                    if iv:
                        total += extra * (_half_r2(mp.coord, mp.center, iv[1]) - _half_r2(mp.coord, mp.center, iv[0]))
            elif kind == "th":
                for mp in mps:
                    iv = _superlevel_y(mp, ls)
                    if iv:
                        a, _, _, _, _, _ = _point(mp.coord, mp.center, iv[0])
                        b, _, _, _, _, _ = _point(mp.coord, mp.center, iv[1])
                        total += extra * (b - a)
            else:
                reg = extra
                Ht, Ha = _compile(reg.angular, 0.0, 0.0)

                def g(y, coord, c):
                    th, aux, ac, sg, al, lj = _point(coord, c, y)
                    lh = K.log_term(Ht, 0, Ha, th, aux, ac, sg, al)
                    m = 0.0
                    for mp in mps:
                        iv = _superlevel_y(mp, ls - lh)
                        if iv:
                            m += _half_r2(mp.coord, mp.center, iv[1]) - _half_r2(mp.coord, mp.center, iv[0])
                    return m * math.exp(lj)

                for seg in reg.angular_segments():
                    total += _quad_segment(lambda y, seg=seg: g(y, seg[0], seg[1]), seg,
                                           QuadratureSpec(1e-12, 1e-8, 200))
        total += sum(d.area for d in V.live_disks if d.value > s)
        if not math.isfinite(total):
            raise UnboundedLevelSet(f"|{{V > {s:g}}}| is infinite")
        return total

    return RadialProfile(mu, sup)


def kmw_phi(m: float) -> float:
    """``int_{|x| < R} ln_+(1/|x|) dx`` with ``pi R^2 = m`` (the layer function for ``V_*``)."""
    if m <= 0:
        return 0.0
    if m >= math.pi:
        return 0.5 * math.pi
    return 0.5 * m * (1.0 + math.log(math.pi / m))

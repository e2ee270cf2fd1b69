"""N-functions and Orlicz norms on finite-measure domains.

Three norms are provided for a nonnegative integrand ``f`` on a domain with
measure ``mu``:

* the gauge (Luxemburg) norm  ``inf{k : int Psi(f/k) <= 1}``,
* the Orlicz norm, evaluated through ``inf_{k>0} (1 + int Psi(k f)) / k``,
* the average norm, the same with ``1`` replaced by ``mu``.

Integrals are taken either exactly over piecewise-constant cells or with
adaptive Gauss-Kronrod quadrature (``scipy.integrate.quad``) over smooth
pieces, with a logarithmic substitution at singular endpoints.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.integrate import IntegrationWarning

from .errors import InvalidDomain, NonIntegrable

__all__ = [
    "NFunction",
    "ExpA",
    "LLogLB",
    "Power",
    "Custom",
    "Domain",
    "Piece",
    "LogPiece",
    "ProductPiece",
    "QuadratureSpec",
    "MeasurableSample",
    "luxemburg_norm",
    "orlicz_norm",
    "average_norm",
    "dual_sup_direct",
    "embedding_constant_M",
    "golden_section",
]

_SERIES_CUT = 0.05
_LN2 = math.log(2.0)


def _b_small(s):
    # (1+s)ln(1+s) - s = sum_{n>=2} (-1)^n s^n / (n(n-1))
    out = np.zeros_like(s)
    term = s * s
    for n in range(2, 12):
        out += (-1) ** n * term / (n * (n - 1))
        term = term * s
    return out


def _a_small(s):
    out = np.zeros_like(s)
    term = s * s / 2.0
    for n in range(2, 12):
        out += term
        term = term * s / (n + 1)
    return out


def _eval_B(s):
    s = np.abs(np.asarray(s, dtype=float))
    small = s < _SERIES_CUT
    with np.errstate(over="ignore", invalid="ignore"):
        big = (1.0 + s) * np.log1p(s) - s
    return np.where(small, _b_small(np.where(small, s, 0.0)), big)


def _eval_A(s):
    s = np.abs(np.asarray(s, dtype=float))
    small = s < _SERIES_CUT
    with np.errstate(over="ignore", invalid="ignore"):
        big = np.expm1(s) - s
    return np.where(small, _a_small(np.where(small, s, 0.0)), big)


def _log_B(ell):
    """log B(e^ell), stable for every real ell."""
    ell = float(ell)
    if ell < -30.0:
        # B(s) = s^2/2 (1 - s/3 + ...)
        return 2.0 * ell - _LN2 + math.log1p(-math.exp(ell) / 3.0)
    if ell < math.log(_SERIES_CUT):
        s = math.exp(ell)
        return math.log(float(_b_small(np.array(s))))
    if ell < 35.0:
        return math.log(float(_eval_B(math.exp(ell))))
    # B(s) = s(ln(1+s) - 1) + ln(1+s) with ln(1+s) = ell + log1p(e^-ell)
    lg = ell + math.log1p(math.exp(-ell))
    return ell + math.log(lg - 1.0 + lg * math.exp(-ell))


def _log_A(ell):
    ell = float(ell)
    if ell < -30.0:
        return 2.0 * ell - _LN2 + math.log1p(math.exp(ell) / 3.0)
    if ell < math.log(_SERIES_CUT):
        s = math.exp(ell)
        return math.log(float(_a_small(np.array(s))))
    if ell > 700.0:
        return math.inf
    s = math.exp(ell)
    if s > 40.0:
        return s + math.log1p(-(1.0 + s) * math.exp(-s))
    return math.log(float(_eval_A(s)))


@dataclass(frozen=True)
class NFunction:
    """An even convex Young function together with its complementary partner.

    Parameters
    ----------
    kind : str
        One of ``"ExpA"``, ``"LLogLB"``, ``"Power"``, ``"Custom"``.
    func : callable
        Vectorised evaluation ``s -> Psi(s)``.
    deriv : callable
        Vectorised right derivative on ``[0, inf)``.
    p, scale : float, optional
        For ``Power``: ``Psi(s) = scale * |s|**p``.
    """

    kind: str
    func: Callable = field(repr=False, compare=False)
    deriv: Callable = field(repr=False, compare=False)
    p: Optional[float] = None
    scale: float = 1.0
    name: str = ""
    _partner: Optional[Callable] = field(default=None, repr=False, compare=False)
    _log: Optional[Callable] = field(default=None, repr=False, compare=False)

    def __call__(self, s):
        out = self.func(s)
        return float(out) if np.ndim(out) == 0 else out

    def logfunc(self, ell: float) -> float:
        """``log Psi(e**ell)`` without intermediate overflow."""
        if self._log is not None:
            return self._log(ell)
        if self.kind == "Power":
            return math.log(self.scale) + self.p * ell
        with np.errstate(over="ignore", divide="ignore"):
            val = float(self.func(math.exp(min(ell, 709.0))))
        return math.log(val) if val > 0 else -math.inf

    @property
    def complementary(self) -> "NFunction":
        if self.kind == "ExpA":
            return LLogLB
        if self.kind == "LLogLB":
            return ExpA
        if self.kind == "Power":
            p, c = self.p, self.scale
            q = p / (p - 1.0)
            return Power(q, scale=(c * p) ** (-(q - 1.0)) / q)
        if self._partner is not None:
            return self._partner()
        return _legendre(self)

    def inverse(self, y: float) -> float:
        """Solve ``Psi(s) = y`` for ``s >= 0``."""
        if y <= 0:
            return 0.0
        hi = 1.0
        while self(hi) < y:
            hi *= 2.0
            if hi > 1e300:
                raise OverflowError("inverse out of range")
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self(mid) < y:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * hi:
                break
        return 0.5 * (lo + hi)


ExpA = NFunction(
    "ExpA",
    _eval_A,
    lambda s: np.sign(s) * np.expm1(np.abs(s)),
    name="e^|s|-1-|s|",
    _log=_log_A,
)

LLogLB = NFunction(
    "LLogLB",
    _eval_B,
    lambda s: np.sign(s) * np.log1p(np.abs(s)),
    name="(1+|s|)ln(1+|s|)-|s|",
    _log=_log_B,
)


def Power(p: float, scale: float = 1.0) -> NFunction:
    """``scale * |s|**p`` with ``p > 1``; the complement is again a power."""
    if not p > 1:
        raise ValueError("Power N-function needs p > 1")
    return NFunction(
        "Power",
        lambda s, p=p, c=scale: c * np.abs(np.asarray(s, dtype=float)) ** p,
        lambda s, p=p, c=scale: c * p * np.sign(s) * np.abs(np.asarray(s, dtype=float)) ** (p - 1),
        p=float(p),
        scale=float(scale),
        name=f"{scale:g}|s|^{p:g}",
    )


def Custom(func: Callable, deriv: Optional[Callable] = None, complementary: Optional[Callable] = None,
           name: str = "custom") -> NFunction:
    """User supplied Young function.

    ``complementary`` may be a zero-argument callable returning the partner; if
    omitted the Legendre transform is evaluated numerically.
    """
    if deriv is None:
        def deriv(s, f=func):
            s = np.asarray(s, dtype=float)
            h = 1e-6 * np.maximum(1.0, np.abs(s))
            return (f(s + h) - f(np.maximum(s - h, 0.0))) / (s + h - np.maximum(s - h, 0.0))
    return NFunction("Custom", func, deriv, name=name, _partner=complementary)


def _legendre(psi: NFunction) -> NFunction:
    from scipy.optimize import minimize_scalar

    def conj_scalar(s):
        s = abs(s)
        if s == 0:
            return 0.0
        hi = 1.0
        while psi.deriv(hi) < s:
            hi *= 2.0
        res = minimize_scalar(lambda t: -(s * t - psi(t)), bounds=(0.0, hi), method="bounded",
                              options={"xatol": 1e-12 * hi})
        return -res.fun

    def conj(s):
        return np.vectorize(conj_scalar)(s)

    return Custom(conj, name=f"conj({psi.name})", complementary=lambda: psi)


# ---------------------------------------------------------------------------
# domains and samples


@dataclass(frozen=True)
class Domain:
    """Descriptor with a closed-form measure.

    ``kind`` is one of ``interval``, ``disk``, ``annulus``, ``circle``,
    ``sector``, ``product``, ``plane`` or ``cells``.
    """

    kind: str
    params: tuple = ()

    def measure(self) -> float:
        k, p = self.kind, self.params
        if k == "interval":
            return p[1] - p[0]
        if k == "disk":
            return math.pi * p[0] ** 2
        if k == "annulus":
            return math.pi * (p[1] ** 2 - p[0] ** 2)
        if k == "circle":
            return 2.0 * math.pi
        if k == "sector":  # r1, r2, angle
            return 0.5 * p[2] * (p[1] ** 2 - p[0] ** 2)
        if k == "product":
            return p[0].measure() * p[1].measure()
        if k == "plane":
            return math.inf
        if k == "cells":
            return float(p[0])
        raise InvalidDomain(f"unknown domain kind {k!r}")


@dataclass(frozen=True)
class Piece:
    """A smooth piece ``int_lo^hi Psi(f(x)) w(x) dx``.

    ``singular`` marks an endpoint (``"lo"``, ``"hi"`` or ``"both"``) where
    ``f`` may blow up; there the variable is substituted logarithmically.
    """

    lo: float
    hi: float
    f: Callable = field(repr=False)
    w: Optional[Callable] = field(default=None, repr=False)
    singular: Optional[str] = None
    factor: float = 1.0


@dataclass(frozen=True)
class LogPiece:
    """A piece written in a log-friendly variable ``y``.

    Represents ``int_{y_lo}^{y_hi} Psi(exp(logf(y))) exp(logw(y)) dy``; every
    Jacobian is already folded into ``logw``.  This lets integrands whose
    values over- or underflow (e.g. ``1/(X ln^2 X)`` as ``X -> 0``) be
    integrated over infinite ``y`` ranges.
    """

    y_lo: float
    y_hi: float
    logf: Callable = field(repr=False)
    logw: Callable = field(repr=False)
    logfactor: float = 0.0
    points: tuple = ()


@dataclass(frozen=True)
class ProductPiece:
    """Separable integrand ``f(x) g(y)`` on a product: ``inner`` in ``x``, ``outer`` in ``y``.

    The double integral ``int int Psi(k f g)`` is computed as an outer
    quadrature of inner integrals with the scale ``k g(y)``.
    """

    inner: LogPiece
    outer: LogPiece


@dataclass(frozen=True)
class QuadratureSpec:
    epsabs: float = 1e-14
    epsrel: float = 1e-11
    limit: int = 500


def _identity(ell):
    return ell


def _logpsi(psi) -> Callable[[float], float]:
    if psi is None:
        return _identity
    if hasattr(psi, "logfunc"):
        return psi.logfunc

    def lf(ell):
        if ell > 709.0:
            return math.inf
        with np.errstate(over="ignore", divide="ignore"):
            v = float(psi(math.exp(ell)))
        return math.log(v) if v > 0 else -math.inf

    return lf


@dataclass(frozen=True)
class MeasurableSample:
    """A nonnegative integrand on a domain.

    The integrand is a sum of exact piecewise-constant cells, smooth
    :class:`Piece` objects and :class:`LogPiece` objects.
    """

    domain: Domain
    cell_measures: tuple = ()
    cell_values: tuple = ()
    pieces: tuple = ()
    log_pieces: tuple = ()
    quad: QuadratureSpec = QuadratureSpec()
    products: tuple = ()

    # constructors -----------------------------------------------------
    @classmethod
    def piecewise_constant(cls, measures: Sequence[float], values: Sequence[float],
                           domain: Optional[Domain] = None) -> "MeasurableSample":
        m = np.asarray(measures, dtype=float)
        v = np.abs(np.asarray(values, dtype=float))
        if m.shape != v.shape or np.any(m < 0):
            raise InvalidDomain("cell measures must be nonnegative and match values")
        if domain is None:
            domain = Domain("cells", (float(m.sum()),))
        return cls(domain, tuple(m.tolist()), tuple(v.tolist()))

    @classmethod
    def interval(cls, f: Callable, a: float, b: float, singular: Optional[str] = None,
                 breakpoints: Sequence[float] = ()) -> "MeasurableSample":
        cuts = [a] + sorted(x for x in breakpoints if a < x < b) + [b]
        pieces = []
        for i, (lo, hi) in enumerate(zip(cuts[:-1], cuts[1:])):
            sing = None
            if singular in ("lo", "both") and i == 0:
                sing = "lo"
            if singular in ("hi", "both") and i == len(cuts) - 2:
                sing = "both" if sing == "lo" else "hi"
            pieces.append(Piece(lo, hi, f, None, sing))
        return cls(Domain("interval", (a, b)), pieces=tuple(pieces))

    @classmethod
    def radial(cls, f: Callable, r_lo: float, r_hi: float, singular: Optional[str] = None,
               breakpoints: Sequence[float] = ()) -> "MeasurableSample":
        """Radial function ``f(|x|)`` on the disk/annulus ``r_lo < |x| < r_hi``."""
        base = cls.interval(f, r_lo, r_hi, singular, breakpoints)
        pieces = tuple(Piece(p.lo, p.hi, f, _two_pi_r, p.singular) for p in base.pieces)
        dom = Domain("disk", (r_hi,)) if r_lo == 0 else Domain("annulus", (r_lo, r_hi))
        return cls(dom, pieces=pieces)

    @classmethod
    def circle(cls, f: Callable, singular_at: Sequence[float] = ()) -> "MeasurableSample":
        """Function of the angle on ``(-pi, pi]`` with arc-length measure."""
        cuts = sorted(set([-math.pi, math.pi] + [x for x in singular_at if -math.pi < x < math.pi]))
        sing_pts = set(singular_at)
        pieces = []
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            s_lo, s_hi = lo in sing_pts, hi in sing_pts
            sing = "both" if s_lo and s_hi else "lo" if s_lo else "hi" if s_hi else None
            pieces.append(Piece(lo, hi, f, None, sing))
        return cls(Domain("circle"), pieces=tuple(pieces))

    def scaled(self, c: float) -> "MeasurableSample":
        """Same domain, integrand multiplied by ``c >= 0``."""
        if c == 0:
            return MeasurableSample(self.domain, quad=self.quad)
        vals = tuple(c * v for v in self.cell_values)
        pieces = tuple(Piece(p.lo, p.hi, p.f, p.w, p.singular, p.factor * c) for p in self.pieces)
        lc = math.log(c)
        lpieces = tuple(replace(p, logfactor=p.logfactor + lc) for p in self.log_pieces)
        prods = tuple(ProductPiece(replace(p.inner, logfactor=p.inner.logfactor + lc), p.outer)
                      for p in self.products)
        return MeasurableSample(self.domain, self.cell_measures, vals, pieces, lpieces, self.quad, prods)

    def joined(self, other: "MeasurableSample", domain: Optional[Domain] = None) -> "MeasurableSample":
        """Integrand on the disjoint union of the two supports."""
        dom = domain or Domain("cells", (self.measure() + other.measure(),))
        return MeasurableSample(dom, self.cell_measures + other.cell_measures,
                                self.cell_values + other.cell_values, self.pieces + other.pieces,
                                self.log_pieces + other.log_pieces, self.quad,
                                self.products + other.products)

    # integration --------------------------------------------------------
    def measure(self) -> float:
        return self.domain.measure()

    def quadrature_measure(self) -> float:
        """Measure recomputed from the cells and pieces (consistency check)."""
        total = float(sum(self.cell_measures))
        for p in self.pieces:
            w = p.w if p.w is not None else (lambda x: 1.0)
            total += _quad(lambda x, w=w: w(x), p.lo, p.hi, None, self.quad)
        for p in self.log_pieces:
            total += _quad_log(lambda y, p=p: math.exp(p.logw(y)), p, self.quad)
        for p in self.products:
            a = _quad_log(lambda y, q=p.inner: math.exp(q.logw(y)), p.inner, self.quad)
            b = _quad_log(lambda y, q=p.outer: math.exp(q.logw(y)), p.outer, self.quad)
            total += a * b
        return total

    def l1(self) -> float:
        """Plain integral of the integrand (``inf`` if it diverges)."""
        return self.integrate(None)

    def is_zero(self) -> bool:
        return (not any(v > 0 for v in self.cell_values) and not self.pieces and not self.log_pieces
                and not self.products)

    def integrate(self, psi, k: float = 1.0) -> float:
        """``int Psi(k f) dmu``; returns ``inf`` if the integral does not converge.

        ``psi`` is an :class:`NFunction`, any vectorised nonnegative callable,
        or ``None`` for the plain integral of ``k f``.
        """
        total = 0.0
        if self.cell_measures:
            m = np.asarray(self.cell_measures)
            v = np.asarray(self.cell_values)
            with np.errstate(over="ignore", invalid="ignore"):
                vals = k * v if psi is None else np.asarray(psi(k * v), dtype=float)
            mask = m > 0
            if np.any(~np.isfinite(vals[mask])):
                return math.inf
            total += float(np.dot(m[mask], vals[mask]))
        if k == 0:
            return total
        logpsi = _logpsi(psi)
        logk = math.log(k)
        for p in self.pieces:
            lkk = logk + math.log(p.factor) if p.factor > 0 else -math.inf
            if lkk == -math.inf:
                continue
            total += _quad_piece(logpsi, lkk, p, self.quad)
            if not math.isfinite(total):
                return math.inf
        for p in self.log_pieces:
            total += _log_piece_integral(logpsi, logk, p, self.quad)
            if not math.isfinite(total):
                return math.inf
        for p in self.products:
            total += _product_integral(logpsi, logk, p, self.quad)
            if not math.isfinite(total):
                return math.inf
        return total


def _log_piece_integral(logpsi, logk: float, p: LogPiece, spec: QuadratureSpec) -> float:
    lkk = logk + p.logfactor

    def g(y):
        lf = p.logf(y)
        if lf == -math.inf:
            return 0.0
        return _safe_exp(logpsi(lkk + lf) + p.logw(y))

    return _quad_log(g, p, spec)


def _product_integral(logpsi, logk: float, p: ProductPiece, spec: QuadratureSpec) -> float:
    outer = p.outer
    loose = QuadratureSpec(max(spec.epsabs, 1e-13), max(spec.epsrel, 1e-9), spec.limit)

    def g(y):
        lf = outer.logf(y)
        if lf == -math.inf:
            return 0.0
        inner = _log_piece_integral(logpsi, logk + outer.logfactor + lf, p.inner, loose)
        if not math.isfinite(inner):
            raise OverflowError
        lw = outer.logw(y)
        return inner * _safe_exp(lw) if inner > 0 else 0.0

    return _quad_log(g, outer, loose)


def _two_pi_r(r):
    return 2.0 * math.pi * r


def _safe_exp(x: float) -> float:
    if x > 709.0:
        raise OverflowError
    return math.exp(x) if x > -745.0 else 0.0


def _quad_piece(logpsi, logk: float, p: Piece, spec: QuadratureSpec) -> float:
    def val(x):
        fx = float(p.f(x))
        if fx <= 0.0:
            return -math.inf
        if math.isinf(fx):
            return math.inf
        lw = 0.0
        if p.w is not None:
            wx = float(p.w(x))
            if wx <= 0.0:
                return -math.inf
            lw = math.log(wx)
        return logpsi(logk + math.log(fx)) + lw

    def g(x):
        return _safe_exp(val(x))

    sing = p.singular
    if sing is None:
        return _quad(g, p.lo, p.hi, None, spec)
    if sing == "both":
        mid = 0.5 * (p.lo + p.hi)
        return (_quad_piece(logpsi, logk, Piece(p.lo, mid, p.f, p.w, "lo"), spec)
                + _quad_piece(logpsi, logk, Piece(mid, p.hi, p.f, p.w, "hi"), spec))
    lo, hi = p.lo, p.hi

    def h(y):
        d = math.exp(y)
        x = lo + d if sing == "lo" else hi - d
        if x == (lo if sing == "lo" else hi):
            return 0.0
        return _safe_exp(val(x) + y)

    return _quad(h, -math.inf, math.log(hi - lo), None, spec)


def _quad_log(g: Callable, p: LogPiece, spec: QuadratureSpec) -> float:
    pts = sorted(x for x in p.points if p.y_lo < x < p.y_hi)
    cuts = [p.y_lo] + pts + [p.y_hi]
    return sum(_quad(g, a, b, None, spec) for a, b in zip(cuts[:-1], cuts[1:]))


def _quad(g: Callable, lo: float, hi: float, singular, spec: QuadratureSpec) -> float:
    """Adaptive Gauss-Kronrod (QUADPACK) on one smooth piece."""
    if hi <= lo:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, _ = integrate.quad(g, lo, hi, epsabs=spec.epsabs, epsrel=spec.epsrel, limit=spec.limit)
        except IntegrationWarning:
            # retry once with a looser absolute floor before declaring divergence
            try:
                val, err = integrate.quad(g, lo, hi, epsabs=1e-10, epsrel=1e-8, limit=4 * spec.limit)
            except (IntegrationWarning, OverflowError, ZeroDivisionError):
                return math.inf
        except (OverflowError, ZeroDivisionError):
            return math.inf
    return val if math.isfinite(val) else math.inf


# ---------------------------------------------------------------------------
# scalar search helpers


def golden_section(fun: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10,
                   maxiter: int = 500) -> tuple[float, float]:
    """Golden-section minimisation of a unimodal function on ``[lo, hi]``.

    Values of ``+inf`` are allowed and simply compare as larger.
    Returns ``(x_min, f_min)``.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(maxiter):
        if abs(b - a) <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    if fc <= fd:
        return c, fc
    return d, fd


def _check_domain(f: MeasurableSample, need_finite: bool) -> float:
    mu = f.measure()
    if not mu > 0:
        raise InvalidDomain("domain has zero measure")
    if need_finite and not math.isfinite(mu):
        raise InvalidDomain("average norm needs a domain of finite measure")
    return mu


def luxemburg_norm(f: MeasurableSample, psi: NFunction, *, lo: float = 1e-12, hi: float = 1e12,
                   rtol: float = 1e-10, full_output: bool = False):
    """Gauge norm ``inf{kappa > 0 : int Psi(f/kappa) dmu <= 1}`` by log-bisection.

    Raises
    ------
    NonIntegrable
        If the gauge integral exceeds one for every trial ``kappa`` up to the
        (geometrically expanded) ceiling.
    """
    _check_domain(f, need_finite=False)
    if f.is_zero():
        return (0.0, (0.0, 0.0)) if full_output else 0.0

    def gauge(kappa):
        return f.integrate(psi, 1.0 / kappa)

    ceiling = 1e300
    while gauge(hi) > 1.0:
        if hi >= ceiling:
            raise NonIntegrable(f"int Psi(f/kappa) > 1 for all kappa up to {ceiling:g}")
        hi = min(hi * 1e6, ceiling)
    while gauge(lo) <= 1.0:
        if lo < 1e-300:
            return (0.0, (0.0, lo)) if full_output else 0.0
        lo *= 1e-6
    a, b = math.log(lo), math.log(hi)
    while b - a > rtol:
        m = 0.5 * (a + b)
        if gauge(math.exp(m)) > 1.0:
            a = m
        else:
            b = m
    value = math.exp(b)
    return (value, (math.exp(a), value)) if full_output else value


def _dual_inf(f: MeasurableSample, psi: NFunction, level: float, full_output: bool):
    if f.is_zero():
        return (0.0, math.inf) if full_output else 0.0

    def h(logk):
        k = math.exp(logk)
        val = f.integrate(psi, k)
        if not math.isfinite(val):
            return math.inf
        return (level + val) / k

    # coarse scan locates the basin, golden section refines it
    grid = np.linspace(math.log(1e-12), math.log(1e12), 49)
    vals = [h(x) for x in grid]
    if not any(math.isfinite(v) for v in vals):
        raise NonIntegrable("int Psi(k f) is infinite for every trial k")
    i = int(np.argmin(vals))
    while i == 0 or i == len(grid) - 1:
        step = grid[1] - grid[0]
        if i == 0:
            if grid[0] < -690:
                break
            grid = grid - 12 * step
        else:
            if grid[-1] > 690:
                break
            grid = grid + 12 * step
        vals = [h(x) for x in grid]
        i = int(np.argmin(vals))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]
    x, val = golden_section(h, a, b, tol=1e-12)
    if not math.isfinite(val):
        raise NonIntegrable("dual functional infinite at the minimiser")
    return (val, math.exp(x)) if full_output else val


def orlicz_norm(f: MeasurableSample, psi: NFunction, *, full_output: bool = False):
    """Orlicz norm via ``inf_{k>0} (1 + int Psi(k f)) / k`` (golden section in ``log k``)."""
    _check_domain(f, need_finite=False)
    return _dual_inf(f, psi, 1.0, full_output)


def average_norm(f: MeasurableSample, psi: NFunction, *, full_output: bool = False):
    """Average norm ``inf_{k>0} (mu + int Psi(k f)) / k`` on a domain of finite measure."""
    mu = _check_domain(f, need_finite=True)
    return _dual_inf(f, psi, mu, full_output)


def dual_sup_direct(measures: Sequence[float], values: Sequence[float], phi: NFunction,
                    level: float = 1.0) -> float:
    """Direct constrained maximisation over piecewise-constant ``g >= 0``.

    Maximises ``sum m_i f_i g_i`` subject to ``sum m_i Phi(g_i) <= level`` by a
    Lagrangian scan: for a multiplier ``lam`` every cell solves
    ``Phi'(g) = f_i / lam`` (bisection on ``Phi'``), and ``lam`` is bisected
    until the constraint is active.  Only ``Phi`` is used, never its partner,
    so this is an independent check of the one-parameter dual formulas.
    Signed ``values`` enter through ``|f|``: an optimal ``g`` copies the sign
    of ``f``, so restricting to ``g >= 0`` loses nothing.
    """
    m = np.asarray(measures, dtype=float)
    f = np.abs(np.asarray(values, dtype=float))
    if not np.any(m * f > 0):
        return 0.0

    def g_of(lam):
        target = f / lam
        lo = np.zeros_like(target)
        hi = np.ones_like(target)
        while np.any(phi.deriv(hi) < target):
            hi = np.where(phi.deriv(hi) < target, hi * 2.0, hi)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = phi.deriv(mid) < target
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def used(lam):
        return float(np.dot(m, phi(g_of(lam))))

    a, b = 1e-8, 1e8
    while used(a) < level:
        a *= 1e-4
    while used(b) > level:
        b *= 1e4
    la, lb = math.log(a), math.log(b)
    for _ in range(200):
        mid = 0.5 * (la + lb)
        if used(math.exp(mid)) > level:
            la = mid
        else:
            lb = mid
        if lb - la < 1e-15:
            break
    g = g_of(math.exp(lb))
    return float(np.dot(m * f, g))


def embedding_constant_M(p: float, *, n_grid: int = 40001) -> tuple[float, float, float]:
    """Maximise ``B(t)/t**p`` over ``t > 0`` for ``1 < p <= 2``.

    Returns ``(M, t_p, m_p)`` with ``m_p`` the maximum, ``t_p`` the maximiser
    and ``M = m_p**(1/p)``.  For ``p = 2`` the supremum ``1/2`` is approached as
    ``t -> 0`` and ``t_p = 0`` is reported.
    """
    if not p > 1:
        raise ValueError("p must exceed 1")

    def logratio(lt):
        t = math.exp(lt)
        return math.log(float(_eval_B(t))) - p * lt

    hi = 3.0 * p / (p - 1.0) + 60.0
    grid = np.linspace(-30.0, hi, n_grid)
    vals = np.log(_eval_B(np.exp(grid))) - p * grid
    i = int(np.argmax(vals))
    # report any secondary interior local maxima (not expected for p <= 2)
    if i == 0:
        # supremum at t -> 0: B(t)/t^p -> 1/2 if p == 2, else 0 (not a max)
        m = 0.5 if p == 2 else float(np.exp(vals[0]))
        return m ** (1.0 / p), 0.0, m
    lt, neg = golden_section(lambda x: -logratio(x), grid[i - 1], grid[min(i + 1, n_grid - 1)], tol=1e-13)
    m = math.exp(-neg)
    return m ** (1.0 / p), math.exp(lt), m

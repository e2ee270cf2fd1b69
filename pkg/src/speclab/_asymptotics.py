"""Exponent classes used to decide convergence exactly.

A :class:`Growth` is ``coef * X^a * |ln X|^b * (ln|ln X|)^c`` near ``X -> 0``
(``end == "zero"``) or ``X -> inf`` (``end == "inf"``).  A :class:`SeqClass`
is ``coef * exp(lam*m) * m^beta * (ln m)^gamma`` for ``m = |n| -> inf``.
Integrability and summability follow from comparing exponents
lexicographically, with quadrature used only for finite values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import MissingDecayClass

_EPS = 1e-12


def _lex_sign(*xs: float) -> int:
    for x in xs:
        if x > _EPS:
            return 1
        if x < -_EPS:
            return -1
    return 0


@dataclass(frozen=True)
class Growth:
    end: str
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    coef: float = 1.0

    def times(self, other: "Growth") -> "Growth":
        if other.end != self.end:
            raise ValueError("classes at different ends")
        return Growth(self.end, self.a + other.a, self.b + other.b, self.c + other.c,
                      self.coef * other.coef)

    def power(self, p: float) -> "Growth":
        return Growth(self.end, p * self.a, p * self.b, p * self.c, self.coef ** p)

    def scaled(self, k: float) -> "Growth":
        return replace(self, coef=self.coef * k)

    def trend(self) -> str:
        """``"inf"``, ``"zero"`` or ``"const"`` for the limit of the function."""
        sa = -self.a if self.end == "zero" else self.a
        s = _lex_sign(sa, self.b, self.c)
        return "inf" if s > 0 else "zero" if s < 0 else "const"

    def log_factor(self) -> "Growth":
        """Class of ``ln(value)`` when the value tends to infinity."""
        if abs(self.a) > _EPS:
            return Growth(self.end, 0.0, 1.0, 0.0, abs(self.a))
        if abs(self.b) > _EPS:
            return Growth(self.end, 0.0, 0.0, 1.0, abs(self.b))
        raise MissingDecayClass("logarithm of a triple-log growth class is outside the exponent calculus")

    def compose(self, psi: str, p: float = 1.0) -> "Growth":
        """Class of ``Psi(value)`` for ``psi`` in ``id``, ``pow``, ``B``."""
        if psi == "id":
            return self
        if psi == "pow":
            return self.power(p)
        if psi == "B":
            tr = self.trend()
            if tr == "inf":
                return self.times(self.log_factor())
            if tr == "zero":
                return Growth(self.end, 2 * self.a, 2 * self.b, 2 * self.c, 0.5 * self.coef ** 2)
            v = self.coef
            return Growth(self.end, 0.0, 0.0, 0.0, (1 + v) * math.log1p(v) - v)
        raise ValueError(psi)

    def integrable(self, m: float = 0.0) -> bool:
        """Is ``int value * X^m dX`` finite near the end?"""
        alpha = self.a + m
        if self.end == "zero":
            s = _lex_sign(alpha + 1.0, -self.b - 1.0, -self.c - 1.0)
        else:
            s = _lex_sign(-alpha - 1.0, -self.b - 1.0, -self.c - 1.0)
        return s > 0

    def describe(self) -> str:
        var = "X->0" if self.end == "zero" else "X->inf"
        return f"{self.coef:.6g}*X^{self.a:g}*L^{self.b:g}*LL^{self.c:g} ({var})"


def const_growth(end: str, value: float = 1.0) -> Growth:
    return Growth(end, 0.0, 0.0, 0.0, value)


@dataclass(frozen=True)
class SeqClass:
    """Asymptotic class of a nonnegative sequence along ``m = |n|``.

    ``lam = -inf`` encodes faster-than-geometric decay and ``lam = +inf``
    faster-than-geometric growth.
    """

    lam: float
    beta: float = 0.0
    gamma: float = 0.0
    coef: float = 1.0

    def trend(self) -> str:
        if self.coef == 0:
            return "zero"
        s = _lex_sign(self.lam, self.beta, self.gamma)
        return "inf" if s > 0 else "zero" if s < 0 else "const"

    def summable(self) -> bool:
        if self.coef == 0:
            return True
        return _lex_sign(-self.lam, -self.beta - 1.0, -self.gamma - 1.0) > 0

    def weak_l1_finite(self) -> bool:
        """``sup_s s*card{a_n > s}`` finite: decay at least like ``1/m``."""
        if self.coef == 0:
            return True
        if self.lam < -_EPS:
            return True
        if self.lam > _EPS:
            return False
        if self.beta < -1 - _EPS:
            return True
        if abs(self.beta + 1) <= _EPS:
            return self.gamma <= _EPS
        return False

    def power(self, p: float) -> "SeqClass":
        return SeqClass(p * self.lam, p * self.beta, p * self.gamma, self.coef ** p)

    def describe(self) -> str:
        return f"{self.coef:.6g}*exp({self.lam:g} m)*m^{self.beta:g}*(ln m)^{self.gamma:g}"


def dominant(classes) -> SeqClass:
    """Largest class (the sum of several sequences behaves like it)."""
    best = None
    for c in classes:
        if c.coef == 0:
            continue
        if best is None:
            best = c
            continue
        s = _lex_sign(c.lam - best.lam, c.beta - best.beta, c.gamma - best.gamma)
        if s > 0:
            best = c
        elif s == 0:
            best = replace(best, coef=best.coef + c.coef)
    return best if best is not None else SeqClass(-math.inf, 0.0, 0.0, 0.0)


def tail_sum_estimate(cls: SeqClass, last_value: float, m_last: int, m_end: float = math.inf) -> float:
    """Approximate ``sum_{m > m_last}^{m_end} a_m`` given the class and ``a_{m_last}``.

    The class is normalised at the last computed term.  Returns ``inf`` when
    the class is not summable over an infinite range.
    """
    if last_value == 0 or m_end <= m_last:
        return 0.0
    if cls.lam == -math.inf:
        return 0.0
    if math.isinf(m_end) and not cls.summable():
        return math.inf

    def shape(m):
        return (math.exp(cls.lam * (m - m_last)) * (m / m_last) ** cls.beta
                * (math.log(m) / math.log(m_last) if m_last > 1 and m > 1 else 1.0) ** cls.gamma)

    if cls.lam < -_EPS:
        # geometric domination
        r = math.exp(cls.lam)
        return last_value * r / (1.0 - r)
    from scipy import integrate

    val, _ = integrate.quad(lambda m: shape(m), m_last + 0.5, m_end, limit=200)
    return last_value * val

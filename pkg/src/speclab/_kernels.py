"""Hot loops: closed-form profile evaluation and the Pruefer phase integrator.

Every function here is written in the scalar subset of Python that numba
compiles.  Setting ``SPECLAB_NO_NUMBA=1`` (or running without numba) keeps the
plain Python versions, which give identical results, only slower.

Profiles are passed as three float arrays:

``atoms``  rows ``[var, c, ln c, kind, e, k]``; ``var`` 0 is the radius and 1
           the angle, ``kind`` 0..3 is ``X^e``, ``|ln X|^e``, ``(ln|ln X|)^e``,
           ``(1+|ln X|^k)^e`` with ``X = |v - c|``.  Radius-power atoms centred
           at the origin are not stored; they are folded into ``tcoef``.
``terms``  rows ``[logw, tcoef, atom_start, atom_end]``; a term is
           ``exp(logw + tcoef*t + sum of atoms)``.
``pieces`` rows ``[coord, lo, hi, center, term_start, term_end]``; ``coord`` 0
           uses ``y = t``, 1 uses ``t = center + exp(y)`` and 2 uses
           ``t = center - exp(-y)``.
"""

from __future__ import annotations

import math
import os

import numpy as np

USE_NUMBA = os.environ.get("SPECLAB_NO_NUMBA", "0") not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

if not USE_NUMBA:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

NO_AUX = 0
SHIFT = 1


@njit(cache=True)
def _log_expm1_ratio(d):
    # log(|expm1(d)| / |d|), accurate for tiny d
    if abs(d) < 1e-8:
        return 0.5 * d
    return math.log(abs(math.expm1(d)) / abs(d))


@njit(cache=True)
def log_atom(row, v, aux, aux_c, aux_sign, aux_log):
    """Log of one atom at the point ``v`` (``t = ln r`` or an angle).

    ``aux == SHIFT`` means ``v = aux_c + aux_sign*exp(aux_log)``; atoms whose
    centre coincides with ``aux_c`` are then evaluated from ``aux_log`` so that
    nothing is lost to cancellation.
    """
    var = row[0]
    c = row[1]
    kind = int(row[3])
    e = row[4]
    if var == 0.0:
        if c == 0.0:
            lnx = v
            if aux == SHIFT and aux_c == 0.0:
                ly = aux_log
            elif v == 0.0:
                ly = -math.inf
            else:
                ly = math.log(abs(v))
        else:
            if c > 0.0:
                tc = row[2]
                if aux == SHIFT and aux_c == tc:
                    dd = aux_sign * math.exp(aux_log)
                    lnx = tc + aux_log + _log_expm1_ratio(dd)
                elif v > 700.0:
                    lnx = v + math.log1p(-c * math.exp(-v))
                else:
                    em = abs(math.expm1(v - tc))
                    lnx = tc + math.log(em) if em > 0.0 else -math.inf
            else:
                a = math.log(-c)
                hi = max(v, a)
                lnx = hi + math.log1p(math.exp(-abs(v - a)))
            ly = math.log(abs(lnx)) if lnx != 0.0 else -math.inf
    else:
        if aux == SHIFT and aux_c == c:
            lnx = aux_log
        else:
            dv = abs(v - c)
            lnx = math.log(dv) if dv > 0.0 else -math.inf
        ly = math.log(abs(lnx)) if lnx != 0.0 else -math.inf
    if kind == 0:
        if e == 0.0:
            return 0.0
        return e * lnx
    if kind == 1:
        if e == 0.0:
            return 0.0
        return e * ly
    if kind == 2:
        if ly <= 0.0:
            return -math.inf if e > 0.0 else math.inf
        return e * math.log(ly)
    # kind 3: (1 + |ln X|^k)^e
    z = row[5] * ly
    if z > 0.0:
        return e * (z + math.log1p(math.exp(-z)))
    return e * math.log1p(math.exp(z))


@njit(cache=True)
def log_term(terms, ti, atoms, t, aux, aux_c, aux_sign, aux_log):
    s = terms[ti, 0]
    tc = terms[ti, 1]
    if tc != 0.0:
        s += tc * t
    for j in range(int(terms[ti, 2]), int(terms[ti, 3])):
        s += log_atom(atoms[j], t, aux, aux_c, aux_sign, aux_log)
    return s


@njit(cache=True)
def profile_value(terms, t0, t1, atoms, t, aux, aux_c, aux_sign, aux_log):
    """Sum of the terms ``t0 <= i < t1`` at one point (may be ``inf``)."""
    total = 0.0
    for i in range(t0, t1):
        lv = log_term(terms, i, atoms, t, aux, aux_c, aux_sign, aux_log)
        if lv > 709.0:
            return math.inf
        if lv > -745.0:
            total += math.exp(lv)
    return total


@njit(cache=True)
def profile_log(terms, t0, t1, atoms, t, aux, aux_c, aux_sign, aux_log):
    """Log of the sum of the terms ``t0 <= i < t1`` (``-inf`` when empty)."""
    m = -math.inf
    for i in range(t0, t1):
        lv = log_term(terms, i, atoms, t, aux, aux_c, aux_sign, aux_log)
        if lv > m:
            m = lv
    if m == -math.inf or m == math.inf:
        return m
    total = 0.0
    for i in range(t0, t1):
        lv = log_term(terms, i, atoms, t, aux, aux_c, aux_sign, aux_log)
        total += math.exp(lv - m)
    return m + math.log(total)


@njit(cache=True)
def _point(coord, center, y):
    # physical t, aux flag, shift centre, sign, log distance
    if coord == 0:
        return y, NO_AUX, 0.0, 1.0, 0.0
    if coord == 1:
        if y > 709.0:
            return math.inf, SHIFT, center, 1.0, y
        return center + math.exp(y), SHIFT, center, 1.0, y
    if -y > 709.0:
        return -math.inf, SHIFT, center, -1.0, -y
    return center - math.exp(-y), SHIFT, center, -1.0, -y


@njit(cache=True)
def local_q(y, coord, center, terms, t0, t1, atoms, alpha, shift):
    """Coefficient ``q`` of ``v'' + q v = 0`` in the piece coordinate.

    In coordinate 0 this is ``alpha*G + shift``; in the logarithmic
    coordinates it is ``x^2 (alpha*G + shift) - 1/4`` with ``x = |t - center|``,
    assembled in logs so that huge ``x`` with tiny ``G`` stays finite.
    """
    t, aux, ac, asg, al = _point(coord, center, y)
    lg = profile_log(terms, t0, t1, atoms, t, aux, ac, asg, al)
    if coord == 0:
        g = 0.0
        if lg > -745.0:
            g = math.exp(min(lg, 709.0))
        return alpha * g + shift
    q = -0.25
    if alpha > 0.0 and lg > -math.inf:
        q += math.exp(min(2.0 * al + math.log(alpha) + lg, 709.0))
    if shift != 0.0:
        q += shift * math.exp(min(2.0 * al, 709.0))
    return q


@njit(cache=True)
def _rhs(phi, y, coord, center, terms, t0, t1, atoms, alpha, shift, k):
    q = local_q(y, coord, center, terms, t0, t1, atoms, alpha, shift)
    s = math.sin(phi)
    c = math.cos(phi)
    return k * c * c + (q / k) * s * s


# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)


@njit(cache=True)
def integrate_phase(phi, y0, y1, coord, center, terms, t0, t1, atoms, alpha, shift, k,
                    atol, hmax):
    """Advance the scaled phase from ``y0`` to ``y1`` with adaptive DP45.

    The phase is that of ``(v, v'/k)`` for the piece variable ``v``.

    Returns ``(phi, accepted_steps, rejected_steps)``.  The phase itself is
    integrated, never reduced modulo pi, so zeros cannot be skipped.
    """
    if y1 <= y0:
        return phi, 0, 0
    span = y1 - y0
    if hmax <= 0.0 or hmax > span:
        hmax = span
    h = min(hmax, 1e-3 * max(1.0, span))
    y = y0
    k1 = _rhs(phi, y, coord, center, terms, t0, t1, atoms, alpha, shift, k)
    nacc = 0
    nrej = 0
    while y < y1:
        if y1 - y <= 1e-14 * max(1.0, abs(y)):
            break
        if y + h > y1:
            h = y1 - y
        k2 = _rhs(phi + h * _A21 * k1, y + _C2 * h, coord, center, terms, t0, t1, atoms, alpha, shift, k)
        k3 = _rhs(phi + h * (_A31 * k1 + _A32 * k2), y + _C3 * h, coord, center, terms, t0, t1,
                  atoms, alpha, shift, k)
        k4 = _rhs(phi + h * (_A41 * k1 + _A42 * k2 + _A43 * k3), y + _C4 * h, coord, center, terms,
                  t0, t1, atoms, alpha, shift, k)
        k5 = _rhs(phi + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4), y + _C5 * h, coord,
                  center, terms, t0, t1, atoms, alpha, shift, k)
        k6 = _rhs(phi + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5), y + h,
                  coord, center, terms, t0, t1, atoms, alpha, shift, k)
        p5 = phi + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = _rhs(p5, y + h, coord, center, terms, t0, t1, atoms, alpha, shift, k)
        err = abs(h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7))
        if not math.isfinite(err):
            h *= 0.1
            nrej += 1
            if h < 1e-14 * max(1.0, abs(y)):
                return math.nan, nacc, nrej
            continue
        if err <= atol:
            y += h
            phi = p5
            k1 = k7
            nacc += 1
        else:
            nrej += 1
        if err == 0.0:
            fac = 5.0
        else:
            fac = min(5.0, max(0.2, 0.9 * (atol / err) ** 0.2))
        h = min(hmax, h * fac)
        if h < 1e-14 * max(1.0, abs(y)):
            return math.nan, nacc, nrej
    return phi, nacc, nrej


@njit(cache=True)
def integrate_pieces(phi, pieces, i0, i1, terms, atoms, alpha, shift, scales, atol, hmax, y_first, y_last):
    """Integrate across consecutive pieces ``i0 <= i < i1``.

    ``scales[i]`` is the Pruefer scale used on piece ``i``.  Coordinates and
    scales are switched at piece boundaries in a branch-preserving way.
    ``y_first``/``y_last`` clip the first and last piece.  Returns the final
    phase (in the last piece's coordinate and scale) and the step count.
    """
    steps = 0
    prev_coord = -1
    prev_center = 0.0
    prev_k = 1.0
    for i in range(i0, i1):
        coord = int(pieces[i, 0])
        lo = pieces[i, 1]
        hi = pieces[i, 2]
        center = pieces[i, 3]
        k = scales[i]
        if i == i0:
            lo = max(lo, y_first)
        if i == i1 - 1:
            hi = min(hi, y_last)
        if prev_coord >= 0 and not (coord == prev_coord and center == prev_center and k == prev_k):
            tb, _, _, _, _ = _point(coord, center, lo)
            phi = convert_phase(phi, prev_coord, prev_center, prev_k, coord, center, k, tb)
        phi, na, nr = integrate_phase(phi, lo, hi, coord, center, terms, int(pieces[i, 4]),
                                      int(pieces[i, 5]), atoms, alpha, shift, k, atol, hmax)
        steps += na + nr
        prev_coord = coord
        prev_center = center
        prev_k = k
        if not math.isfinite(phi):
            return phi, steps
    return phi, steps


@njit(cache=True)
def convert_phase(phi, coord_from, c_from, k_from, coord_to, c_to, k_to, t):
    """Change the Pruefer coordinate and scale at the physical point ``t``.

    The solution keeps its sign under every change used here, so the whole
    multiple of pi is carried over and only the reduced angle is mapped.
    Plain coordinates at infinite ``t`` are not supported.
    """
    if coord_from == coord_to and c_from == c_to and k_from == k_to:
        return phi
    n = math.floor(phi / math.pi)
    psi = phi - n * math.pi
    s = math.sin(psi)
    c = k_from * math.cos(psi)
    if coord_from == coord_to and c_from == c_to:
        a, b = s, c
    else:
        # through the plain (u, u') representation
        if coord_from == 1:
            x = t - c_from
            u, du = math.sqrt(x) * s, (c + 0.5 * s) / math.sqrt(x)
        elif coord_from == 2:
            x = c_from - t
            u, du = math.sqrt(x) * s, (c - 0.5 * s) / math.sqrt(x)
        else:
            u, du = s, c
        if coord_to == 1:
            x = t - c_to
            a, b = u / math.sqrt(x), math.sqrt(x) * du - 0.5 * u / math.sqrt(x)
        elif coord_to == 2:
            x = c_to - t
            a, b = u / math.sqrt(x), math.sqrt(x) * du + 0.5 * u / math.sqrt(x)
        else:
            a, b = u, du
    out = math.atan2(a, b / k_to)
    if out < 0.0:
        out += math.pi
    return n * math.pi + out


def warmup() -> None:
    """Trigger compilation on a tiny problem (no-op without numba)."""
    atoms = np.zeros((1, 6))
    atoms[0] = [0.0, 0.0, math.nan, 1.0, -2.0, 0.0]
    terms = np.array([[0.0, 0.0, 0.0, 1.0]])
    pieces = np.array([[1.0, 0.0, 1.0, 0.0, 0.0, 1.0]])
    integrate_pieces(0.0, pieces, 0, 1, terms, atoms, 1.0, 0.0, np.ones(1), 1e-11, 0.0, -math.inf, math.inf)

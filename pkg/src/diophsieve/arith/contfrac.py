"""Continued fractions with certified partial quotients.

The input is turned into a rational interval known to contain the target
(half an ulp around a float or an mpf, a point for a Fraction), and both
endpoints are expanded in lockstep.  A partial quotient is emitted only when
the endpoints agree on it, so every convergent is exact for the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from ..errors import DomainError, PrecisionError


@dataclass(frozen=True)
class ContinuedFraction:
    target: float
    partial_quotients: tuple
    convergents: tuple  # ((a_k, q_k), ...)
    exact: bool = False  # the expansion terminated (rational input)

    def best(self, q_max: int) -> tuple:
        """Last convergent with denominator at most ``q_max``."""
        out = None
        for a, q in self.convergents:
            if q > q_max:
                break
            out = (a, q)
        if out is None:
            raise DomainError(f"no convergent with q <= {q_max}", q_max)
        return out


def _interval(x) -> tuple:
    if isinstance(x, Fraction):
        return x, x
    if isinstance(x, int):
        return Fraction(x), Fraction(x)
    if isinstance(x, mpmath.mpf):
        man, exp = x.man_exp
        centre = Fraction(int(man)) * Fraction(2) ** int(exp)
        top = int(exp) + int(man).bit_length()
        half = Fraction(2) ** (top - mpmath.mp.prec - 1)
        return centre - half, centre + half
    xf = float(x)
    if not math.isfinite(xf):
        raise DomainError(f"continued_fraction needs a finite target, got {x}", x)
    half = Fraction(math.ulp(xf)) / 2
    return Fraction(xf) - half, Fraction(xf) + half


def continued_fraction(x, max_q: int) -> ContinuedFraction:
    """All convergents of ``x`` with denominator ``<= max_q``.

    ``x`` may be a float, a Fraction or an mpmath mpf (its uncertainty is
    half a unit in the last place at the current mpmath precision).  Raises
    :class:`PrecisionError` when the input precision runs out before the
    denominators pass ``max_q``.
    """
    if max_q < 1:
        raise DomainError(f"max_q must be positive, got {max_q}", max_q)
    lo, hi = _interval(x)
    if lo <= 0:
        raise DomainError(f"continued_fraction needs x > 0, got {x}", x)
    quotients, convs = [], []
    # (p_{k-2}, p_{k-1}) and (q_{k-2}, q_{k-1}) seeded at k = 0
    p_prev, p_cur = 0, 1
    q_prev, q_cur = 1, 0
    exact = False
    while True:
        a_lo, a_hi = math.floor(lo), math.floor(hi)
        if a_lo != a_hi:
            # the next quotient is ambiguous; harmless if both choices overshoot max_q
            if convs and min(a_lo, a_hi) * q_cur + q_prev > max_q:
                break
            raise PrecisionError(
                f"partial quotients unreliable after {len(quotients)} terms "
                f"(last q = {q_cur}, requested max_q = {max_q})"
            )
        a = a_lo
        p_new, q_new = a * p_cur + p_prev, a * q_cur + q_prev
        if q_new > max_q:
            break
        quotients.append(a)
        convs.append((p_new, q_new))
        p_prev, p_cur, q_prev, q_cur = p_cur, p_new, q_cur, q_new
        f_lo, f_hi = lo - a, hi - a
        if f_lo == 0 or f_hi == 0:
            if f_lo == f_hi:
                exact = True
                break
            raise PrecisionError(f"target interval contains the rational {p_new}/{q_new}")
        lo, hi = 1 / f_hi, 1 / f_lo
    return ContinuedFraction(float(x), tuple(quotients), tuple(convs), exact)

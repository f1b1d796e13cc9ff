"""Piatetski-Shapiro primes: the floor-difference indicator, pi_c and Li.

Exponents are handled as exact rationals wherever possible: a float ``c`` is
read as its shortest decimal (``1.1`` means 11/10), so ``gamma = 1/c`` is
exact and integer-valued powers can be recognised exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

import mpmath
import numpy as np

from ..errors import CapacityError, DomainError, PrecisionError
from ..quadrature import integrate
from .primes import primality_table

Exponent = Union[float, Fraction, mpmath.mpf]

NEAR_INT = 1e-12
PI_C_CAP = 10**7
PS_C_MAX = Fraction(755, 662)
_MP_DPS = 50
_MP_NEAR = mpmath.mpf(10) ** -40
_MAX_EXACT_BITS = 1 << 16
_LD_EPS = float(np.finfo(np.longdouble).eps)


def as_exact(x: Exponent):
    """Fraction for floats/ints/Fractions (decimal reading), mpf unchanged."""
    if isinstance(x, mpmath.mpf):
        return x
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(repr(float(x)))


def _mp(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _ld(x) -> np.longdouble:
    if isinstance(x, Fraction):
        return np.longdouble(x.numerator) / np.longdouble(x.denominator)
    return np.longdouble(float(x)) if not isinstance(x, mpmath.mpf) else np.longdouble(str(x))


def _int_root(n: int, k: int):
    """``r`` with ``r**k == n`` or None."""
    if k > n.bit_length():
        return 1 if n == 1 else None
    r = int(round(n ** (1.0 / k)))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    return None


def _floor_pow_exact(n: int, e) -> int:
    """``floor(n**e)`` for a positive integer ``n``, exactly.

    Rational exponents settle integer-valued powers by integer arithmetic;
    other results come from 50-digit arithmetic with a closeness guard.
    """
    with mpmath.workdps(_MP_DPS):
        v = mpmath.power(n, _mp(e))
        f = int(mpmath.floor(v))
        dist = min(v - f, f + 1 - v)
        if dist > _MP_NEAR:
            return f
    if isinstance(e, Fraction):
        num, den = e.numerator, e.denominator
        root = _int_root(n, den)
        if root is not None:
            return root**num
        # n**(num/den) is irrational, so the 50-digit floor is right unless
        # the value is absurdly close to an integer; settle it with integers
        if num * n.bit_length() <= _MAX_EXACT_BITS:
            target = n**num
            cand = f + 1 if (f + 1) ** den <= target else f
            while cand**den > target:
                cand -= 1
            return cand
    raise PrecisionError(f"floor({n}^{e}) is not resolvable at {_MP_DPS} digits")


def floor_pow(n: int, e: Exponent) -> int:
    return _floor_pow_exact(int(n), as_exact(e))


def _guard(v: np.ndarray) -> np.ndarray:
    # rounding bound for a longdouble power, never tighter than NEAR_INT
    return np.maximum(NEAR_INT, 64.0 * _LD_EPS * np.abs(v) * np.maximum(1.0, np.log(np.abs(v) + 1.0)))


def _floor_pow_array(ns: np.ndarray, e) -> np.ndarray:
    """Vectorised exact ``floor(n**e)``; near-integer entries escalate to :func:`floor_pow`."""
    ld = np.asarray(ns, dtype=np.longdouble) ** _ld(e)
    fl = np.floor(ld)
    frac = ld - fl
    risky = (frac < _guard(ld)) | (1.0 - frac < _guard(ld))
    out = fl.astype(np.int64)
    for i in np.flatnonzero(risky):
        out[i] = _floor_pow_exact(int(ns[i]), e)
    return out


def _check_gamma(g):
    if not (0 < g < 1):
        raise DomainError(f"gamma must lie in (0, 1), got {g}", g)


def gamma_of(c_exp: Exponent):
    """``1/c`` kept exact: pass the result to :func:`ps_indicator` for rational ``c``."""
    c = as_exact(c_exp)
    return 1 / c


def ps_indicator(p: int, gamma_c: Exponent) -> bool:
    """``floor(-p^g) - floor(-(p+1)^g) == 1``: is ``p = floor(n^(1/g))`` for some ``n``?

    A float ``gamma_c`` is read as its shortest decimal, which for ``1/1.1``
    is not ``10/11``; use :func:`gamma_of` to get the exact reciprocal.
    """
    g = as_exact(gamma_c)
    _check_gamma(g)
    p = int(p)
    if p < 1:
        raise DomainError(f"ps_indicator needs p >= 1, got {p}", p)
    return bool(ps_indicator_array(np.array([p]), g)[0])


def _ceil_pow_array(ns, g) -> np.ndarray:
    # ceil(x) = -floor(-x); via floor_pow and an exactness test
    fl = _floor_pow_array(ns, g)
    ld = np.asarray(ns, dtype=np.longdouble) ** _ld(g)
    frac = ld - np.floor(ld)
    out = fl + 1
    maybe_int = (frac < _guard(ld)) | (1.0 - frac < _guard(ld))
    for i in np.flatnonzero(maybe_int):
        out[i] = fl[i] + (0 if _is_integer_power(int(ns[i]), g, int(fl[i])) else 1)
    return out


def _is_integer_power(n: int, g, fl: int) -> bool:
    if isinstance(g, Fraction):
        root = _int_root(n, g.denominator)
        return root is not None and root**g.numerator == fl
    with mpmath.workdps(_MP_DPS):
        v = mpmath.power(n, _mp(g))
        if abs(v - fl) > _MP_NEAR:
            return False
    raise PrecisionError(f"{n}^{g} is within 1e-40 of the integer {fl}")


def ps_indicator_array(ps, gamma_c: Exponent) -> np.ndarray:
    """Vectorised :func:`ps_indicator`."""
    g = as_exact(gamma_c)
    _check_gamma(g)
    ps = np.asarray(ps, dtype=np.int64)
    # floor(-x) = -ceil(x)
    c0 = _ceil_pow_array(ps, g)
    c1 = _ceil_pow_array(ps + 1, g)
    return (c1 - c0) == 1


def ps_set_bruteforce(n_max: int, c_exp: Exponent) -> np.ndarray:
    """Sorted distinct values ``floor(n^c)`` for ``1 <= n <= n_max`` (direct route)."""
    c = as_exact(c_exp)
    ns = np.arange(1, int(n_max) + 1, dtype=np.int64)
    return np.unique(_floor_pow_array(ns, c))


def _check_c(c):
    if not (1 < c < PS_C_MAX):
        raise DomainError(f"c must lie in (1, 755/662), got {c}", c)


def pi_c(x: int, c_exp: Exponent) -> int:
    """``#{n <= x : floor(n^c) is prime}`` by enumeration."""
    c = as_exact(c_exp)
    _check_c(c)
    x = int(x)
    if x > PI_C_CAP:
        raise CapacityError(f"pi_c supports x <= {PI_C_CAP}, got {x}")
    if x < 1:
        return 0
    vals = _floor_pow_array(np.arange(1, x + 1, dtype=np.int64), c)
    table = primality_table(int(vals[-1]))
    return int(np.count_nonzero(table[vals]))


def li_offset(x: float) -> float:
    """``int_2^x dt/log t`` by adaptive quadrature."""
    if x < 2:
        raise DomainError(f"li_offset needs x >= 2, got {x}", x)
    return integrate(lambda t: 1.0 / math.log(t), 2.0, float(x), abs_tol=1e-9 * max(1.0, x)).value


def pi_c_ratio(x: int, c_exp: Exponent) -> float:
    """``pi_c(x) / (Li(x)/c)``."""
    c = as_exact(c_exp)
    return pi_c(x, c) / (li_offset(x) / float(c))

"""Mertens-product and sieve-dimension empirical checks."""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from ..errors import DomainError
from ..limits import EULER_GAMMA
from .primes import factorize, prime_table


def mertens_checks(x: int) -> tuple:
    """``(product_ratio, sum_residual)`` at ``x``.

    ``product_ratio = prod_{p<=x}(1 - 1/p) * log x * e^gamma`` and
    ``sum_residual = sum_{p<=x} 1/p - log log x``.
    """
    x = int(x)
    if x < 100:
        raise DomainError(f"mertens_checks needs x >= 100, got {x}", x)
    ps = prime_table(x).astype(np.float64)
    log_prod = math.fsum(np.log1p(-1.0 / ps))
    lx = math.log(x)
    ratio = math.exp(log_prod + math.log(lx) + EULER_GAMMA)
    residual = math.fsum(1.0 / ps) - math.log(lx)
    return ratio, residual


def g2(d: int) -> float:
    """Density ``prod_{p | d} (2/p - 1/p^2)`` of the two-dimensional sifted set."""
    out = 1.0
    for p, _ in factorize(int(d)).pairs:
        out *= 2.0 / p - 1.0 / (p * p)
    return out


def dimension_check(v_grid: Iterable[int]) -> list:
    """``sum_{p<=v} (2/p - 1/p^2) log p - 2 log v`` for each ``v``."""
    vs = [int(v) for v in v_grid]
    if not vs:
        return []
    if min(vs) < 1000:
        raise DomainError("dimension_check needs every v >= 1000", min(vs))
    ps = prime_table(max(vs)).astype(np.float64)
    terms = (2.0 / ps - 1.0 / (ps * ps)) * np.log(ps)
    cum = np.cumsum(terms)
    out = []
    for v in vs:
        k = int(np.searchsorted(ps, v, side="right"))
        out.append(float(cum[k - 1]) - 2.0 * math.log(v))
    return out

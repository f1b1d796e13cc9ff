"""Beta-sieve limit functions of dimensions one and two, and sieve weights.

Dimension one (the linear sieve) uses the classical closed forms

    F1(s) = A1/s                                   0 < s <= 3
    F1(s) = A1/s * (1 + L(s - 1))                  3 <= s <= 5
    f1(s) = A1/s * log(s - 1)                      2 <= s <= 4
    f1(s) = A1/s * (log(s-1) + int_3^{s-1} L(u-1) du/u)   4 <= s <= 6

with ``L(x) = int_2^x log(v-1)/v dv`` and ``A1 = 2 e^gamma``.  Dimension two
uses ``F2(s) = A2/s^2`` up to ``beta2 + 1`` and a one-step closed-form
extension on ``[beta2 + 1, beta2 + 2)`` whose constant ``C0`` is fixed by
continuity.  Beyond ``beta2 + 2`` no formula is available; see
:func:`F2` for the two continuation modes.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

from scipy.optimize import bisect
from scipy.special import spence

from .errors import DomainError
from .quadrature import TERM_TOL, integrate

EULER_GAMMA = 0.57721566490153286061
A2_DEFAULT = 43.496
BETA2_DEFAULT = 4.8333

F2_MODES = ("clamp", "floor-one")


def _f2_extension(s: float, A2: float, beta2: float, C0: float) -> float:
    ls = math.log(s - 1.0)
    head = 2.0 * A2 * math.log(beta2) / (s - 1.0) + C0 + 2.0 * A2 * ls * ls + 4.0 * A2 * ls
    return head / (s * s) - 4.0 * A2 * (1.0 + s * ls) / (s * s * (s - 1.0))


def _solve_C0(A2: float, beta2: float) -> float:
    s0 = beta2 + 1.0
    target = A2 / (s0 * s0)

    def gap(C0):
        return _f2_extension(s0, A2, beta2, C0) - target

    lo, hi = -1e4, 1e4
    while gap(lo) > 0:
        lo *= 2
    while gap(hi) < 0:
        hi *= 2
    return bisect(gap, lo, hi, xtol=1e-12, maxiter=500)


@dataclass(frozen=True)
class SieveConstants:
    euler_gamma: float
    A1: float
    A2: float
    beta2: float
    A3: float
    C0: float

    @classmethod
    def build(cls, A2: float = A2_DEFAULT, beta2: float = BETA2_DEFAULT) -> "SieveConstants":
        g = EULER_GAMMA
        return cls(
            euler_gamma=g,
            A1=2.0 * math.exp(g),
            A2=A2,
            beta2=beta2,
            A3=A2 / (2.0 * math.exp(2.0 * g)),
            C0=_solve_C0(A2, beta2),
        )

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_CONSTANTS = SieveConstants.build()


def log_ratio_integral(x: float) -> float:
    """``int_2^x log(v-1)/v dv`` for ``x >= 2``, via the dilogarithm.

    An antiderivative is ``log(v-1) log(v) + Li2(1-v)``; scipy's ``spence(v)``
    is ``Li2(1-v)`` and the value at ``v = 2`` is ``-pi^2/12``.
    """
    if x < 2.0:
        raise DomainError(f"log_ratio_integral needs x >= 2, got {x}", x)
    if x == 2.0:
        return 0.0
    return math.log(x - 1.0) * math.log(x) + float(spence(x)) + math.pi**2 / 12.0


@lru_cache(maxsize=4096)
def _f1_double_integral(s: float) -> float:
    # int_3^{s-1} L(u-1) du/u, empty at s = 4
    if s <= 4.0:
        return 0.0
    res = integrate(lambda u: log_ratio_integral(u - 1.0) / u, 3.0, s - 1.0, abs_tol=TERM_TOL)
    return res.value


def f1(s: float, consts: SieveConstants = DEFAULT_CONSTANTS) -> float:
    """Lower linear-sieve function on ``[2, 6]``."""
    if not (2.0 <= s <= 6.0):
        raise DomainError(f"f1 is defined on [2, 6], got s={s}", s)
    base = math.log(s - 1.0)
    if s <= 4.0:
        return consts.A1 / s * base
    return consts.A1 / s * (base + _f1_double_integral(float(s)))


def F1(s: float, consts: SieveConstants = DEFAULT_CONSTANTS) -> float:
    """Upper linear-sieve function on ``(0, 5]``."""
    if not (0.0 < s <= 5.0):
        raise DomainError(f"F1 is defined on (0, 5], got s={s}", s)
    if s <= 3.0:
        return consts.A1 / s
    return consts.A1 / s * (1.0 + log_ratio_integral(s - 1.0))


def F2(s: float, mode: str = "clamp", consts: SieveConstants = DEFAULT_CONSTANTS) -> float:
    """Upper two-dimensional sieve function.

    ``mode`` selects the continuation past ``beta2 + 2``: ``clamp`` freezes the
    value at ``(beta2 + 2)^-`` and ``floor-one`` additionally floors it at 1.
    """
    if mode not in F2_MODES:
        raise DomainError(f"unknown F2 extension mode {mode!r}", mode)
    if not s > 0.0:
        raise DomainError(f"F2 needs s > 0, got s={s}", s)
    b1 = consts.beta2 + 1.0
    if s <= b1:
        return consts.A2 / (s * s)
    b2 = consts.beta2 + 2.0
    if s < b2:
        return _f2_extension(s, consts.A2, consts.beta2, consts.C0)
    edge = _f2_edge(consts)
    if mode == "floor-one":
        return max(1.0, edge)
    return edge


@lru_cache(maxsize=16)
def _f2_edge(consts: SieveConstants) -> float:
    # left limit at beta2 + 2; the extension formula is smooth there
    s = consts.beta2 + 2.0
    return _f2_extension(s, consts.A2, consts.beta2, consts.C0)


@dataclass(frozen=True)
class WeightParams:
    """Weight parameters ``1 <= b <= c <= a``; ``u = a/c`` is derived."""

    a: float
    b: float
    c: float
    x_log: float

    def __post_init__(self):
        if not (1.0 <= self.b <= self.c <= self.a):
            raise DomainError(f"need 1 <= b <= c <= a, got b={self.b}, c={self.c}, a={self.a}")
        if self.x_log <= 0:
            raise DomainError("x_log must be positive", self.x_log)

    @property
    def u(self) -> float:
        return self.a / self.c


def _check_plog(p_log, params):
    if not (0.0 < p_log <= params.x_log):
        raise DomainError(f"need 0 < log p <= log x, got {p_log}", p_log)


def richert_weight(p_log: float, params: WeightParams) -> float:
    """Richert's linear weight ``1 - u log p / log x``."""
    _check_plog(p_log, params)
    return 1.0 - params.u * p_log / params.x_log


def laborde_weight(
    p_log: float, largest_pf_log: float, is_largest: bool, params: WeightParams
) -> float:
    """Laborde's two-case refinement of the Richert weight.

    ``largest_pf_log`` is the log of the largest prime factor of the integer
    being weighted; ``is_largest`` says whether ``p`` itself is that factor.
    """
    _check_plog(p_log, params)
    if not (0.0 < largest_pf_log <= params.x_log):
        raise DomainError(f"need 0 < log P <= log x, got {largest_pf_log}", largest_pf_log)
    cw = params.c * richert_weight(p_log, params)
    ratio, edge = p_log / params.x_log, params.b / params.a
    if is_largest or ratio >= edge or math.isclose(ratio, edge, rel_tol=1e-12):
        return cw
    alt = params.c - params.b - 1.0 + params.a * largest_pf_log / params.x_log
    return min(cw, alt)

"""The switching-term integral J(rho) and the sieve objective H_delta.

All H integrals use the rescaled variable (exponent divided by theta1), so
the natural ranges are ``[1/vartheta, b/vartheta, c/vartheta]`` and ``delta``
lives in ``[b/vartheta, c/vartheta]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError
from .limits import DEFAULT_CONSTANTS, F1, F2, SieveConstants, f1
from .params import SieveParams, derive_params
from .quadrature import TERM_TOL, TRIPLE_TOL, QuadResult, integrate, integrate_value

# Lower limit conventions for the outer variable of J(rho):
#   printed      -> rho/4
#   sieve-level  -> 1/a  (every prime factor of a sifted element is >= X^(1/a))
J_LOWER_CONVENTIONS = ("printed", "sieve-level")
DEFAULT_J_LOWER = "sieve-level"

TERM_NAMES = (
    "f1_term",
    "F1_double",
    "F1_cb",
    "F1_main",
    "F1_b1",
    "F1_recovered",
    "F2_term",
    "J_term",
)


def J_rho(
    rho: float,
    lower_limit_override: Optional[float] = None,
    abs_tol: float = TRIPLE_TOL,
) -> QuadResult:
    """Triple integral

        int_{lo}^{1/4} du1 / (u1 (1 - u1 - 2 rho))
          int_{u1}^{(1-u1)/3} du2 / u2
            int_{u2}^{(1-u1-u2)/2} du3 / (u3 (1 - u1 - u2 - u3))

    with ``lo = rho/4`` unless overridden.
    """
    if not (0.0 < rho < 1.0 / 6.0):
        raise DomainError(f"J(rho) needs 0 < rho < 1/6, got {rho}", rho)
    lo = rho / 4.0 if lower_limit_override is None else float(lower_limit_override)
    if lo <= 0.0:
        raise DomainError(f"outer lower limit {lo} makes the 1/u1 denominator vanish", lo)
    if lo >= 0.25:
        return QuadResult(0.0, 0.0, 0)
    return _J_cached(float(rho), lo, float(abs_tol))


@lru_cache(maxsize=256)
def _J_cached(rho: float, lo: float, tol: float) -> QuadResult:
    # a-priori weights for splitting the tolerance over the three levels
    w_outer = math.log(0.25 / lo) / (0.75 - 2.0 * rho)
    w_mid = math.log((1.0 - lo) / (3.0 * lo)) + 1.0
    mid_tol = tol / (4.0 * w_outer)
    inner_tol = tol / (4.0 * w_outer * w_mid)
    evals = [0]

    def inner(u1, u2):
        k = 1.0 - u1 - u2
        r = integrate(lambda u3: 1.0 / (u3 * (k - u3)), u2, k / 2.0, abs_tol=inner_tol)
        evals[0] += r.evaluations
        return r.value

    def middle(u1):
        r = integrate(lambda u2: inner(u1, u2) / u2, u1, (1.0 - u1) / 3.0, abs_tol=mid_tol)
        evals[0] += r.evaluations
        return r.value

    outer = integrate(
        lambda u1: middle(u1) / (u1 * (1.0 - u1 - 2.0 * rho)), lo, 0.25, abs_tol=tol / 2.0
    )
    err = outer.abs_error_estimate + tol / 4.0 + tol / 4.0
    return QuadResult(outer.value, min(err, tol), evals[0] + outer.evaluations)


class MonteCarloEstimate(NamedTuple):
    value: float
    std_error: float
    samples: int
    seed: int


def J_monte_carlo(
    rho: float,
    lower_limit_override: Optional[float] = None,
    samples: int = 10**7,
    seed: int = 0,
    chunk: int = 10**6,
) -> MonteCarloEstimate:
    """Plain Monte-Carlo estimate of :func:`J_rho` over the bounding box.

    Points are uniform in ``[lo, 1/4] x [lo, 1/3] x [lo, 1/2]``; the integrand
    is zero outside the ordered region.
    """
    if not (0.0 < rho < 1.0 / 6.0):
        raise DomainError(f"J(rho) needs 0 < rho < 1/6, got {rho}", rho)
    lo = rho / 4.0 if lower_limit_override is None else float(lower_limit_override)
    if not 0.0 < lo < 0.25:
        raise DomainError(f"outer lower limit must lie in (0, 1/4), got {lo}", lo)
    rng = np.random.default_rng(seed)
    his = np.array([0.25, 1.0 / 3.0, 0.5])
    vol = float(np.prod(his - lo))
    total = total_sq = 0.0
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        u = lo + rng.random((n, 3)) * (his - lo)
        u1, u2, u3 = u[:, 0], u[:, 1], u[:, 2]
        rest = 1.0 - u1 - u2
        inside = (u2 >= u1) & (u2 <= (1.0 - u1) / 3.0) & (u3 >= u2) & (u3 <= rest / 2.0)
        f = np.zeros(n)
        a, b, c, k = u1[inside], u2[inside], u3[inside], rest[inside]
        f[inside] = 1.0 / (a * (1.0 - a - 2.0 * rho) * b * c * (k - c))
        total += float(f.sum())
        total_sq += float((f * f).sum())
        done += n
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return MonteCarloEstimate(vol * mean, vol * math.sqrt(var / samples), samples, seed)


def j_lower_limit(params: SieveParams, convention: str) -> Optional[float]:
    if convention == "printed":
        return None
    if convention == "sieve-level":
        return 1.0 / params.a
    raise DomainError(f"unknown J lower-limit convention {convention!r}", convention)


def J_for(params: SieveParams, convention: str = DEFAULT_J_LOWER) -> float:
    return J_rho(params.rho, j_lower_limit(params, convention)).value


@dataclass(frozen=True)
class ObjectiveBreakdown:
    terms: tuple  # ((name, signed value), ...) in TERM_NAMES order
    total: float
    delta: float
    f2_mode: str
    j_lower: str
    J: float
    meta: dict = field(default_factory=dict, compare=False)

    def term(self, name: str) -> float:
        return dict(self.terms)[name]

    def most_negative(self) -> tuple:
        return min(self.terms, key=lambda kv: kv[1])

    def to_dict(self) -> dict:
        return {
            "terms": {k: v for k, v in self.terms},
            "total": self.total,
            "delta": self.delta,
            "f2_mode": self.f2_mode,
            "j_lower": self.j_lower,
            "J": self.J,
            "most_negative_term": self.most_negative()[0],
        }


def _guard(name, fn):
    try:
        return fn()
    except DomainError as exc:
        raise DomainError(f"{name}: {exc}", exc.argument) from exc


def _F1_main_integrand(p: SieveParams, consts):
    vt, c = p.vartheta, p.c
    return lambda s: (c / s - vt) * F1(vt * (1.0 - s), consts)


def _F2_integrand(p: SieveParams, mode, consts):
    vt, c, th = p.vartheta, p.c, p.theta
    return lambda s: (c / s - vt) * F2(vt * (th - s), mode, consts)


def _kinks(p: SieveParams, consts):
    vt = p.vartheta
    return (
        1.0 - 3.0 / vt,
        p.theta - (consts.beta2 + 1.0) / vt,
        p.theta - (consts.beta2 + 2.0) / vt,
    )


def fixed_terms(
    p: SieveParams,
    j_lower: str = DEFAULT_J_LOWER,
    consts: SieveConstants = DEFAULT_CONSTANTS,
    tol: float = TERM_TOL,
) -> dict:
    """The delta-independent summands of H."""
    vt, a, b, c = p.vartheta, p.a, p.b, p.c
    g = consts.euler_gamma
    kinks = _kinks(p, consts)
    s_lo, s_b1 = 1.0 / vt, (b + 1.0) / (2.0 * vt)
    out = {}
    out["f1_term"] = _guard("f1_term", lambda: (5.0 * c - a) * f1(vt, consts))

    def double():
        def inner(s):
            hi = (b + 1.0) / vt - s
            return integrate_value(
                lambda t: F1((1.0 - t) / s, consts) / t, s, hi,
                abs_tol=tol * 1e-2, breakpoints=(1.0 - 3.0 * s,),
            )
        return -integrate_value(lambda s: inner(s) / s, s_lo, s_b1, abs_tol=tol)

    out["F1_double"] = _guard("F1_double", double)
    out["F1_cb"] = _guard("F1_cb", lambda: -(c - b) * integrate_value(
        lambda s: F1(vt * (1.0 - s), consts) / s, s_lo, b / vt, abs_tol=tol, breakpoints=kinks))
    out["F1_main"] = _guard("F1_main", lambda: -integrate_value(
        _F1_main_integrand(p, consts), b / vt, c / vt, abs_tol=tol, breakpoints=kinks))
    out["F1_b1"] = _guard("F1_b1", lambda: -integrate_value(
        lambda s: ((b + 1.0) / vt - 2.0 * s) * F1((1.0 - s) / s, consts) / (s * s),
        s_lo, s_b1, abs_tol=tol, breakpoints=(0.25,)))
    J = _guard("J_term", lambda: J_for(p, j_lower))
    out["J_term"] = -4.0 * math.exp(g) * c / a * J
    out["_J"] = J
    return out


def delta_terms(
    p: SieveParams,
    delta: float,
    f2_mode: str = "clamp",
    consts: SieveConstants = DEFAULT_CONSTANTS,
    tol: float = TERM_TOL,
) -> dict:
    """The two summands of H that depend on delta."""
    vt, c = p.vartheta, p.c
    kinks = _kinks(p, consts)
    hi = c / vt
    rec = _guard("F1_recovered", lambda: integrate_value(
        _F1_main_integrand(p, consts), delta, hi, abs_tol=tol, breakpoints=kinks))
    f2t = _guard("F2_term", lambda: -p.a * math.exp(-consts.euler_gamma) * integrate_value(
        _F2_integrand(p, f2_mode, consts), delta, hi, abs_tol=tol, breakpoints=kinks))
    return {"F1_recovered": rec, "F2_term": f2t}


def assemble(fixed: dict, dterms: dict, delta: float, f2_mode: str, j_lower: str) -> ObjectiveBreakdown:
    merged = {**fixed, **dterms}
    terms = tuple((name, float(merged[name])) for name in TERM_NAMES)
    total = 0.0
    for _, v in terms:
        total += v
    return ObjectiveBreakdown(terms, total, delta, f2_mode, j_lower, fixed["_J"])


def check_delta(p: SieveParams, delta: float) -> None:
    lo, hi = p.b / p.vartheta, p.c / p.vartheta
    slack = 1e-12 * max(1.0, hi)
    if not (lo - slack <= delta <= hi + slack):
        raise DomainError(f"delta={delta} outside [b/vartheta, c/vartheta] = [{lo}, {hi}]", delta)


def H_direct(
    params: SieveParams,
    delta: float,
    f2_mode: str = "clamp",
    j_lower: str = DEFAULT_J_LOWER,
    consts: SieveConstants = DEFAULT_CONSTANTS,
) -> ObjectiveBreakdown:
    """Evaluate every summand of H_delta(vartheta, b, c) in direct integral form."""
    check_delta(params, delta)
    fixed = fixed_terms(params, j_lower, consts)
    return assemble(fixed, delta_terms(params, delta, f2_mode, consts), delta, f2_mode, j_lower)


# -- decomposed form (diagnostic only) ------------------------------------


def coef_A(p: SieveParams, delta: float, consts=DEFAULT_CONSTANTS) -> float:
    g = consts.euler_gamma
    vt = p.vartheta
    integral = integrate_value(lambda s: F1(vt * (1.0 - s), consts) / s, 1.0 / vt, delta,
                               breakpoints=_kinks(p, consts))
    return (-math.exp(-g) * f1(vt, consts) + integral / (2.0 * math.exp(g))
            + math.log((1.0 - delta) / delta) / vt)


def coef_B(p: SieveParams, delta: float, j_lower=DEFAULT_J_LOWER, consts=DEFAULT_CONSTANTS) -> float:
    g = consts.euler_gamma
    vt = p.vartheta
    integral = integrate_value(lambda s: F1(vt * (1.0 - s), consts) / s, 1.0 / vt, delta,
                               breakpoints=_kinks(p, consts))
    return (math.exp(-g) * f1(vt, consts) - integral / (2.0 * math.exp(g))
            - 2.0 / p.a * J_for(p, j_lower))


def frak_F(p: SieveParams, delta: float, c: float, f2_mode="clamp", consts=DEFAULT_CONSTANTS) -> float:
    """The c-nonlinear part, normalised to vanish at ``c = vartheta * theta``.

    Built by integrating its c-derivative
    ``-(a / (2 e^{2 gamma})) int_delta^{c/vartheta} F2(vartheta (theta - s)) ds/s``.
    """
    vt, th = p.vartheta, p.theta
    c_ref = vt * th
    if c == c_ref:
        return 0.0
    k = -p.a / (2.0 * math.exp(2.0 * consts.euler_gamma))

    def deriv(cc):
        hi = cc / vt
        sign = 1.0 if hi >= delta else -1.0
        lo_, hi_ = sorted((delta, hi))
        return k * sign * integrate_value(lambda s: F2(vt * (th - s), f2_mode, consts) / s, lo_, hi_)

    lo_, hi_ = sorted((c, c_ref))
    val = integrate(deriv, lo_, hi_, abs_tol=TERM_TOL).value
    return val if c >= c_ref else -val


@dataclass(frozen=True)
class Decomposition:
    A: float
    B: float
    D: float
    frak_F: float
    total: float


def H_decomposed(
    params: SieveParams,
    delta: float,
    f2_mode: str = "clamp",
    j_lower: str = DEFAULT_J_LOWER,
    consts: SieveConstants = DEFAULT_CONSTANTS,
) -> Decomposition:
    """Assemble ``2 e^gamma (A b + B c + D + F)``.  Diagnostic only.

    Needs ``vartheta >= 4`` and ``b >= vartheta - 3``; ``D`` evaluates the
    direct form at ``(vartheta, vartheta*theta, vartheta*theta)``.
    """
    p = params
    if p.vartheta < 4.0 or p.b < p.vartheta - 3.0:
        raise DomainError(
            f"decomposition needs vartheta >= 4 and b >= vartheta - 3 "
            f"(vartheta={p.vartheta}, b={p.b})", (p.vartheta, p.b))
    check_delta(p, delta)
    g = consts.euler_gamma
    A = coef_A(p, delta, consts)
    B = coef_B(p, delta, j_lower, consts)
    F = _guard("frak_F", lambda: frak_F(p, delta, p.c, f2_mode, consts))
    bc = p.vartheta * p.theta
    p_ref = derive_params(p.rho, p.vartheta, bc, bc, consts)
    H_ref = _guard("D(H at b=c=vartheta*theta)",
                   lambda: H_direct(p_ref, p.theta, f2_mode, j_lower, consts).total)
    log_term = math.log((1.0 - delta) / delta)
    D = H_ref / (2.0 * math.exp(g)) - delta * log_term + 2.0 * bc / p.a * J_for(p, j_lower)
    total = 2.0 * math.exp(g) * (A * p.b + B * p.c + D + F)
    return Decomposition(A, B, D, F, total)


def decomposition_diagnostic(params, delta, f2_mode="clamp", j_lower=DEFAULT_J_LOWER,
                             consts=DEFAULT_CONSTANTS) -> dict:
    """Compare the decomposed and direct forms, recording why if it can't be done."""
    direct = H_direct(params, delta, f2_mode, j_lower, consts).total
    report = {"delta": delta, "H_direct": direct}
    try:
        dec = H_decomposed(params, delta, f2_mode, j_lower, consts)
    except Exception as exc:  # noqa: BLE001 - recorded, never raised
        report.update(applicable=False, reason=f"{type(exc).__name__}: {exc}")
        return report
    report.update(
        applicable=True,
        A=dec.A, B=dec.B, D=dec.D, frak_F=dec.frak_F,
        H_decomposed=dec.total,
        discrepancy=abs(dec.total - direct),
    )
    return report

"""Constraint system, delta-maximisation of H, admissible-rho search and the
Piatetski-Shapiro parameter arithmetic."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.optimize import bisect

from .errors import BudgetExceededError, DomainError, EmptyFeasibleSetError
from .limits import DEFAULT_CONSTANTS, F2_MODES, SieveConstants
from .objective import (
    DEFAULT_J_LOWER,
    ObjectiveBreakdown,
    assemble,
    delta_terms,
    fixed_terms,
)
from .params import SieveParams, delta0_formula, derive_params

__all__ = [
    "SieveParams",
    "derive_params",
    "delta0_formula",
    "ConstraintRecord",
    "FeasibilityReport",
    "check_constraints",
    "MaxResult",
    "maximize_H",
    "admissible",
    "BoundaryResult",
    "search_boundary_rho",
    "PsParams",
    "ps_rho",
    "ps_root",
    "laborde_bound",
    "LABORDE_CONSTANT",
]

log = logging.getLogger(__name__)

COARSE_POINTS = 64
GOLDEN_TOL = 1e-6
RHO_LO, RHO_HI = 1e-4, 1.0 / 6.0
BISECTION_STEPS = 16

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ConstraintRecord:
    name: str
    expr: str
    lhs: float
    rhs: float
    passed: bool
    gating: bool = True
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name, "expr": self.expr, "lhs": self.lhs, "rhs": self.rhs,
            "passed": self.passed, "gating": self.gating, "note": self.note,
        }


@dataclass
class FeasibilityReport:
    params: Optional[SieveParams]
    records: list = field(default_factory=list)
    h_max: float = float("nan")
    delta_star: float = float("nan")
    breakdown: Optional[ObjectiveBreakdown] = None
    h_error: str = ""
    f2_mode: str = "clamp"
    j_lower: str = DEFAULT_J_LOWER
    harman: bool = False

    @property
    def constraints_pass(self) -> bool:
        return all(r.passed for r in self.records if r.gating)

    @property
    def feasible(self) -> bool:
        # advisory records (the delta0 window) never gate
        return self.constraints_pass and math.isfinite(self.h_max) and self.h_max > 0.0

    def record(self, name: str) -> ConstraintRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "params": None if self.params is None else self.params.to_dict(),
            "constraints": [r.to_dict() for r in self.records],
            "h_max": self.h_max,
            "delta_star": self.delta_star,
            "feasible": self.feasible,
            "f2_mode": self.f2_mode,
            "j_lower": self.j_lower,
            "harman": self.harman,
            "h_error": self.h_error,
            "breakdown": None if self.breakdown is None else self.breakdown.to_dict(),
        }


def check_constraints(params: SieveParams, delta_star: Optional[float] = None) -> list:
    """Evaluate the constraint system; failures become records, never errors."""
    p = params
    vt, a, b, c, rho = p.vartheta, p.a, p.b, p.c, p.rho
    recs = []

    ok = 1.0 <= b <= c <= a
    recs.append(ConstraintRecord("i", "1 <= b <= c <= a", b, a, ok,
                                 note=f"b={b}, c={c}, a={a}"))

    if b == 1.0:
        recs.append(ConstraintRecord("ii", "b = 1", b, 1.0, True))
    elif b >= 3.0:
        rhs = 3.0 * c + b + 1.0
        recs.append(ConstraintRecord("ii", "a >= 3c + b + 1 (b >= 3)", a, rhs, a >= rhs))
    else:
        rhs = 3.0 * c + b + 1.0
        note = "not applicable for 1 < b < 3"
        if a < rhs:
            note += "; the stricter b > 1 reading (a >= 3c + b + 1) would fail"
            log.info("constraint (ii): b=%g in (1, 3) passes, stricter reading fails (a=%g < %g)",
                     b, a, rhs)
        recs.append(ConstraintRecord("ii", "b = 1, or a >= 3c + b + 1 if b >= 3", a, rhs, True,
                                     note=note))

    lo, hi = b / vt, c / vt
    d_raw, d_res = p.delta0, p.delta0_rescaled
    recs.append(ConstraintRecord("iii_raw", "b/vartheta <= delta0 <= c/vartheta (exponent units)",
                                 d_raw, hi, lo <= d_raw <= hi, gating=False,
                                 note=f"window [{lo:.12g}, {hi:.12g}]"))
    recs.append(ConstraintRecord("iii_rescaled",
                                 "b/vartheta <= delta0/theta1 <= c/vartheta (objective units)",
                                 d_res, hi, lo <= d_res <= hi, gating=False,
                                 note=f"window [{lo:.12g}, {hi:.12g}]"))

    d = hi if delta_star is None or not math.isfinite(delta_star) else delta_star
    cap = min(1.0 / d, 1.0 / a)
    binds = 1.0 / d < 1.0 / a
    if binds:
        log.warning("constraint (iv): 1/delta = %g is the binding cap (1/a = %g)", 1.0 / d, 1.0 / a)
    recs.append(ConstraintRecord("iv", "0 < rho < min(1/delta, 1/a)", rho, cap, 0.0 < rho < cap,
                                 note="1/delta binds" if binds else "1/a binds"))

    ok = p.theta1 + rho < 1.0 / 3.0 and p.theta1 > 0.0
    recs.append(ConstraintRecord("v", "theta1 + rho < 1/3, theta1 > 0", p.theta1 + rho, 1.0 / 3.0, ok))

    recs.append(ConstraintRecord("vi", "5c - a > 0", p.lambda_max_inv, 0.0, p.lambda_max_inv > 0.0))
    return recs


class MaxResult(NamedTuple):
    delta_star: float
    h_max: float
    breakdown: ObjectiveBreakdown


def _golden(fn, lo, hi, tol):
    # maximise a unimodal fn on [lo, hi]; returns (x, fx)
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1_, f2_ = fn(x1), fn(x2)
    while hi - lo >= tol:
        if f1_ >= f2_:
            hi, x2, f2_ = x2, x1, f1_
            x1 = hi - _INVPHI * (hi - lo)
            f1_ = fn(x1)
        else:
            lo, x1, f1_ = x1, x2, f2_
            x2 = lo + _INVPHI * (hi - lo)
            f2_ = fn(x2)
    return (x1, f1_) if f1_ >= f2_ else (x2, f2_)


def maximize_H(
    params: SieveParams,
    f2_mode: str = "clamp",
    j_lower: str = DEFAULT_J_LOWER,
    harman: bool = False,
    consts: SieveConstants = DEFAULT_CONSTANTS,
) -> MaxResult:
    """Maximise H over delta in [b/vartheta, c/vartheta].

    A 64-point grid locates the best cell; golden section then shrinks the
    bracketing pair of cells below 1e-6.  ``harman`` freezes delta at the
    left end ``b/vartheta`` instead.
    """
    if f2_mode not in F2_MODES:
        raise DomainError(f"unknown F2 extension mode {f2_mode!r}", f2_mode)
    p = params
    lo, hi = p.b / p.vartheta, p.c / p.vartheta
    fixed = fixed_terms(p, j_lower, consts)
    cache = {}

    def h(d):
        if d not in cache:
            cache[d] = assemble(fixed, delta_terms(p, d, f2_mode, consts), d, f2_mode, j_lower)
        return cache[d].total

    if harman or hi - lo < GOLDEN_TOL:
        h(lo)
        return MaxResult(lo, cache[lo].total, cache[lo])

    grid = np.linspace(lo, hi, COARSE_POINTS)
    vals = [h(float(d)) for d in grid]
    k = int(np.argmax(vals))
    a_, b_ = float(grid[max(k - 1, 0)]), float(grid[min(k + 1, COARSE_POINTS - 1)])
    x, fx = _golden(h, a_, b_, GOLDEN_TOL)
    if vals[k] > fx:
        x = float(grid[k])
    return MaxResult(x, cache[x].total, cache[x])


def admissible(
    rho: float,
    vartheta: float,
    b: float,
    c: float,
    f2_mode: str = "clamp",
    j_lower: str = DEFAULT_J_LOWER,
    harman: bool = False,
    consts: SieveConstants = DEFAULT_CONSTANTS,
) -> FeasibilityReport:
    """Derive, check and maximise; domain failures land in the report."""
    try:
        p = derive_params(rho, vartheta, b, c, consts)
    except DomainError as exc:
        rep = FeasibilityReport(None, f2_mode=f2_mode, j_lower=j_lower, harman=harman)
        rep.records.append(ConstraintRecord("derive", "derive_params", rho, float("nan"), False,
                                            note=str(exc)))
        return rep
    rep = FeasibilityReport(p, f2_mode=f2_mode, j_lower=j_lower, harman=harman)
    rep.records = check_constraints(p)
    if not rep.record("i").passed:
        rep.h_error = "constraint (i) fails; H not maximised"
        return rep
    try:
        res = maximize_H(p, f2_mode, j_lower, harman, consts)
    except (DomainError, BudgetExceededError) as exc:
        rep.h_error = f"{type(exc).__name__}: {exc}"
        return rep
    rep.delta_star, rep.h_max, rep.breakdown = res
    rep.records = check_constraints(p, res.delta_star)
    return rep


@dataclass(frozen=True)
class BoundaryResult:
    rho_star: float
    vartheta: float
    b: float
    c: float
    per_point: tuple  # ((vartheta, b, c, boundary or None), ...)

    def to_dict(self) -> dict:
        return {
            "rho_star": self.rho_star,
            "vartheta": self.vartheta,
            "b": self.b,
            "c": self.c,
            "per_point": [
                {"vartheta": v, "b": b, "c": c, "boundary": r} for v, b, c, r in self.per_point
            ],
        }


def _boundary_at(vt, b, c, f2_mode, j_lower, harman, consts, steps):
    def ok(r):
        return admissible(r, vt, b, c, f2_mode, j_lower, harman, consts).feasible

    lo, hi = RHO_LO, RHO_HI
    if not ok(lo):
        return None
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def search_boundary_rho(
    vartheta_grid: Sequence[float],
    b_grid: Sequence[float],
    c_grid: Sequence[float],
    f2_mode: str = "clamp",
    harman: bool = False,
    j_lower: str = DEFAULT_J_LOWER,
    threads: int = 1,
    consts: SieveConstants = DEFAULT_CONSTANTS,
    steps: int = BISECTION_STEPS,
) -> BoundaryResult:
    """Bisect rho on (1e-4, 1/6) at every grid point and keep the largest boundary.

    The returned boundary is the last rho found feasible, so it is a lower
    bracket of the true threshold within (1/6 - 1e-4)/2**steps.
    """
    points = list(product(vartheta_grid, b_grid, c_grid))
    if not points:
        raise DomainError("search grids must be nonempty", None)

    def run(pt):
        return _boundary_at(*pt, f2_mode, j_lower, harman, consts, steps)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            found = list(ex.map(run, points))
    else:
        found = [run(pt) for pt in points]

    per_point = tuple((float(v), float(b), float(c), r) for (v, b, c), r in zip(points, found))
    hits = [(r, v, b, c) for v, b, c, r in per_point if r is not None]
    if not hits:
        raise EmptyFeasibleSetError(
            f"no grid point is admissible at rho = {RHO_LO:g} "
            f"({len(points)} points, f2_mode={f2_mode}, harman={harman})"
        )
    # largest rho wins; remaining ties go to the lexicographically smallest point
    best = min(hits, key=lambda t: (-t[0], t[1], t[2], t[3]))
    return BoundaryResult(best[0], best[1], best[2], best[3], per_point)


# -- Piatetski-Shapiro parameter arithmetic --------------------------------

LABORDE_CONSTANT = 0.144
PS_C_MAX = 755.0 / 662.0


def ps_rho(c_exp: float) -> float:
    """``(1 + 9(1/c - 1))/12 - c/(13 - 0.144)``; may be non-positive."""
    if not (1.0 < c_exp < PS_C_MAX):
        raise DomainError(f"ps_rho needs 1 < c < 755/662, got {c_exp}", c_exp)
    return (1.0 + 9.0 * (1.0 / c_exp - 1.0)) / 12.0 - c_exp / (13.0 - LABORDE_CONSTANT)


def ps_root(xtol: float = 1e-14) -> float:
    """The zero of ps_rho on (1, 755/662), by bisection."""
    return bisect(ps_rho, 1.0 + 1e-12, PS_C_MAX - 1e-12, xtol=xtol)


@dataclass(frozen=True)
class PsParams:
    c_exp: float
    gamma_c: float
    rho_ps: float
    theta3: float
    r: int

    @classmethod
    def build(cls, c_exp: float, r: int, rho_ps: Optional[float] = None) -> "PsParams":
        """``rho_ps`` defaults to ``ps_rho(c_exp)``."""
        if rho_ps is None:
            rho_ps = ps_rho(c_exp)
        g = 1.0 / c_exp
        return cls(c_exp, g, rho_ps, (1.0 + 9.0 * (g - 1.0)) / 12.0 - rho_ps, int(r))

    def to_dict(self) -> dict:
        return {"c_exp": self.c_exp, "gamma_c": self.gamma_c, "rho_ps": self.rho_ps,
                "theta3": self.theta3, "r": self.r}


def laborde_bound(ps: PsParams) -> tuple:
    """``(passed, margin)`` with ``margin = c/theta3 - (r - 0.144)``; passes when ``<= 0``."""
    if not ps.theta3 > 0.0:
        raise DomainError(f"theta3 = {ps.theta3} <= 0; the bound is degenerate", ps.theta3)
    margin = ps.c_exp / ps.theta3 - (ps.r - LABORDE_CONSTANT)
    return margin <= 0.0, margin

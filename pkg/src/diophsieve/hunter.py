"""Empirical search for solutions of |l0 + l1 p + l2 m| < bound and the
density measurements of the sifted sets behind the sieve argument.
"""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Union

import mpmath
import numpy as np

from .arith.checks import g2
from .arith.contfrac import continued_fraction
from .arith.primes import CONVENTIONS, factor_counts, factorize, prime_table
from .arith.psprimes import gamma_of, ps_indicator_array
from .errors import CapacityError, DomainError, NoSuitableConvergentError

HUNT_CAP = 10**8
MP_DPS = 50
VALIDATE_DPS = 80
# float pre-filter slack; every candidate is then decided at MP_DPS digits
CANDIDATE_MARGIN = 1e-6

Real = Union[str, float, int, Fraction, mpmath.mpf]

_SQRT = re.compile(r"^\s*([+-]?)\s*(?:(\d+(?:\.\d*)?)\s*\*\s*)?sqrt\(\s*(\d+)\s*\)\s*$")


def parse_real(x: Real, dps: int = MP_DPS) -> mpmath.mpf:
    """Parse ``x`` into an mpf at ``dps`` digits.

    Strings may be decimals, ratios ``p/q``, or ``[-][k*]sqrt(n)``.
    """
    with mpmath.workdps(dps):
        if isinstance(x, mpmath.mpf):
            return +x
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        if isinstance(x, (int, float)):
            return mpmath.mpf(x)
        s = str(x).strip()
        m = _SQRT.match(s)
        if m:
            sign = -1 if m.group(1) == "-" else 1
            coef = mpmath.mpf(m.group(2)) if m.group(2) else mpmath.mpf(1)
            return sign * coef * mpmath.sqrt(int(m.group(3)))
        try:
            fr = Fraction(s)
        except ValueError as exc:
            raise DomainError(f"cannot parse real number {x!r}", x) from exc
        return mpmath.mpf(fr.numerator) / fr.denominator


class Normalized(NamedTuple):
    lambda0: mpmath.mpf
    lambda1: mpmath.mpf
    lambda2: mpmath.mpf
    scale: mpmath.mpf


def normalize(lambda0: Real, lambda1: Real, lambda2: Real) -> Normalized:
    """Divide by ``-lambda2`` so that ``lambda2 = -1`` and ``lambda1 > 0``.

    ``|l0 + l1 p + l2 m| = scale * |l0' + l1' p - m|`` with ``scale = |l2|``.
    """
    with mpmath.workdps(MP_DPS):
        l0, l1, l2 = parse_real(lambda0), parse_real(lambda1), parse_real(lambda2)
        if l2 == 0:
            raise DomainError("lambda2 must be nonzero", lambda2)
        if not l1 / l2 < 0:
            raise DomainError(f"need lambda1/lambda2 < 0, got {lambda1}/{lambda2}", (lambda1, lambda2))
        k = -l2
        return Normalized(l0 / k, l1 / k, mpmath.mpf(-1), abs(l2))


@dataclass(frozen=True)
class HuntConfig:
    lambda0: Real = 0
    lambda1: Real = "sqrt(2)"
    lambda2: Real = -1
    tau: Optional[float] = None
    abs_bound: Optional[float] = None
    X: int = 10**6
    r: int = 3
    ps_mode: bool = False
    c_exp: Optional[Real] = None
    convention: str = "multiplicity"

    def __post_init__(self):
        if (self.tau is None) == (self.abs_bound is None):
            raise DomainError("give exactly one of tau and abs_bound")
        if self.abs_bound is not None and not self.abs_bound > 0:
            raise DomainError("abs_bound must be positive", self.abs_bound)
        if self.tau is not None and self.tau < 0:
            raise DomainError("tau must be nonnegative", self.tau)
        if not 2 <= int(self.X) <= HUNT_CAP:
            if int(self.X) > HUNT_CAP:
                raise CapacityError(f"hunt supports X <= {HUNT_CAP}, got {self.X}")
            raise DomainError(f"X must be at least 2, got {self.X}", self.X)
        if self.r < 0:
            raise DomainError("r must be nonnegative", self.r)
        if self.ps_mode and self.c_exp is None:
            raise DomainError("ps_mode needs c_exp")
        if self.convention not in CONVENTIONS:
            raise DomainError(f"unknown convention {self.convention!r}", self.convention)

    def bound(self, p):
        """Bound in original units: ``p^-tau`` or the absolute bound."""
        if self.abs_bound is not None:
            return np.full(np.shape(p), float(self.abs_bound)) if np.ndim(p) else float(self.abs_bound)
        return np.power(np.asarray(p, dtype=np.float64), -float(self.tau))

    def bound_mp(self, p: int) -> mpmath.mpf:
        if self.abs_bound is not None:
            return mpmath.mpf(self.abs_bound)
        return mpmath.power(p, -mpmath.mpf(self.tau))

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("lambda0", "lambda1", "lambda2", "c_exp"):
            if d[k] is not None and not isinstance(d[k], (int, float, str)):
                d[k] = str(d[k])
        return d


@dataclass(frozen=True)
class SolutionRecord:
    p: int
    m: int
    value: float
    bound: float
    big_omega_m: int

    def to_dict(self) -> dict:
        return asdict(self)


def _decide(cfg: HuntConfig, nz: Normalized, p: int, m: int, dps: int) -> Optional[float]:
    # exact-enough decision; returns the value in original units or None
    with mpmath.workdps(dps):
        resid = nz.lambda0 + nz.lambda1 * p - m
        if abs(resid) >= mpmath.mpf(1) / 2:
            return None
        value = resid * nz.scale
        if not abs(value) < cfg.bound_mp(p):
            return None
        return float(value)


def _hunt_chunk(cfg, ps, l0f, l1f, scale_f):
    # float prefilter plus factor counts; numpy only, so safe to run in threads
    y = np.longdouble(l0f) + np.longdouble(l1f) * ps.astype(np.longdouble)
    m = np.rint(y)
    resid = np.abs(y - m).astype(np.float64)
    thr = cfg.bound(ps) / scale_f
    keep = (resid < thr + CANDIDATE_MARGIN) & (m >= 1)
    ps_c, m_c = ps[keep], m[keep].astype(np.int64)
    if ps_c.size == 0:
        return []
    counts = factor_counts(m_c, cfg.convention)
    ok = counts <= cfg.r
    return list(zip(ps_c[ok].tolist(), m_c[ok].tolist(), counts[ok].tolist()))


def _finalize(cfg, nz, candidates) -> list:
    # mpmath precision is process-global, so decisions stay on one thread
    out = []
    for p, mm, k in candidates:
        v = _decide(cfg, nz, p, mm, MP_DPS)
        if v is not None:
            with mpmath.workdps(MP_DPS):
                bound = float(cfg.bound_mp(p))
            out.append(SolutionRecord(p, mm, v, bound, int(k)))
    return out


def admissible_primes(cfg: HuntConfig) -> np.ndarray:
    ps = prime_table(int(cfg.X))
    if cfg.ps_mode:
        ps = ps[ps_indicator_array(ps, gamma_of(cfg.c_exp))]
    return ps


def hunt(cfg: HuntConfig, threads: int = 1, chunk: int = 1 << 16) -> list:
    """All records with ``p <= X``, sorted by ``p``."""
    nz = normalize(cfg.lambda0, cfg.lambda1, cfg.lambda2)
    ps = admissible_primes(cfg)
    l0f, l1f, sf = float(nz.lambda0), float(nz.lambda1), float(nz.scale)
    if abs(l1f) * cfg.X + abs(l0f) > 2.0**62:
        raise CapacityError("lambda1 * X overflows the integer range")
    parts = [ps[i : i + chunk] for i in range(0, ps.size, chunk)]

    def run(part):
        return _hunt_chunk(cfg, part, l0f, l1f, sf)

    if threads > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(run, parts))
    else:
        results = [run(part) for part in parts]
    out = _finalize(cfg, nz, [c for part in results for c in part])
    out.sort(key=lambda rec: rec.p)
    return out


def validate_record(rec: SolutionRecord, cfg: HuntConfig, dps: int = VALIDATE_DPS) -> bool:
    """Independent re-check at ``dps`` digits with scalar factorisation."""
    with mpmath.workdps(dps):
        l0, l1, l2 = (parse_real(v, dps) for v in (cfg.lambda0, cfg.lambda1, cfg.lambda2))
        value = l0 + l1 * rec.p + l2 * rec.m
        bound = cfg.bound_mp(rec.p)
        ok = abs(value) < bound and abs(value / -l2) < mpmath.mpf(1) / 2
    f = factorize(rec.m) if rec.m > 1 else None
    omega = 0 if f is None else (f.big_omega if cfg.convention == "multiplicity" else f.omega)
    prime_ok = factorize(rec.p).big_omega == 1
    if cfg.ps_mode:
        prime_ok = prime_ok and bool(ps_indicator_array(np.array([rec.p]), gamma_of(cfg.c_exp))[0])
    return bool(ok and omega <= cfg.r and omega == rec.big_omega_m and prime_ok)


def hunt_summary(records: Sequence[SolutionRecord], cfg: HuntConfig) -> dict:
    n_primes = int(admissible_primes(cfg).size)
    out = {"records": len(records), "primes_scanned": n_primes}
    if records:
        k = min(range(len(records)), key=lambda i: abs(records[i].value))
        out.update(
            min_abs_value=abs(records[k].value),
            min_abs_value_p=records[k].p,
            min_abs_value_m=records[k].m,
            largest_p=records[-1].p,
        )
    return out


# -- sifted sets -----------------------------------------------------------


@dataclass(frozen=True)
class SiftedSet:
    q: int
    a_prime: int
    b_prime: int
    xi: float
    X: int
    members: np.ndarray  # one entry per admissible prime, so repeats are kept
    n_primes: int

    @property
    def predicted_size(self) -> float:
        return self.xi * self.n_primes

    def summary(self) -> dict:
        return {
            "q": self.q, "a_prime": self.a_prime, "b_prime": self.b_prime,
            "xi": self.xi, "X": self.X, "size": int(self.members.size),
            "pi_X": self.n_primes, "predicted": self.predicted_size,
            "ratio": self.members.size / self.predicted_size,
        }


def _as_fraction(x: Real) -> Optional[Fraction]:
    # rational inputs keep their finite expansion instead of a 50-digit interval
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str) and not _SQRT.match(x):
        try:
            return Fraction(x.strip())
        except ValueError:
            return None
    return None


def select_convergent(lambda1: Real, X: int, rho: float, hint: Optional[int] = None) -> tuple:
    """Convergent ``(a', q)`` with ``q`` within a factor 4 of ``X^(1/3 + rho)``.

    Among the eligible convergents the one closest to the target in log scale
    wins; ``hint`` picks a convergent index directly.
    """
    target = float(X) ** (1.0 / 3.0 + rho)
    exact = _as_fraction(lambda1)
    with mpmath.workdps(MP_DPS):
        x = exact if exact is not None else parse_real(lambda1)
        cf = continued_fraction(x, int(4 * target) + 1)
    eligible = [(k, a, q) for k, (a, q) in enumerate(cf.convergents) if target / 4 <= q <= 4 * target]
    if hint is not None:
        eligible = [t for t in eligible if t[0] == hint]
    if not eligible:
        raise NoSuitableConvergentError(
            f"no convergent of {lambda1} has q within a factor 4 of X^(1/3+rho) = {target:.6g}"
            + (f" at index {hint}" if hint is not None else "")
        )
    _, a, q = min(eligible, key=lambda t: (abs(math.log(t[2] / target)), t[0]))
    return a, q


def _window_threshold(q: int, xi) -> int:
    # largest integer k with k < q*xi/2, evaluated at high precision
    with mpmath.workdps(MP_DPS):
        t = mpmath.mpf(q) * xi / 2
        return int(mpmath.ceil(t)) - 1


def _b_prime(lambda0: Real, q: int) -> int:
    with mpmath.workdps(MP_DPS):
        v = parse_real(lambda0) * q
        fl = mpmath.floor(v)
        frac = v - fl
        fl = int(fl)
        if frac > 0.5 or (frac == 0.5 and fl % 2 == 1):
            return fl + 1
        return fl


def _xi(X: int, rho: float):
    with mpmath.workdps(MP_DPS):
        return mpmath.power(X, -mpmath.mpf(rho))


def build_sifted_set(
    lambda1: Real,
    X: int,
    rho: float,
    lambda0: Real = 0,
    convergent_index_hint: Optional[int] = None,
    rounding: str = "floor",
) -> SiftedSet:
    """``{ floor((b' + p a')/q) : p <= X, ||(b' + p a')/q|| < xi/2 }`` with ``xi = X^-rho``.

    ``rounding="nearest"`` collects the nearest integer instead of the floor.
    """
    if rounding not in ("floor", "nearest"):
        raise DomainError(f"unknown rounding {rounding!r}", rounding)
    if rho < 0:
        raise DomainError("rho must be nonnegative", rho)
    a, q = select_convergent(lambda1, X, rho, convergent_index_hint)
    b = _b_prime(lambda0, q)
    xi = _xi(X, rho)
    kmax = _window_threshold(q, xi)
    ps = prime_table(int(X))
    num = b + ps * a
    r = np.mod(num, q)
    dist = np.minimum(r, q - r)
    keep = dist <= kmax
    members = num[keep] // q
    if rounding == "nearest":
        members = members + (2 * r[keep] > q)
    return SiftedSet(q, a, b, float(xi), int(X), members, int(ps.size))


class DensityRow(NamedTuple):
    d: int
    observed: int
    predicted: float
    rel_error: float


def measure_density(sifted: SiftedSet, d_max: int) -> list:
    """``#A_d`` against ``pi(X) xi / d`` for ``1 <= d <= d_max``."""
    if not 1 <= d_max <= 50:
        raise DomainError(f"d_max must lie in [1, 50], got {d_max}", d_max)
    rows = []
    for d in range(1, d_max + 1):
        obs = int(np.count_nonzero(sifted.members % d == 0))
        pred = sifted.predicted_size / d
        rows.append(DensityRow(d, obs, pred, obs / pred - 1.0))
    return rows


def median_abs_error(rows: Sequence[DensityRow]) -> float:
    return float(np.median([abs(r.rel_error) for r in rows]))


def _squarefree(d: int) -> bool:
    return all(e == 1 for _, e in factorize(d).pairs)


def measure_g2(
    lambda1: Real,
    X: int,
    rho: float,
    p_fixed: int,
    d_list: Sequence[int],
    lambda0: Real = 0,
    z: int = 2,
) -> list:
    """``#A~_d`` against ``(X xi / p) g2(d)`` for the two-dimensional set

    ``A~ = { n floor((a' n + b')/q) : z <= n <= X, p | floor(...), ||(a' n + b')/q|| < xi/2 }``.
    """
    if p_fixed < X ** (1.0 / 20.0) or factorize(p_fixed).big_omega != 1:
        raise DomainError(f"p_fixed must be a prime >= X^(1/20), got {p_fixed}", p_fixed)
    for d in d_list:
        if d < 1 or not (d == 1 or _squarefree(d)) or math.gcd(d, p_fixed) != 1:
            raise DomainError(f"d must be squarefree and coprime to p_fixed, got {d}", d)
    a, q = select_convergent(lambda1, X, rho)
    b = _b_prime(lambda0, q)
    xi = _xi(X, rho)
    kmax = _window_threshold(q, xi)
    n = np.arange(int(z), int(X) + 1, dtype=np.int64)
    num = b + a * n
    r = np.mod(num, q)
    m = num // q
    keep = (np.minimum(r, q - r) <= kmax) & (m % p_fixed == 0)
    prod = n[keep] * m[keep]
    base = float(X) * float(xi) / p_fixed
    rows = []
    for d in d_list:
        obs = int(np.count_nonzero(prod % d == 0))
        pred = base * g2(d)
        rows.append(DensityRow(int(d), obs, pred, obs / pred - 1.0))
    return rows

"""Trigonometric minorant/majorant of an interval and a smooth periodic window.

Both are 1-periodic real functions stored through their Fourier
coefficients; ``e(x) = exp(2 pi i x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.stats import irwinhall

from .errors import DomainError


@dataclass(frozen=True)
class TrigPolynomial:
    """``c0 + sum_{1 <= |n| <= N} c_n e(n t)`` with ``c_{-n} = conj(c_n)``.

    Only the positive frequencies are stored.
    """

    constant_term: float
    freqs: np.ndarray  # 1..N
    coeffs: np.ndarray  # complex c_n for n in freqs
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def degree(self) -> int:
        return int(self.freqs[-1]) if self.freqs.size else 0

    def coefficient(self, n: int) -> complex:
        if n == 0:
            return complex(self.constant_term)
        k = abs(n) - 1
        if k >= self.freqs.size:
            return 0j
        c = complex(self.coeffs[k])
        return c if n > 0 else c.conjugate()

    def evaluate(self, t, complex_output: bool = False):
        """Values at ``t``; ``complex_output`` sums both signs without symmetrising."""
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        out = np.empty(t.shape, dtype=np.complex128)
        step = max(1, 2**22 // max(1, self.freqs.size))
        for i in range(0, t.size, step):
            ph = np.exp(2j * np.pi * np.outer(t[i : i + step], self.freqs))
            pos = ph @ self.coeffs
            neg = ph.conj() @ self.coeffs.conj()
            out[i : i + step] = self.constant_term + pos + neg
        return out if complex_output else out.real

    def max_abs_coefficient(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def table(self) -> list:
        """Rows ``(n, Re c_n, Im c_n)`` for ``0 <= n <= N``."""
        rows = [(0, float(self.constant_term), 0.0)]
        rows += [(int(n), float(c.real), float(c.imag)) for n, c in zip(self.freqs, self.coeffs)]
        return rows


def _vaaler_phi(t: np.ndarray) -> np.ndarray:
    # pi t (1 - |t|) cot(pi t) + |t| for 0 < |t| < 1
    return np.pi * t * (1.0 - np.abs(t)) / np.tan(np.pi * t) + np.abs(t)


def selberg_pair(delta0: float, N: int) -> tuple:
    """Selberg minorant ``A`` and majorant ``B`` of the indicator of ``(-delta0, delta0)`` mod 1.

    Coefficients combine the Vaaler-weighted transform of the interval with
    a Fejer kernel at each endpoint; the constant terms are
    ``2 delta0 -+ 1/(N+1)``.
    """
    if not 0.0 < delta0 < 0.5:
        raise DomainError(f"delta0 must lie in (0, 1/2), got {delta0}", delta0)
    N = int(N)
    if N < 1:
        raise DomainError(f"N must be at least 1, got {N}", N)
    n = np.arange(1, N + 1, dtype=np.float64)
    M = N + 1.0
    smooth = _vaaler_phi(n / M) * np.sin(2.0 * np.pi * n * delta0) / (np.pi * n)
    fejer = (1.0 - n / M) * np.cos(2.0 * np.pi * n * delta0) / M
    freqs = np.arange(1, N + 1)
    A_c = (smooth - fejer).astype(np.complex128)
    B_c = (smooth + fejer).astype(np.complex128)
    K = max(np.max(np.abs(A_c)), np.max(np.abs(B_c))) / delta0
    meta = {"delta0": delta0, "N": N, "K": float(K)}
    A = TrigPolynomial(2.0 * delta0 - 1.0 / M, freqs, A_c, dict(meta, kind="minorant"))
    B = TrigPolynomial(2.0 * delta0 + 1.0 / M, freqs, B_c, dict(meta, kind="majorant"))
    return A, B


def interval_indicator(t, delta0: float) -> np.ndarray:
    """Indicator of ``(-delta0, delta0)`` mod 1."""
    x = np.mod(np.asarray(t, dtype=np.float64) + 0.5, 1.0) - 0.5
    return (np.abs(x) < delta0).astype(np.float64)


class SandwichCheck(NamedTuple):
    points: int
    lower_violations: int
    upper_violations: int
    min_gap_lower: float
    min_gap_upper: float

    @property
    def holds(self) -> bool:
        return self.lower_violations == 0 and self.upper_violations == 0


def check_sandwich(A: TrigPolynomial, B: TrigPolynomial, delta0: float, points: int = 10_000,
                   exclusion: float = 1e-6, tol: float = 1e-12) -> SandwichCheck:
    """``A <= chi <= B`` on a uniform grid minus ``exclusion``-neighbourhoods of the jumps."""
    t = (np.arange(points) + 0.5) / points
    x = np.mod(t + 0.5, 1.0) - 0.5
    t = t[np.abs(np.abs(x) - delta0) > exclusion]
    chi = interval_indicator(t, delta0)
    a, b = A.evaluate(t), B.evaluate(t)
    return SandwichCheck(
        int(t.size),
        int(np.count_nonzero(a > chi + tol)),
        int(np.count_nonzero(b < chi - tol)),
        float(np.min(chi - a)),
        float(np.min(b - chi)),
    )


@dataclass(frozen=True)
class SmoothWindow:
    """r-fold box smoothing of the indicator of ``[alpha + Delta/2, beta - Delta/2]``.

    Each box has width ``Delta/r``, so the support is ``[alpha, beta]`` and the
    plateau ``[alpha + Delta, beta - Delta]``.
    """

    alpha: float
    beta: float
    Delta: float
    r: int
    H: float  # Delta^(-1 - 1/r)
    tail: float  # sum_{|h| > H} |c_h|
    tail_constant: float  # tail / Delta

    @property
    def mean(self) -> float:
        return self.beta - self.alpha - self.Delta

    @property
    def _core(self):
        return self.alpha + 0.5 * self.Delta, self.beta - 0.5 * self.Delta

    def value(self, x) -> np.ndarray:
        """Exact values (Irwin-Hall distribution of the summed box offsets)."""
        x = np.mod(np.asarray(x, dtype=np.float64), 1.0)
        w = self.Delta / self.r
        a, b = self._core
        dist = irwinhall(self.r)
        # U = w (S - r/2) with S Irwin-Hall; g(x) = P(a <= x - U <= b)
        hi = dist.cdf((x - a) / w + 0.5 * self.r)
        lo = dist.cdf((x - b) / w + 0.5 * self.r)
        out = np.clip(hi - lo, 0.0, 1.0)
        # support and plateau are known exactly; keep cdf round-off out of them
        out[(x <= self.alpha) | (x >= self.beta)] = 0.0
        out[(x >= self.alpha + self.Delta) & (x <= self.beta - self.Delta)] = 1.0
        return out

    def coefficients(self, h) -> np.ndarray:
        """Closed-form ``c_h`` (interval transform times ``sinc(h Delta/r)^r``)."""
        h = np.asarray(h, dtype=np.float64)
        a, b = self._core
        L = b - a
        w = self.Delta / self.r
        with np.errstate(invalid="ignore", divide="ignore"):
            core = (np.exp(-2j * np.pi * h * a) - np.exp(-2j * np.pi * h * b)) / (2j * np.pi * h)
        core = np.where(h == 0, L + 0j, core)
        return core * np.sinc(h * w) ** self.r

    def trig_polynomial(self, N: int) -> TrigPolynomial:
        n = np.arange(1, int(N) + 1)
        return TrigPolynomial(self.mean, n, self.coefficients(n),
                              {"alpha": self.alpha, "beta": self.beta, "Delta": self.Delta, "r": self.r})

    def mean_square_series(self, terms: int = 2_000_000) -> float:
        """``sum_h |c_h|^2`` (truncated; the remainder is below 1e-12 for r >= 2)."""
        h = np.arange(1, terms + 1)
        return self.mean**2 + 2.0 * float(np.sum(np.abs(self.coefficients(h)) ** 2))

    def mean_square_grid(self, points: int = 1 << 18) -> float:
        """Periodic trapezoid rule for ``int_0^1 g^2``."""
        x = np.arange(points) / points
        return float(np.mean(self.value(x) ** 2))


def _tail_sum(win_coeffs, H: float, r: int, Delta: float, cutoff: int = 4_000_000) -> float:
    start = int(math.floor(H)) + 1
    h = np.arange(start, max(start, cutoff) + 1)
    s = 2.0 * float(np.sum(np.abs(win_coeffs(h))))
    # |c_h| <= (1/(pi h)) (r/(pi Delta h))^r beyond the cutoff
    M = max(start, cutoff)
    rem = 2.0 * (1.0 / math.pi) * (r / (math.pi * Delta)) ** r * M ** (-r) / r
    return s + rem


def smooth_window(alpha: float, beta: float, Delta: float, r: int = 2) -> SmoothWindow:
    """Build the window and measure its Fourier tail beyond ``H = Delta^(-1-1/r)``."""
    if not 0.0 <= alpha < beta <= 1.0:
        raise DomainError(f"need 0 <= alpha < beta <= 1, got {alpha}, {beta}", (alpha, beta))
    if not 0.0 < Delta or not 2.0 * Delta < beta - alpha:
        raise DomainError(f"need 0 < 2 Delta < beta - alpha, got Delta={Delta}", Delta)
    r = int(r)
    if r < 2:
        raise DomainError(f"order r must be at least 2, got {r}", r)
    H = Delta ** (-1.0 - 1.0 / r)
    proto = SmoothWindow(alpha, beta, Delta, r, H, float("nan"), float("nan"))
    tail = _tail_sum(proto.coefficients, H, r, Delta)
    return SmoothWindow(alpha, beta, Delta, r, H, tail, tail / Delta)

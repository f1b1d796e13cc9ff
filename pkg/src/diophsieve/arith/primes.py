"""Prime tables, factorisation and almost-prime classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import CapacityError, DomainError

SIEVE_CAP = 10**9
FACTOR_CAP = 10**15
_TRIAL_LIMIT = 100_001  # above the cube root of FACTOR_CAP
SEGMENT = 1 << 21
CONVENTIONS = ("multiplicity", "distinct")

# deterministic Miller-Rabin witnesses, valid below 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _simple_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def sieve_primes(limit: int) -> np.ndarray:
    """All primes ``<= limit`` in ascending order (segmented for large limits)."""
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"sieve_primes needs limit >= 2, got {limit}", limit)
    if limit > SIEVE_CAP:
        raise CapacityError(f"sieve limit {limit} exceeds the cap {SIEVE_CAP}")
    if limit <= SEGMENT:
        return _simple_sieve(limit)
    base = _simple_sieve(math.isqrt(limit))
    chunks = [base]
    lo = int(base[-1]) + 1
    while lo <= limit:
        hi = min(lo + SEGMENT, limit + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            seg[start - lo :: p] = False
        chunks.append(np.flatnonzero(seg).astype(np.int64) + lo)
        lo = hi
    return np.concatenate(chunks)


@lru_cache(maxsize=8)
def prime_table(limit: int) -> np.ndarray:
    """Cached read-only copy of :func:`sieve_primes`."""
    out = sieve_primes(limit)
    out.setflags(write=False)
    return out


def primality_table(limit: int) -> np.ndarray:
    """Boolean array ``t`` with ``t[n]`` true iff ``n`` is prime, ``0 <= n <= limit``."""
    t = np.zeros(int(limit) + 1, dtype=bool)
    if limit >= 2:
        t[prime_table(int(limit))] = True
    return t


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with a fixed base set; deterministic for ``n < 3.3e24``."""
    n = int(n)
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    # nontrivial factor of an odd composite n that is not a prime power
    for c in range(1, 64):
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        m = 128
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    raise ArithmeticError(f"Pollard rho failed to split {n}")


@dataclass(frozen=True)
class Factorization:
    n: int
    pairs: tuple  # ((prime, exponent), ...) ascending
    omega: int
    big_omega: int
    largest_prime: int

    def product(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p**e
        return out


def factorize(n: int) -> Factorization:
    """Complete factorisation for ``1 <= n <= 1e15``.

    Trial division runs to ``n^(1/3)``; the cofactor then has at most two
    prime factors and is settled by Miller-Rabin, a square test and Pollard rho.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"factorize needs n >= 1, got {n}", n)
    if n > FACTOR_CAP:
        raise CapacityError(f"factorize supports n <= {FACTOR_CAP}, got {n}")
    pairs = []
    m = n
    cube = int(round(n ** (1.0 / 3.0))) + 1
    if n > 1:
        small = prime_table(_TRIAL_LIMIT)
        small = small[small <= cube]
        # one vectorised pass finds every prime divisor up to the cube root
        for p in small[np.int64(n) % small == 0]:
            p = int(p)
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            pairs.append((p, e))
    if m > 1:
        if is_probable_prime(m):
            pairs.append((m, 1))
        else:
            s = math.isqrt(m)
            if s * s == m:
                pairs.append((s, 2))
            else:
                f = _pollard_brent(m)
                pairs.extend(sorted([(f, 1), (m // f, 1)]))
    pairs.sort()
    return Factorization(
        n=n,
        pairs=tuple(pairs),
        omega=len(pairs),
        big_omega=sum(e for _, e in pairs),
        largest_prime=pairs[-1][0] if pairs else 1,
    )


def is_almost_prime(n: int, r: int, convention: str = "multiplicity") -> bool:
    """True iff ``n`` has at most ``r`` prime factors under ``convention``."""
    if convention not in CONVENTIONS:
        raise DomainError(f"unknown convention {convention!r}", convention)
    if n < 2:
        raise DomainError(f"is_almost_prime needs n >= 2, got {n}", n)
    f = factorize(n)
    return (f.big_omega if convention == "multiplicity" else f.omega) <= r


def factor_counts(values, convention: str = "multiplicity") -> np.ndarray:
    """Vectorised prime-factor counts of positive integers (each below 1e12)."""
    if convention not in CONVENTIONS:
        raise DomainError(f"unknown convention {convention!r}", convention)
    rem = np.array(values, dtype=np.int64)
    if rem.size == 0:
        return np.zeros(0, dtype=np.int64)
    if rem.min() < 1:
        raise DomainError("factor_counts needs positive integers")
    top = int(rem.max())
    if top >= 10**12:
        raise CapacityError("factor_counts is limited to values below 1e12")
    counts = np.zeros(rem.shape, dtype=np.int64)
    root = math.isqrt(top)
    if root >= 2:
        for p in prime_table(root):
            p = int(p)
            if p * p > top:
                break
            hit = rem % p == 0
            if not hit.any():
                continue
            if convention == "distinct":
                counts += hit
            while hit.any():
                if convention == "multiplicity":
                    counts += hit
                rem[hit] //= p
                hit = hit & (rem % p == 0)
            top = int(rem.max())
    counts += rem > 1
    return counts


def big_omega_range(lo: int, hi: int) -> np.ndarray:
    """``Omega(n)`` for ``lo <= n < hi`` by a segmented sieve over prime powers."""
    lo, hi = int(lo), int(hi)
    if lo < 1 or hi <= lo:
        raise DomainError(f"need 1 <= lo < hi, got [{lo}, {hi})", (lo, hi))
    if hi - 1 > SIEVE_CAP:
        raise CapacityError(f"range end {hi} exceeds the cap {SIEVE_CAP}")
    rem = np.arange(lo, hi, dtype=np.int64)
    counts = np.zeros(hi - lo, dtype=np.int64)
    root = math.isqrt(hi - 1)
    if root >= 2:
        for p in prime_table(root):
            p = int(p)
            pk = p
            while pk < hi:
                start = -(-lo // pk) * pk
                if start < hi:
                    sl = slice(start - lo, None, pk)
                    counts[sl] += 1
                    rem[sl] //= p
                pk *= p
    counts += rem > 1
    return counts

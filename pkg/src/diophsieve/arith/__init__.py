"""Integer arithmetic: primes, factorisation, continued fractions, PS primes."""

from .checks import dimension_check, g2, mertens_checks
from .contfrac import ContinuedFraction, continued_fraction
from .primes import (
    Factorization,
    big_omega_range,
    factor_counts,
    factorize,
    is_almost_prime,
    is_probable_prime,
    prime_table,
    primality_table,
    sieve_primes,
)
from .psprimes import (
    floor_pow,
    gamma_of,
    li_offset,
    pi_c,
    pi_c_ratio,
    ps_indicator,
    ps_indicator_array,
    ps_set_bruteforce,
)

__all__ = [
    "ContinuedFraction",
    "continued_fraction",
    "Factorization",
    "big_omega_range",
    "factor_counts",
    "factorize",
    "is_almost_prime",
    "is_probable_prime",
    "prime_table",
    "primality_table",
    "sieve_primes",
    "floor_pow",
    "gamma_of",
    "li_offset",
    "pi_c",
    "pi_c_ratio",
    "ps_indicator",
    "ps_indicator_array",
    "ps_set_bruteforce",
    "mertens_checks",
    "dimension_check",
    "g2",
]

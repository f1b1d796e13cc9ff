"""The sieve parameter vector and its derivation from (rho, vartheta, b, c)."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import DomainError
from .limits import DEFAULT_CONSTANTS, SieveConstants

# theta1 = 1/3 - rho - THETA1_SLACK
THETA1_SLACK = 1e-12


@dataclass(frozen=True)
class SieveParams:
    rho: float
    theta1: float
    theta2: float
    theta: float
    vartheta: float
    a: float
    b: float
    c: float
    u: float
    delta0: float
    lambda_max_inv: float
    eta: float = 1e-12
    epsilon: float = 1e-12

    @property
    def delta0_rescaled(self) -> float:
        """``delta0`` in the units of the objective's integration variable."""
        return self.delta0 / self.theta1

    def to_dict(self) -> dict:
        d = asdict(self)
        d["delta0_rescaled"] = self.delta0_rescaled
        return d


def delta0_formula(theta1: float, theta2: float, A3: float) -> float:
    """Crossover between the 1- and 2-dimensional upper bounds (raw exponent units)."""
    disc = A3 * A3 - 4.0 * A3 * (theta2 - theta1)
    if disc < 0:
        raise DomainError(f"delta0 square-root argument is negative ({disc})", disc)
    return theta2 - 0.5 * (A3 - math.sqrt(disc))


def derive_params(
    rho: float,
    vartheta: float,
    b: float,
    c: float,
    consts: SieveConstants = DEFAULT_CONSTANTS,
) -> SieveParams:
    if not rho > 0:
        raise DomainError(f"rho must be positive, got {rho}", rho)
    if not vartheta > 0:
        raise DomainError(f"vartheta must be positive, got {vartheta}", vartheta)
    if not (1.0 <= b <= c):
        raise DomainError(f"need 1 <= b <= c, got b={b}, c={c}", (b, c))
    theta1 = 1.0 / 3.0 - rho - THETA1_SLACK
    if theta1 <= 0:
        raise DomainError(f"theta1 = 1/3 - rho - 1e-12 = {theta1} <= 0", rho)
    theta2 = 2.0 / 3.0 - rho
    a = vartheta / theta1
    return SieveParams(
        rho=rho,
        theta1=theta1,
        theta2=theta2,
        theta=theta2 / theta1,
        vartheta=vartheta,
        a=a,
        b=b,
        c=c,
        u=a / c,
        delta0=delta0_formula(theta1, theta2, consts.A3),
        lambda_max_inv=5.0 * c - a,
    )

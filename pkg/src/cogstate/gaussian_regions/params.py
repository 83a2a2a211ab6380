"""Parameter types for the Gaussian channel

    Y = X1 + a X2 + S + N1,    Z = b X1 + X2 + c S + N2,

with E[X1^2] <= P1, E[X2^2] <= P2, S ~ N(0, Q) and unit-variance noises.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from ..errors import InvalidSplit, ValidationError

SPLIT_TOL = 1e-9


class CaseTag(str, Enum):
    ABOVE_ONE = "AboveOne"
    AT_MOST_ONE = "AtMostOne"


@dataclass(frozen=True)
class GaussianChannelParams:
    p1: float
    p2: float
    q: float
    a: float
    b: float
    c: float

    def __post_init__(self):
        vals = (self.p1, self.p2, self.q, self.a, self.b, self.c)
        if not all(math.isfinite(float(v)) for v in vals):
            raise ValidationError(f"non-finite channel parameter in {vals}")
        if self.p1 < 0 or self.p2 < 0 or self.q < 0:
            raise ValidationError("powers and state variance must be nonnegative")

    @classmethod
    def parse(cls, text: str) -> "GaussianChannelParams":
        """Parse ``"p1,p2,q,a,b,c"``."""
        parts = [p for p in text.replace(" ", "").split(",") if p]
        if len(parts) != 6:
            raise ValidationError(f"--params needs 6 comma-separated values, got {text!r}")
        try:
            return cls(*(float(p) for p in parts))
        except ValueError as exc:
            raise ValidationError(f"bad --params value: {exc}") from None

    def as_tuple(self) -> tuple[float, ...]:
        return (self.p1, self.p2, self.q, self.a, self.b, self.c)


@dataclass(frozen=True)
class SplitParams:
    rho21: float
    rho2s: float
    p2_prime: float
    p2_dprime: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.rho21, self.rho2s, self.p2_prime, self.p2_dprime)):
            raise InvalidSplit("non-finite split parameter")
        if abs(self.rho21) > 1 or abs(self.rho2s) > 1:
            raise InvalidSplit("correlations must lie in [-1, 1]")
        if self.rho21 ** 2 + self.rho2s ** 2 > 1 + 1e-12:
            raise InvalidSplit("rho21^2 + rho2s^2 must not exceed 1")
        if self.p2_prime < 0 or self.p2_dprime < 0:
            raise InvalidSplit("power shares must be nonnegative")

    def private_power(self, params: GaussianChannelParams) -> float:
        """(1 - rho21^2 - rho2s^2) P2, the power left after the correlated parts."""
        return max(0.0, 1.0 - self.rho21 ** 2 - self.rho2s ** 2) * params.p2


@dataclass(frozen=True)
class RatePair:
    r1: float
    r2: float


def classify_case(params: GaussianChannelParams) -> CaseTag:
    # a = +-1 belongs to the |a| <= 1 class
    return CaseTag.ABOVE_ONE if abs(params.a) > 1 else CaseTag.AT_MOST_ONE


def _tol(scale: float) -> float:
    return SPLIT_TOL * max(1.0, scale)


def check_split(params: GaussianChannelParams, sp: SplitParams, mode: str) -> None:
    """Validate ``sp`` against ``params``.

    ``mode`` is ``"equality"`` (P2' + P2'' equals the private power),
    ``"prime"`` (P2' <= private power, P2'' unused) or ``"dprime"``
    (P2'' <= private power, P2' unused).
    """
    full = sp.private_power(params)
    if params.q == 0 and sp.rho2s != 0:
        raise InvalidSplit("rho2s must be 0 when the state variance is 0")
    if params.p1 == 0 and sp.rho21 != 0:
        raise InvalidSplit("rho21 must be 0 when P1 = 0")
    if mode == "equality":
        if abs(sp.p2_prime + sp.p2_dprime - full) > _tol(params.p2):
            raise InvalidSplit(
                f"P2'+P2'' = {sp.p2_prime + sp.p2_dprime!r} differs from (1-rho^2)P2 = {full!r}")
    elif mode == "prime":
        if sp.p2_prime > full + _tol(params.p2):
            raise InvalidSplit(f"P2' = {sp.p2_prime!r} exceeds (1-rho^2)P2 = {full!r}")
    elif mode == "dprime":
        if sp.p2_dprime > full + _tol(params.p2):
            raise InvalidSplit(f"P2'' = {sp.p2_dprime!r} exceeds (1-rho^2)P2 = {full!r}")
    else:
        raise ValueError(f"unknown split mode {mode!r}")


def equality_split(params: GaussianChannelParams, rho21: float, rho2s: float,
                   p2_dprime: float = 0.0) -> SplitParams:
    """Split with P2'' given and P2' taking the rest of the private power."""
    full = max(0.0, 1.0 - rho21 ** 2 - rho2s ** 2) * params.p2
    return SplitParams(rho21, rho2s, max(0.0, full - p2_dprime), p2_dprime)

"""Closed-form right-hand sides of the Gaussian bounds, in bits.

The ``*_arrays`` functions are vectorized over numpy arrays of split
parameters and are what the frontier sweeps call; the public ``*_rates``
functions wrap them for a single :class:`SplitParams` and validate inputs.

Three dirty-paper fractions appear repeatedly.  For an auxiliary
U = X + k S~ (S~ the unit-variance state, Var X = P) seen at a receiver as
g X + m S~ + noise of variance N, the Gel'fand-Pinsker rate is

    1/2 log(1 + (g^2 P^2 - k^2 g^2 P - k^2 N + 2 g k m P)
                / (P m^2 + P N + k^2 g^2 P + k^2 N - 2 g k m P))

and the fractions below are this expression at the scheme's (g, k, m, N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..errors import CaseMismatch, InvalidSplit
from .params import CaseTag, GaussianChannelParams, SplitParams, check_split, classify_case

LN2 = math.log(2.0)


def _cap(snr):
    """1/2 log2(1 + snr), elementwise."""
    return 0.5 * np.log1p(snr) / LN2


def _frac_cap(num, den):
    # the fractions are 0/0 exactly when the auxiliary carries no power
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    ok = den > 0
    safe = np.where(ok, den, 1.0)
    return np.where(ok, _cap(num / safe), 0.0)


def _arr(*xs):
    return [np.asarray(x, dtype=float) for x in xs]


def full_private(p: GaussianChannelParams, r21, r2s):
    r21, r2s = _arr(r21, r2s)
    return np.maximum(0.0, 1.0 - r21 ** 2 - r2s ** 2) * p.p2


def rx1_common(p: GaussianChannelParams, r21, r2s):
    """I(X1;Y): X1 plus its coherent copy inside X2 against everything else."""
    r21, r2s = _arr(r21, r2s)
    sig = p.p1 + 2 * p.a * r21 * math.sqrt(p.p1 * p.p2) + p.a ** 2 * r21 ** 2 * p.p2
    den = p.a ** 2 * (1 - r21 ** 2) * p.p2 + 2 * p.a * r2s * math.sqrt(p.p2 * p.q) + p.q + 1
    return _cap(sig / den)


def rx2_common(p: GaussianChannelParams, r21, r2s):
    """I(X1;Z)."""
    r21, r2s = _arr(r21, r2s)
    sig = p.b ** 2 * p.p1 + 2 * p.b * r21 * math.sqrt(p.p1 * p.p2) + r21 ** 2 * p.p2
    den = (1 - r21 ** 2) * p.p2 + 2 * p.c * r2s * math.sqrt(p.p2 * p.q) + p.c ** 2 * p.q + 1
    return _cap(sig / den)


def known_state_sum(p: GaussianChannelParams, r21, r2s):
    """I(X1,X2;Z|S) = 1/2 log2(1 + b^2 P1 + 2 b rho21 sqrt(P1 P2) + (1 - rho2s^2) P2)."""
    r21, r2s = _arr(r21, r2s)
    return _cap(p.b ** 2 * p.p1 + 2 * p.b * r21 * math.sqrt(p.p1 * p.p2) + (1 - r2s ** 2) * p.p2)


# ---------------------------------------------------------------------------
# vectorized bounds

def inner2_arrays(p: GaussianChannelParams, r21, r2s, p2p, p2pp=0.0):
    """Prop. 1 (|a| > 1).  ``p2p`` enters only the relaxed R2 bound."""
    r21, r2s, p2p = _arr(r21, r2s, p2p)
    P = full_private(p, r21, r2s)
    alpha = P / (P + 1.0)
    k = alpha * (p.c * math.sqrt(p.q) + r2s * math.sqrt(p.p2))
    m = math.sqrt(p.q) + p.a * r2s * math.sqrt(p.p2)
    a = p.a
    num = a ** 2 * P ** 2 + 2 * a * k * m * P - a ** 2 * k ** 2 * P - k ** 2
    den = a ** 2 * k ** 2 * P + m ** 2 * P + P + k ** 2 - 2 * a * k * m * P
    return {
        "r2": _cap(p2p),
        "r12_z": rx2_common(p, r21, r2s) + _cap(P),
        "r12_y": rx1_common(p, r21, r2s) + _frac_cap(num, den),
    }


def outer2_arrays(p: GaussianChannelParams, r21, r2s, p2p, p2pp=0.0):
    """Prop. 2: the MAC-with-state outer bound at receiver 2."""
    r21, r2s, p2p = _arr(r21, r2s, p2p)
    return {"r2": _cap(p2p),
            "r12": rx2_common(p, r21, r2s) + _cap(full_private(p, r21, r2s))}


def _y_dpc_first(p: GaussianChannelParams, r21, r2s, p2p, p2pp):
    # I(X1;Y) + rate of the Y-targeted layer: 1/2 log(1 + a^2 P2'/(a^2 P2'' + 1))
    return rx1_common(p, r21, r2s) + _cap(p.a ** 2 * p2p / (p.a ** 2 * p2pp + 1.0))


def inner1a_arrays(p: GaussianChannelParams, r21, r2s, p2p, p2pp):
    """Prop. 3 (|a| <= 1): T dirty-paper coded against the state at Y.

    The T-layer state coefficient is (alpha/a)(sqrt(Q) + a rho2s sqrt(P2)) with
    alpha/a = a P2'/(a^2 (P2' + P2'') + 1); see the module notes.
    """
    r21, r2s, p2p, p2pp = _arr(r21, r2s, p2p, p2pp)
    k = p.a * p2p / (p.a ** 2 * (p2p + p2pp) + 1.0) * (math.sqrt(p.q) + p.a * r2s * math.sqrt(p.p2))
    m = p.c * math.sqrt(p.q) + r2s * math.sqrt(p.p2)
    n = p2p + p2pp + 1.0
    num = p2p ** 2 + 2 * k * m * p2p - k ** 2 * n
    den = p2p * p2pp + p2p * m ** 2 + p2p + k ** 2 * n - 2 * k * m * p2p
    r2b = _frac_cap(num, den) + _cap(p2pp)
    return {
        "r1": _y_dpc_first(p, r21, r2s, p2p, p2pp),
        "r2a": _cap(p2pp),
        "r2b": r2b,
        "r12": rx2_common(p, r21, r2s) + r2b,
    }


def inner1b_arrays(p: GaussianChannelParams, r21, r2s, p2p, p2pp):
    """Prop. 4 (|a| <= 1): T dirty-paper coded against the state at Z."""
    r21, r2s, p2p, p2pp = _arr(r21, r2s, p2p, p2pp)
    alpha = p2p / (p2p + p2pp + 1.0)
    k = alpha * (p.c * math.sqrt(p.q) + r2s * math.sqrt(p.p2))
    m = math.sqrt(p.q) + p.a * r2s * math.sqrt(p.p2)
    a = p.a
    num = a ** 2 * p2p ** 2 + 2 * a * k * m * p2p - a ** 2 * k ** 2 * (p2p + p2pp) - k ** 2
    den = (a ** 2 * k ** 2 * p2p + m ** 2 * p2p + a ** 2 * k ** 2 * p2pp
           + a ** 2 * p2p * p2pp + p2p + k ** 2 - 2 * a * k * m * p2p)
    return {
        "r1": rx1_common(p, r21, r2s) + _frac_cap(num, den),
        "r2": _cap(p2pp),
        "r12": rx2_common(p, r21, r2s) + _cap(full_private(p, r21, r2s)),
    }


def outer1a_arrays(p: GaussianChannelParams, r21, r2s, p2p, p2pp):
    """Cor. 3, which is also the Thm. 14 region."""
    r21, r2s, p2p, p2pp = _arr(r21, r2s, p2p, p2pp)
    return {"r1": _y_dpc_first(p, r21, r2s, p2p, p2pp),
            "r2": _cap(p2pp),
            "r12": known_state_sum(p, r21, r2s)}


def outer1b_arrays(p: GaussianChannelParams, r21, r2s, p2p, p2pp):
    """Cor. 4; the power argument is P2'' (inequality mode)."""
    r21, r2s, p2pp = _arr(r21, r2s, p2pp)
    return {"r2": _cap(p2pp),
            "r12": rx2_common(p, r21, r2s) + _cap(full_private(p, r21, r2s))}


def thm15_arrays(p: GaussianChannelParams, r21, r2s, p2p=None, p2pp=None):
    """Thm. 15 (state also at receiver 2, |a| > 1)."""
    r21, r2s = _arr(r21, r2s)
    P = full_private(p, r21, r2s)
    return {"r2": _cap(P),
            "r12a": known_state_sum(p, r21, r2s),
            "r12b": rx1_common(p, r21, r2s) + _cap(p.a ** 2 * P)}


def thm7_arrays(p: GaussianChannelParams, r21, r2s, p2p=None, p2pp=None):
    """Thm. 7: Prop. 2 with all private power on the single layer."""
    r21, r2s = _arr(r21, r2s)
    P = full_private(p, r21, r2s)
    return {"r2": _cap(P), "r12": rx2_common(p, r21, r2s) + _cap(P)}


def thm10_arrays(p: GaussianChannelParams, r21, r2s, p2p, p2pp):
    """Thm. 10: the first two bounds of Cor. 3."""
    v = outer1a_arrays(p, r21, r2s, p2p, p2pp)
    return {"r1": v["r1"], "r2": v["r2"]}


def thm12_arrays(p: GaussianChannelParams, r21, r2s, p2p, p2pp):
    """Thm. 12: T decoded at receiver 1 through Z-style dirty paper."""
    r21, r2s, p2p, p2pp = _arr(r21, r2s, p2p, p2pp)
    return {"r1": rx2_common(p, r21, r2s) + _cap(p2p / (p2pp + 1.0)),
            "r2": _cap(p2pp)}


# ---------------------------------------------------------------------------
# public single-point API

@dataclass(frozen=True)
class DpcAux:
    alpha: float
    beta: float = 0.0
    rho2s1: float = 0.0
    rho2s2: float = 0.0


@dataclass(frozen=True)
class BoundEval:
    """Named right-hand sides (bits) of one bound at one split."""

    values: Mapping[str, float]
    dpc: DpcAux | None = None
    meta: Mapping[str, str] = field(default_factory=dict)

    def __getitem__(self, key: str) -> float:
        return self.values[key]

    def __getattr__(self, key: str) -> float:
        vals = object.__getattribute__(self, "values")
        if key in vals:
            return vals[key]
        raise AttributeError(key)

    def as_dict(self) -> dict[str, float]:
        return dict(self.values)


def _scalars(d: dict) -> dict[str, float]:
    return {k: float(v) for k, v in d.items()}


def _require(p: GaussianChannelParams, tag: CaseTag, strict: bool, what: str):
    if strict and classify_case(p) is not tag:
        want = "|a| > 1" if tag is CaseTag.ABOVE_ONE else "|a| <= 1"
        raise CaseMismatch(f"{what} requires {want}; got a = {p.a!r}")


def inner2_rates(p: GaussianChannelParams, sp: SplitParams, strict: bool = True) -> BoundEval:
    """Prop. 1 in relaxed form: R2 uses ``sp.p2_prime``, sum bounds the full private power."""
    _require(p, CaseTag.ABOVE_ONE, strict, "inner2_rates")
    check_split(p, sp, "prime")
    if sp.p2_dprime != 0:
        raise InvalidSplit("inner2 has a single private layer; p2_dprime must be 0")
    full = sp.private_power(p)
    alpha = full / (full + 1.0)
    dpc = DpcAux(alpha, 0.0, alpha * (p.c * math.sqrt(p.q) + sp.rho2s * math.sqrt(p.p2)),
                 math.sqrt(p.q) + p.a * sp.rho2s * math.sqrt(p.p2))
    return BoundEval(_scalars(inner2_arrays(p, sp.rho21, sp.rho2s, sp.p2_prime)), dpc)


def outer2_rates(p: GaussianChannelParams, sp: SplitParams) -> BoundEval:
    check_split(p, sp, "prime")
    return BoundEval(_scalars(outer2_arrays(p, sp.rho21, sp.rho2s, sp.p2_prime)))


def inner1a_rates(p: GaussianChannelParams, sp: SplitParams, strict: bool = True) -> BoundEval:
    _require(p, CaseTag.AT_MOST_ONE, strict, "inner1a_rates")
    check_split(p, sp, "equality")
    pp, ppp = sp.p2_prime, sp.p2_dprime
    alpha_a = p.a * pp / (p.a ** 2 * (pp + ppp) + 1.0)       # alpha / a, finite at a = 0
    dpc = DpcAux(p.a * alpha_a, ppp / (ppp + 1.0),
                 alpha_a * (math.sqrt(p.q) + p.a * sp.rho2s * math.sqrt(p.p2)),
                 p.c * math.sqrt(p.q) + sp.rho2s * math.sqrt(p.p2))
    return BoundEval(_scalars(inner1a_arrays(p, sp.rho21, sp.rho2s, pp, ppp)), dpc)


def inner1b_rates(p: GaussianChannelParams, sp: SplitParams, strict: bool = True) -> BoundEval:
    _require(p, CaseTag.AT_MOST_ONE, strict, "inner1b_rates")
    check_split(p, sp, "equality")
    pp, ppp = sp.p2_prime, sp.p2_dprime
    alpha = pp / (pp + ppp + 1.0)
    dpc = DpcAux(alpha, ppp / (ppp + 1.0),
                 alpha * (p.c * math.sqrt(p.q) + sp.rho2s * math.sqrt(p.p2)),
                 math.sqrt(p.q) + p.a * sp.rho2s * math.sqrt(p.p2))
    return BoundEval(_scalars(inner1b_arrays(p, sp.rho21, sp.rho2s, pp, ppp)), dpc)


def outer1a_rates(p: GaussianChannelParams, sp: SplitParams, strict: bool = True) -> BoundEval:
    _require(p, CaseTag.AT_MOST_ONE, strict, "outer1a_rates")
    check_split(p, sp, "equality")
    return BoundEval(_scalars(outer1a_arrays(p, sp.rho21, sp.rho2s, sp.p2_prime, sp.p2_dprime)))


def outer1b_rates(p: GaussianChannelParams, sp: SplitParams) -> BoundEval:
    check_split(p, sp, "dprime")
    return BoundEval(_scalars(outer1b_arrays(p, sp.rho21, sp.rho2s, sp.p2_prime, sp.p2_dprime)))


def cap_both_rx_case2(p: GaussianChannelParams, sp: SplitParams, strict: bool = True) -> BoundEval:
    """Thm. 15; only the correlations of ``sp`` are used."""
    _require(p, CaseTag.ABOVE_ONE, strict, "cap_both_rx_case2")
    check_split(p, sp, "prime")
    return BoundEval(_scalars(thm15_arrays(p, sp.rho21, sp.rho2s)))


def thm12_rates(p: GaussianChannelParams, sp: SplitParams) -> BoundEval:
    check_split(p, sp, "equality")
    return BoundEval(_scalars(thm12_arrays(p, sp.rho21, sp.rho2s, sp.p2_prime, sp.p2_dprime)))

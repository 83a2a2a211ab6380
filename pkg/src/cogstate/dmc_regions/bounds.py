"""Rate bounds of the discrete memoryless channel evaluated on explicit joints.

Each bound set is a table ``label -> (coefficients over the rate variables,
information expression)``.  The same tables feed the symbolic Fourier-Motzkin
module, so the numeric and symbolic paths cannot drift apart.

Auxiliary axes missing from a joint are treated as constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..errors import BadFactorization, MarkovViolation, MissingAssertion, NotDegraded, NotSemidet
from ..infoexpr import Atom, Expr, parse_expr
from .channel import DiscreteChannelSpec
from .joint import AUX_ROLES, JointDistribution, check_factorization, markov_residual
from .polygon import RatePolygon, polygon_from_rows

MARKOV_TOL = 1e-10

R1, R2, R12 = (1, 0), (0, 1), (1, 1)


def _table(rows: Mapping[str, tuple[tuple[int, ...], str]]) -> dict[str, tuple[tuple[int, ...], Expr]]:
    return {k: (c, parse_expr(e)) for k, (c, e) in rows.items()}


LEMMA1 = _table({
    "r1_r21": ((1, 1, 0), "I(T,U,X1;Y) - I(T,U;S|X1)"),
    "r22": ((0, 0, 1), "I(V;Z|T,U,X1) - I(V;S|T,U,X1)"),
    "r21_r22_a": ((0, 1, 1), "I(U,V;Z|T,X1) - I(U,V;S|T,X1)"),
    "r21_r22_b": ((0, 1, 1), "I(T,U,V;Z|X1) - I(T,U,V;S|X1)"),
    "r1_r21_r22": ((1, 1, 1), "I(T,U,V,X1;Z) - I(T,U,V;S|X1)"),
})
LEMMA1_VARS = ("R1", "R21", "R22")

THM1 = _table({
    "r1": (R1, "I(X1,T,U;Y) - I(T,U;S|X1)"),
    "r2_a": (R2, "I(U,V;Z|X1,T) - I(U,V;S|X1,T)"),
    "r2_b": (R2, "I(T,U,V;Z|X1) - I(T,U,V;S|X1)"),
    "r12_a": (R12, "I(X1,T,U,V;Z) - I(T,U,V;S|X1)"),
    "r12_b": (R12, "I(X1,T,U;Y) + I(V;Z|X1,T,U) - I(T,U,V;S|X1)"),
})
THM1_VALIDITY = parse_expr("I(V;Z|T,U,X1) - I(V;S|T,U,X1)")

COR1 = _table({
    "r1": (R1, "I(X1,T;Y) - I(T;S|X1)"),
    "r2_a": (R2, "I(V;Z|X1,T) - I(V;S|X1,T)"),
    "r2_b": (R2, "I(T,V;Z|X1) - I(T,V;S|X1)"),
    "r12": (R12, "I(X1,T,V;Z) - I(T,V;S|X1)"),
})
COR1_VALIDITY = parse_expr("I(V;Z|T,X1) - I(V;S|T,X1)")

THM2 = _table({
    "r1": (R1, "I(X1,T,U;Y) - I(T,U;S|X1)"),
    "r2": (R2, "I(T,V;Z|X1) - I(T,V;S|X1)"),
    "r12": (R12, "I(X1,T,V;Z) - I(T,V;S|X1)"),
})

THM3_INNER = _table({
    "r1": (R1, "I(X1,T;Y) - I(T;S|X1)"),
    "r2_a": (R2, "I(V;Z|X1,T) - I(V;S|X1,T)"),
    "r2_b": (R2, "I(T,V;Z|X1) - I(T,V;S|X1)"),
})
THM3_OUTER = _table({
    "r1": (R1, "I(X1,T;Y) - I(T;S|X1)"),
    "r2": (R2, "I(T,V;Z|X1) - I(T,V;S|X1)"),
})

THM4 = _table({
    "r1": (R1, "I(X1,T;Y) - I(T;S|X1)"),
    "r2_a": (R2, "H(Z|X1,T,S)"),
    "r2_b": (R2, "H(Z|X1) - I(T,Z;S|X1)"),
})

THM5 = _table({
    "r2": (R2, "I(U;Z|X1) - I(U;S|X1)"),
    "r12": (R12, "I(X1,U;Z) - I(U;S|X1)"),
})

THM13 = _table({
    "r1": (R1, "I(X1,U;Y) - I(U;S|X1)"),
    "r2": (R2, "I(X2;Z|S,X1)"),
    "r12_a": (R12, "I(X1,X2;Z|S)"),
    "r12_b": (R12, "I(X1,U;Y) + I(X2;Z|X1,U,S) - I(U;S|X1)"),
})

OUTER_BOTH = _table({
    "r1": (R1, "I(K,X1;Y) - I(K;S|X1)"),
    "r2": (R2, "I(X2;Z|S,X1)"),
    "r12_a": (R12, "I(X1,X2;Z|S)"),
    "r12_b": (R12, "I(T,K,X1;Y) - I(T,K;S|X1) + I(X2;Z|X1,T,K,S)"),
})


# ---------------------------------------------------------------------------

@dataclass
class RegionIneqs:
    """Bound values keyed by label; ``rows[label] = (coefficients, value)``.

    Values are floats for a single joint or arrays over a batch.
    """

    variables: tuple[str, ...]
    rows: dict[str, tuple[tuple[int, ...], object]]
    flags: dict[str, object] = field(default_factory=dict)
    bound_id: str = ""

    def values(self) -> dict[str, object]:
        return {k: v for k, (_, v) in self.rows.items()}

    def __getitem__(self, label: str):
        return self.rows[label][1]

    def polygon(self) -> RatePolygon:
        if self.variables != ("R1", "R2"):
            raise ValueError("only (R1, R2) bound sets form a rate polygon")
        return polygon_from_rows({k: ((c[0], c[1]), float(v)) for k, (c, v) in self.rows.items()})

    def caps(self):
        """(A, B, C): tightest R1, R2 and R1+R2 bounds (inf where absent)."""
        out = []
        for want in (R1, R2, R12):
            vals = [v for c, v in self.rows.values() if tuple(c) == want]
            out.append(np.minimum.reduce([np.asarray(v, dtype=float) for v in vals]) if vals else np.inf)
        return tuple(out)

    def to_dict(self) -> dict:
        return {"bound_id": self.bound_id, "variables": list(self.variables),
                "rows": {k: {"coefficients": list(c), "value": float(v)} for k, (c, v) in self.rows.items()},
                "flags": {k: bool(v) for k, v in self.flags.items()}}


def _atom_value(joint: JointDistribution, atom: Atom):
    if atom.kind == "H":
        return joint.cond_entropy(atom.a, atom.c)
    return joint.mutual_info(atom.a, atom.b, atom.c)


def eval_expr(joint: JointDistribution, expr: Expr):
    total = 0.0
    for coef, atom in expr:
        total = total + float(coef) * _atom_value(joint, atom)
    return total


def _with_aux(joint: JointDistribution, needed: tuple[str, ...]) -> JointDistribution:
    """Add size-one axes for auxiliaries the joint does not carry."""
    missing = [a for a in needed if a not in joint.axes]
    if not missing:
        return joint
    p = joint.p.reshape(joint.p.shape + (1,) * len(missing))
    return JointDistribution(joint.axes + tuple(missing), p, joint.batch_ndim)


def _forbid(joint: JointDistribution, names: tuple[str, ...], bound: str):
    for n in names:
        if n in joint.axes and joint.sizes[n] > 1:
            raise BadFactorization(f"{bound} takes no {n} axis (found size {joint.sizes[n]})")


def _prepare(joint: JointDistribution, needed: tuple[str, ...], check: bool,
             channel: DiscreteChannelSpec | None = None) -> JointDistribution:
    if check and not joint.batch_ndim:
        check_factorization(joint, channel)
    return _with_aux(joint, needed)


def _evaluate(joint: JointDistribution, table, variables, bound_id: str) -> RegionIneqs:
    rows = {k: (c, eval_expr(joint, e)) for k, (c, e) in table.items()}
    return RegionIneqs(tuple(variables), rows, {}, bound_id)


def _flag(value):
    return value >= -1e-12


# ---------------------------------------------------------------------------
# public evaluators

def eval_lemma1(joint: JointDistribution, check: bool = True) -> RegionIneqs:
    """Five bounds on (R1, R21, R22); R21, R22 >= 0 are implicit."""
    j = _prepare(joint, ("T", "U", "V"), check)
    return _evaluate(j, LEMMA1, LEMMA1_VARS, "lemma1")


def eval_thm1_inner(joint: JointDistribution, check: bool = True) -> RegionIneqs:
    j = _prepare(joint, ("T", "U", "V"), check)
    r = _evaluate(j, THM1, ("R1", "R2"), "thm1")
    r.flags["valid"] = _flag(eval_expr(j, THM1_VALIDITY))
    return r


def eval_cor1_inner(joint: JointDistribution, check: bool = True) -> RegionIneqs:
    _forbid(joint, ("U",), "the rate-splitting-free inner bound")
    j = _prepare(joint, ("T", "V"), check)
    r = _evaluate(j, COR1, ("R1", "R2"), "cor1")
    r.flags["valid"] = _flag(eval_expr(j, COR1_VALIDITY))
    return r


def eval_thm2_outer(joint: JointDistribution, check: bool = True) -> RegionIneqs:
    j = _prepare(joint, ("T", "U", "V"), check)
    if check and not joint.batch_ndim:
        res = markov_residual(j, ["T"], ["U", "V"], ["X1", "X2", "S"])
        if res > MARKOV_TOL:
            raise MarkovViolation(f"T - UV - X1 X2 S fails (TV residual {res:.3g})")
    return _evaluate(j, THM2, ("R1", "R2"), "thm2")


def eval_thm3(joint: JointDistribution, channel: DiscreteChannelSpec, check: bool = True) -> dict[str, RegionIneqs]:
    """Inner and outer bounds for a degraded channel."""
    from .conditions import check_condition
    if check and not check_condition(channel, "cond5"):
        raise NotDegraded("channel is not degraded: no kernel P(y|z) reproduces it")
    _forbid(joint, ("U",), "the degraded-channel bounds")
    j = _prepare(joint, ("T", "V"), check, channel)
    inner = _evaluate(j, THM3_INNER, ("R1", "R2"), "thm3_inner")
    inner.flags["valid"] = _flag(eval_expr(j, COR1_VALIDITY))
    outer = _evaluate(j, THM3_OUTER, ("R1", "R2"), "thm3_outer")
    if not joint.batch_ndim:
        outer.flags["markov"] = markov_residual(j, ["T"], ["V"], ["X1", "X2", "S"]) <= MARKOV_TOL
    return {"inner": inner, "outer": outer}


def eval_thm4_capacity(joint: JointDistribution, channel: DiscreteChannelSpec, check: bool = True) -> RegionIneqs:
    from .conditions import check_condition, check_semidet
    if check:
        if not check_semidet(channel):
            raise NotSemidet("P(z|x1,x2,s) is not 0/1 valued")
        if not check_condition(channel, "cond5"):
            raise NotDegraded("channel is not degraded: no kernel P(y|z) reproduces it")
    _forbid(joint, ("U", "V", "K"), "the semideterministic capacity region")
    j = _prepare(joint, ("T",), check, channel)
    return _evaluate(j, THM4, ("R1", "R2"), "thm4")


def eval_thm5_capacity(joint: JointDistribution, asserted=False, check: bool = True) -> RegionIneqs:
    """Capacity region when receiver 1 is less noisy (condition 8).

    ``asserted`` is True, or a :class:`Verdict` from :func:`falsify_less_noisy`
    that did not falsify the condition.
    """
    from .conditions import Verdict
    if isinstance(asserted, Verdict):
        if asserted.falsified:
            raise MissingAssertion("condition (8) was falsified; the capacity formula does not apply")
    elif asserted is not True:
        raise MissingAssertion("assert condition (8) (asserted=True) to use this capacity formula")
    _forbid(joint, ("T", "V", "K"), "the less-noisy capacity region")
    j = _prepare(joint, ("U",), check)
    return _evaluate(j, THM5, ("R1", "R2"), "thm5")


def eval_thm13_capacity(joint: JointDistribution, check: bool = True) -> RegionIneqs:
    _forbid(joint, ("T", "V", "K"), "the state-at-both capacity region")
    j = _prepare(joint, ("U",), check)
    return _evaluate(j, THM13, ("R1", "R2"), "thm13")


def eval_outer_bothstate(joint: JointDistribution, check: bool = True) -> RegionIneqs:
    _forbid(joint, ("U", "V"), "the state-at-both outer bound")
    j = _prepare(joint, ("K", "T"), check)
    return _evaluate(j, OUTER_BOTH, ("R1", "R2"), "outer_bothstate")


@dataclass(frozen=True)
class TwoCaseResult:
    case: int
    contained: bool
    margin: float
    gap: float            # I(T;Y|K,X1) - I(T;S|K,X1), which selects the case


def reduce_outer_bothstate(joint: JointDistribution) -> tuple[int, float, JointDistribution]:
    j = _with_aux(joint, ("K", "T"))
    gap = j.mutual_info("T", "Y", ("K", "X1")) - j.mutual_info("T", "S", ("K", "X1"))
    if gap <= 0:
        return 1, gap, j.drop("T").rename("K", "U")
    return 2, gap, j.merge(["K", "T"], "U")


def two_case_reduction_check(joint: JointDistribution, check: bool = True) -> TwoCaseResult:
    """Check that the state-at-both outer bound on ``joint`` lies inside the
    capacity formula evaluated on the reduced joint (U := K or U := (K, T))."""
    outer = eval_outer_bothstate(joint, check)
    case, gap, reduced = reduce_outer_bothstate(joint)
    inner = eval_thm13_capacity(reduced, check=False)
    ok, margin = inner.polygon().contains_polygon(outer.polygon())
    return TwoCaseResult(case, ok, margin, float(gap))


EVALUATORS = {
    "lemma1": eval_lemma1,
    "thm1": eval_thm1_inner,
    "cor1": eval_cor1_inner,
    "thm2": eval_thm2_outer,
    "thm3": eval_thm3,
    "thm4": eval_thm4_capacity,
    "thm5": eval_thm5_capacity,
    "thm13": eval_thm13_capacity,
    "outer_bothstate": eval_outer_bothstate,
}

__all__ = [n for n in dir() if n.startswith("eval_")] + [
    "RegionIneqs", "TwoCaseResult", "two_case_reduction_check", "EVALUATORS", "AUX_ROLES"]

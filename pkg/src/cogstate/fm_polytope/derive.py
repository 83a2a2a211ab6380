"""Re-derivation of the main inner bound from the layered-coding rate constraints.

The rate-splitting constraints are stated over (R1, R21, R22).  Adding
R2 = R21 + R22 as two inequalities and eliminating R21 then R22 gives a
system over (R1, R2); after pruning and the chain-rule rewrite below it should
coincide row for row with the five published bounds, the validity condition
(a row with no rate variable) and R1, R2 >= 0.

Rewrite table (applied to the constant side only, to the fixed point):

    ``chain``: c*I(A;B|C) + c*I(A';B|C,A) -> c*I(A,A';B|C)

with A, A', C disjoint.  Both arguments of I are tried as the shared side.
This is the single identity needed to present the combined sum-rate constant
in its published form; no other identities are applied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from ..dmc_regions.bounds import LEMMA1, THM1, THM1_VALIDITY
from ..errors import MismatchReport
from ..infoexpr import Atom, Expr, make_expr
from .eliminate import Assumptions, eliminate_all, prune
from .system import Inequality, LinearInequalitySystem

LEMMA_VARS = ("R1", "R2", "R21", "R22")
STRUCTURAL = ("R2=R21+R22 (a)", "R2=R21+R22 (b)", "R1>=0", "R21>=0", "R22>=0")


def _orientations(atom: Atom):
    yield atom.a, atom.b
    yield atom.b, atom.a


def _chain_once(expr: Expr) -> Expr | None:
    terms = [(c, a) for c, a in expr if a.kind == "I"]
    for i, (ci, ai) in enumerate(terms):
        for j, (cj, aj) in enumerate(terms):
            if i == j or ci != cj:
                continue
            for xa, sa in _orientations(ai):
                for xb, sb in _orientations(aj):
                    if sa != sb or set(aj.c) != set(ai.c) | set(xa):
                        continue
                    if set(xa) & set(xb) or set(xb) & set(ai.c) or set(xa) & set(ai.c):
                        continue
                    merged = Atom("I", tuple(sorted(set(xa) | set(xb))), sa, ai.c)
                    rest = [(c, a) for c, a in expr if a not in (ai, aj)]
                    return make_expr(rest + [(ci, merged)])
    return None


def chain_rewrite(expr: Expr) -> Expr:
    while True:
        nxt = _chain_once(expr)
        if nxt is None:
            return expr
        expr = nxt


def rewrite_system(system: LinearInequalitySystem) -> LinearInequalitySystem:
    rows = [Inequality(r.coeffs, r.const, chain_rewrite(r.atoms), r.label) for r in system.rows]
    return LinearInequalitySystem.build(system.variables, rows)


def lemma_system(omit: Iterable[str] = ()) -> LinearInequalitySystem:
    """The rate-splitting constraints over (R1, R2, R21, R22); ``omit`` drops rows by label."""
    omit = set(omit)
    unknown = omit - set(LEMMA1) - set(STRUCTURAL)
    if unknown:
        raise ValueError(f"unknown row labels {sorted(unknown)}")
    one, zero = Fraction(1), Fraction(0)
    rows = []
    for label, ((c1, c21, c22), expr) in LEMMA1.items():
        rows.append(Inequality((Fraction(c1), zero, Fraction(c21), Fraction(c22)), zero, expr, label))
    rows += [
        Inequality((zero, one, -one, -one), zero, (), "R2=R21+R22 (a)"),
        Inequality((zero, -one, one, one), zero, (), "R2=R21+R22 (b)"),
        Inequality((-one, zero, zero, zero), zero, (), "R1>=0"),
        Inequality((zero, zero, -one, zero), zero, (), "R21>=0"),
        Inequality((zero, zero, zero, -one), zero, (), "R22>=0"),
    ]
    return LinearInequalitySystem.build(LEMMA_VARS, [r for r in rows if r.label not in omit])


def expected_system() -> LinearInequalitySystem:
    """Published five bounds, the validity condition and R1, R2 >= 0."""
    rows = [Inequality(tuple(Fraction(c) for c in co), Fraction(0), e, k) for k, (co, e) in THM1.items()]
    rows.append(Inequality((Fraction(0), Fraction(0)), Fraction(0), THM1_VALIDITY, "validity"))
    rows.append(Inequality((Fraction(-1), Fraction(0)), Fraction(0), (), "R1>=0"))
    rows.append(Inequality((Fraction(0), Fraction(-1)), Fraction(0), (), "R2>=0"))
    return rewrite_system(LinearInequalitySystem.build(("R1", "R2"), rows))


@dataclass
class MatchReport:
    matched: list[Inequality] = field(default_factory=list)
    extra: list[Inequality] = field(default_factory=list)      # derived, not expected
    missing: list[Inequality] = field(default_factory=list)    # expected, not derived

    @property
    def exact(self) -> bool:
        return not self.extra and not self.missing

    def raise_if_mismatch(self):
        if not self.exact:
            raise MismatchReport(self.extra, self.missing)

    def summary(self, variables=("R1", "R2")) -> str:
        lines = [f"exact match: {self.exact} ({len(self.matched)} matched, "
                 f"{len(self.extra)} extra, {len(self.missing)} missing)"]
        for r in self.matched:
            lines.append(f"  = {r.pretty(variables)}   [{r.label}]")
        for r in self.extra:
            lines.append(f"  + {r.pretty(variables)}   (extra)")
        for r in self.missing:
            lines.append(f"  - {r.pretty(variables)}   [{r.label}] (missing)")
        return "\n".join(lines)


def compare(derived: LinearInequalitySystem, expected: LinearInequalitySystem) -> MatchReport:
    if derived.variables != expected.variables:
        raise ValueError(f"variable mismatch {derived.variables} vs {expected.variables}")
    exp = {r.canonical().key(): r for r in expected.rows}
    rep = MatchReport()
    seen = set()
    for r in derived.rows:
        k = r.canonical().key()
        if k in exp:
            rep.matched.append(exp[k])
            seen.add(k)
        else:
            rep.extra.append(r)
    rep.missing = [r for k, r in exp.items() if k not in seen]
    return rep


def derive_thm1(omit: Iterable[str] = (), assumptions: Assumptions = Assumptions()
                ) -> tuple[LinearInequalitySystem, MatchReport]:
    """Eliminate R21 then R22, prune, rewrite, and compare with the published set."""
    projected = eliminate_all(lemma_system(omit), ("R21", "R22"))
    derived = rewrite_system(prune(projected, assumptions))
    return derived, compare(derived, expected_system())


def atom_values(joint, atoms: Iterable[Atom]) -> dict[Atom, Fraction]:
    """Evaluate atoms on a discrete joint, rounded to the 1e-12 rational grid."""
    from ..dmc_regions.bounds import _with_aux, eval_expr
    from ..dmc_regions.polygon import rational
    j = _with_aux(joint, ("T", "U", "V"))
    return {a: rational(eval_expr(j, ((Fraction(1), a),))) for a in atoms}


def numeric_projection(joint) -> LinearInequalitySystem:
    """Project the rate-splitting constraints of one joint onto (R1, R2)."""
    lemma = lemma_system()
    sysm = prune(eliminate_all(lemma, ("R21", "R22")), Assumptions(values=atom_values(joint, lemma.atoms())))
    return sysm

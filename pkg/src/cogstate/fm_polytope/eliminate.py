"""Fourier-Motzkin elimination, exact feasibility and redundancy pruning.

Everything here runs on ``fractions.Fraction``.  Redundancy of a row is
certified by showing that the *violation system* (all other rows, the sign
assumptions, and the strict reverse of the row) is infeasible.  Symbolic
atoms are treated as extra real unknowns for that test, which by Farkas'
lemma is the same as asking for a non-negative combination of the other rows
whose constant differs from the row's constant by a non-negative combination
of assumed-non-negative atoms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..errors import UnboundedWitness
from ..infoexpr import Atom
from .system import Inequality, LinearInequalitySystem, add, instantiate


def eliminate(system: LinearInequalitySystem, var: str) -> LinearInequalitySystem:
    """Project out ``var``: keep rows without it, add every positive/negative pair."""
    k = system.index(var)
    pos, neg, rest = [], [], []
    for r in system.rows:
        c = r.coeffs[k]
        (pos if c > 0 else neg if c < 0 else rest).append(r)
    out = list(rest)
    for p in pos:
        for q in neg:
            out.append(add(p.scaled(-q.coeffs[k]), q.scaled(p.coeffs[k])))
    drop = lambda r: Inequality(r.coeffs[:k] + r.coeffs[k + 1:], r.const, r.atoms, r.label)
    variables = system.variables[:k] + system.variables[k + 1:]
    return LinearInequalitySystem.build(variables, [drop(r) for r in out])


def eliminate_all(system: LinearInequalitySystem, names: Iterable[str]) -> LinearInequalitySystem:
    for v in names:
        system = eliminate(system, v)
    return system


# ---------------------------------------------------------------------------
# exact feasibility of a purely numeric system with optional strict rows

# a numeric row: (coefficients, bound, strict) meaning a.x <= b  or  a.x < b
_Row = tuple[tuple[Fraction, ...], Fraction, bool]


def _norm(row: _Row) -> _Row:
    a, b, s = row
    m = max((abs(x) for x in a), default=Fraction(0))
    if m == 0:
        return a, b, s
    return tuple(x / m for x in a), b / m, s


def _reduce(rows: list[_Row]) -> list[_Row] | None:
    """Keep the tightest row per direction; None if a constant row is violated."""
    best: dict[tuple, tuple[Fraction, bool]] = {}
    for r in rows:
        a, b, s = _norm(r)
        if not any(a):
            if b < 0 or (s and b == 0):
                return None
            continue
        cur = best.get(a)
        if cur is None or b < cur[0] or (b == cur[0] and s and not cur[1]):
            best[a] = (b, s)
    return [(a, b, s) for a, (b, s) in best.items()]


def feasible(rows: Sequence[_Row]) -> bool:
    """Decide whether {x : every row holds} is non-empty, exactly."""
    cur = _reduce(list(rows))
    if cur is None:
        return False
    n = len(cur[0][0]) if cur else 0
    alive = set(range(n))
    while cur and alive:
        # cheapest variable first
        def cost(j):
            p = sum(1 for a, _, _ in cur if a[j] > 0)
            q = sum(1 for a, _, _ in cur if a[j] < 0)
            return p * q - p - q
        j = min(sorted(alive), key=cost)
        alive.discard(j)
        pos = [r for r in cur if r[0][j] > 0]
        neg = [r for r in cur if r[0][j] < 0]
        nxt = [r for r in cur if r[0][j] == 0]
        for ap, bp, sp in pos:
            for an, bn, sn in neg:
                lp, ln = -an[j], ap[j]
                a = tuple(lp * x + ln * y for x, y in zip(ap, an))
                nxt.append((a, lp * bp + ln * bn, sp or sn))
        cur = _reduce(nxt)
        if cur is None:
            return False
    return True


# ---------------------------------------------------------------------------
# pruning

@dataclass(frozen=True)
class Assumptions:
    """Sign facts and optional numeric values for atoms.

    ``nonneg=None`` means every atom is non-negative (true for mutual
    informations and entropies of discrete variables).
    """

    nonneg: frozenset | None = None
    values: Mapping[Atom, Fraction] | None = None

    def is_nonneg(self, atom: Atom) -> bool:
        return self.nonneg is None or atom in self.nonneg


def _numeric_rows(system: LinearInequalitySystem, atoms: list[Atom],
                  assume: Assumptions) -> tuple[list[_Row], list[_Row]]:
    """Rows over (variables, atoms) and the atom sign rows."""
    pos = {a: i for i, a in enumerate(atoms)}
    nv = len(system.variables)
    rows = []
    for r in system.rows:
        vec = [Fraction(c) for c in r.coeffs] + [Fraction(0)] * len(atoms)
        for c, a in r.atoms:
            vec[nv + pos[a]] -= c
        rows.append((tuple(vec), Fraction(r.const), False))
    signs = []
    for a in atoms:
        if assume.is_nonneg(a):
            vec = [Fraction(0)] * (nv + len(atoms))
            vec[nv + pos[a]] = Fraction(-1)
            signs.append((tuple(vec), Fraction(0), False))
    return rows, signs


def is_implied(system: LinearInequalitySystem, target: Inequality,
               assume: Assumptions = Assumptions()) -> bool:
    """True if every point satisfying ``system`` (under ``assume``) satisfies ``target``."""
    both = LinearInequalitySystem(system.variables, system.rows + (target,))
    atoms = both.atoms()
    rows, signs = _numeric_rows(both, atoms, assume)
    a, b, _ = rows[-1]
    violate = (tuple(-x for x in a), -b, True)
    return not feasible(rows[:-1] + signs + [violate])


def prune(system: LinearInequalitySystem, assumptions: Assumptions = Assumptions()) -> LinearInequalitySystem:
    """Drop every row implied by the remaining rows and the assumptions.

    With ``assumptions.values`` the atoms are first replaced by numbers.
    An infeasible system collapses to the single row ``0 <= -1`` and an
    ``UnboundedWitness`` warning is issued.
    """
    if assumptions.values is not None:
        system = instantiate(system, assumptions.values)
    system = system.canonical()
    atoms = system.atoms()
    rows, signs = _numeric_rows(system, atoms, assumptions)
    if not feasible(rows + signs):
        warnings.warn(UnboundedWitness("system is infeasible under the assumptions; "
                                       "every row is vacuously implied"), stacklevel=2)
        zero = tuple(Fraction(0) for _ in system.variables)
        return LinearInequalitySystem(system.variables, (Inequality(zero, Fraction(-1), (), "infeasible"),))
    keep = list(range(len(system.rows)))
    for i in range(len(system.rows)):
        others = [rows[j] for j in keep if j != i]
        a, b, _ = rows[i]
        if not feasible(others + signs + [(tuple(-x for x in a), -b, True)]):
            keep.remove(i)
    return LinearInequalitySystem(system.variables, tuple(system.rows[j] for j in keep))


def project(system: LinearInequalitySystem, keep: Sequence[str],
            assumptions: Assumptions = Assumptions()) -> LinearInequalitySystem:
    """Eliminate every variable not in ``keep`` (in system order), then prune."""
    drop = [v for v in system.variables if v not in keep]
    return prune(eliminate_all(system, drop), assumptions)


def polygon(system: LinearInequalitySystem):
    """The (R1, R2) polygon of a numeric two-variable system."""
    from ..dmc_regions.polygon import HalfPlane, RatePolygon
    if len(system.variables) != 2 or not system.is_numeric():
        raise ValueError("polygon() needs a numeric system over two variables")
    return RatePolygon(tuple(HalfPlane(r.coeffs[0], r.coeffs[1], r.const, r.label) for r in system.rows))

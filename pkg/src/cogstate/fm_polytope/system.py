"""Linear inequality systems with symbolic information atoms as constants.

A row reads ``a . x <= const + sum_k c_k atom_k``: rational coefficients over
the rate variables, a rational constant and a signed multiset of atoms (an
``infoexpr.Expr``).  Rows are kept in a canonical form so that syntactic
comparison of two systems is meaningful:

* the coefficient vector, the constant and the atom weights are scaled by one
  positive factor so that every number on the row is an integer with gcd 1;
* atoms are sorted (``make_expr``);
* rows with no variable and a constant that is trivially non-negative
  (``0 <= 0`` or ``0 <= 3``) are dropped.

Text format, one row per line::

    # variables: R1 R2
    1 1 | I(T,U,X1;Y) + I(V;Z|T,U,X1) - I(T,U,V;S|X1)
    -1 0 | 0

Coefficient fields may be fractions (``1/2``); the right side accepts an
optional leading number followed by signed atoms.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..errors import ValidationError
from ..infoexpr import Atom, Expr, format_expr, make_expr, parse_expr


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


@dataclass(frozen=True)
class Inequality:
    coeffs: tuple[Fraction, ...]
    const: Fraction = Fraction(0)
    atoms: Expr = ()
    label: str = field(default="", compare=False)

    def key(self):
        return (self.coeffs, self.const, self.atoms)

    def is_trivial(self) -> bool:
        """No variables and a plain non-negative number on the right."""
        return not any(self.coeffs) and not self.atoms and self.const >= 0

    def is_contradiction(self) -> bool:
        return not any(self.coeffs) and not self.atoms and self.const < 0

    def canonical(self) -> "Inequality":
        nums = [c for c in self.coeffs] + [self.const] + [c for c, _ in self.atoms]
        nz = [Fraction(x) for x in nums if x != 0]
        if not nz:
            return Inequality(tuple(Fraction(c) for c in self.coeffs), Fraction(0), (), self.label)
        den = 1
        for x in nz:
            den = _lcm(den, x.denominator)
        g = 0
        for x in nz:
            g = math.gcd(g, int(x * den))
        s = Fraction(den, g)
        return Inequality(tuple(Fraction(c) * s for c in self.coeffs), Fraction(self.const) * s,
                          make_expr((c * s, a) for c, a in self.atoms), self.label)

    def scaled(self, k: Fraction) -> "Inequality":
        return Inequality(tuple(c * k for c in self.coeffs), self.const * k,
                          make_expr((c * k, a) for c, a in self.atoms), self.label)

    def rhs_text(self) -> str:
        if not self.atoms:
            return _num(self.const)
        body = format_expr(self.atoms)
        if self.const == 0:
            return body
        if body.startswith("-"):
            return f"{_num(self.const)} {body}"
        return f"{_num(self.const)} + {body}"

    def to_text(self) -> str:
        return " ".join(_num(c) for c in self.coeffs) + " | " + self.rhs_text()

    def pretty(self, variables: Sequence[str]) -> str:
        terms = []
        for c, v in zip(self.coeffs, variables):
            if c == 0:
                continue
            mag = "" if abs(c) == 1 else f"{_num(abs(c))} "
            terms.append(("- " if c < 0 else "+ ") + mag + v)
        lhs = " ".join(terms) if terms else "0"
        lhs = lhs[2:] if lhs.startswith("+ ") else lhs
        return f"{lhs} <= {self.rhs_text()}"


def _num(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def add(p: Inequality, q: Inequality) -> Inequality:
    return Inequality(tuple(a + b for a, b in zip(p.coeffs, q.coeffs)), p.const + q.const,
                      make_expr(list(p.atoms) + list(q.atoms)))


@dataclass(frozen=True)
class LinearInequalitySystem:
    variables: tuple[str, ...]
    rows: tuple[Inequality, ...] = ()

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise ValidationError(f"repeated variable in {self.variables}")
        for r in self.rows:
            if len(r.coeffs) != len(self.variables):
                raise ValidationError(f"row has {len(r.coeffs)} coefficients for {len(self.variables)} variables")

    @classmethod
    def build(cls, variables: Sequence[str], rows: Iterable[Inequality]) -> "LinearInequalitySystem":
        """Canonicalize, drop trivial rows and duplicates (first label wins)."""
        seen, out = set(), []
        for r in rows:
            c = r.canonical()
            if c.is_trivial() or c.key() in seen:
                continue
            seen.add(c.key())
            out.append(c)
        return cls(tuple(variables), tuple(out))

    def canonical(self) -> "LinearInequalitySystem":
        return self.build(self.variables, self.rows)

    def row_set(self) -> set:
        return {r.canonical().key() for r in self.rows}

    def atoms(self) -> list[Atom]:
        return sorted({a for r in self.rows for _, a in r.atoms})

    def is_numeric(self) -> bool:
        return all(not r.atoms for r in self.rows)

    def index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise ValidationError(f"variable {var!r} not in system {self.variables}") from None

    def __len__(self):
        return len(self.rows)

    # -- text I/O -----------------------------------------------------------
    def to_text(self) -> str:
        lines = ["# variables: " + " ".join(self.variables)]
        for r in self.rows:
            line = r.to_text()
            lines.append(line + (f"   # {r.label}" if r.label else ""))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LinearInequalitySystem":
        variables, rows = None, []
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            m = re.match(r"#\s*variables:\s*(.*)", line)
            if m:
                variables = tuple(m.group(1).split())
                continue
            label = ""
            if "#" in line:
                line, label = line.split("#", 1)
                line, label = line.strip(), label.strip()
            if not line:
                continue
            if variables is None:
                raise ValidationError("missing '# variables:' header")
            if "|" not in line:
                raise ValidationError(f"line {n}: expected '<coeffs> | <constant>'")
            lhs, rhs = line.split("|", 1)
            try:
                coeffs = tuple(Fraction(t) for t in lhs.split())
                const, atoms = parse_constant(rhs)
            except ValueError as e:
                raise ValidationError(f"line {n}: {e}") from None
            if len(coeffs) != len(variables):
                raise ValidationError(f"line {n}: {len(coeffs)} coefficients for {len(variables)} variables")
            rows.append(Inequality(coeffs, const, atoms, label))
        if variables is None:
            raise ValidationError("missing '# variables:' header")
        return cls(variables, tuple(rows))

    def pretty(self) -> str:
        return "\n".join(r.pretty(self.variables) + (f"   [{r.label}]" if r.label else "")
                         for r in self.rows)


_NUM_RE = re.compile(r"\s*([+-]?\s*\d+(?:/\d+)?)\s*(?=$|[+-])")


def parse_constant(text: str) -> tuple[Fraction, Expr]:
    """``"3/2 + I(X;Y) - H(Z)"`` -> (3/2, expr); a bare number or bare atoms also parse."""
    text = text.strip()
    m = _NUM_RE.match(text)
    if m:
        const = Fraction(m.group(1).replace(" ", ""))
        rest = text[m.end():].strip()
        if rest.startswith("+"):
            rest = rest[1:]
        elif rest and not rest.startswith("-"):
            raise ValueError(f"cannot parse constant {text!r}")
        return const, parse_expr(rest)
    return Fraction(0), parse_expr(text)


def row(coeffs: Sequence, rhs: str | Expr = "0", label: str = "") -> Inequality:
    """Convenience constructor: ``row((1, 1), "I(X;Y) - I(U;S)")``."""
    if isinstance(rhs, str):
        const, atoms = parse_constant(rhs)
    else:
        const, atoms = Fraction(0), make_expr(rhs)
    return Inequality(tuple(Fraction(c) for c in coeffs), const, atoms, label)


def instantiate(system: LinearInequalitySystem, values: Mapping[Atom, Fraction]) -> LinearInequalitySystem:
    """Replace every atom by its rational value."""
    rows = []
    for r in system.rows:
        try:
            extra = sum((c * Fraction(values[a]) for c, a in r.atoms), Fraction(0))
        except KeyError as e:
            raise ValidationError(f"no value for atom {e.args[0]}") from None
        rows.append(Inequality(r.coeffs, r.const + extra, (), r.label))
    return LinearInequalitySystem.build(system.variables, rows)

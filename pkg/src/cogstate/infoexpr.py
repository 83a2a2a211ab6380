"""Symbolic information atoms and signed sums of them.

An atom is either a conditional mutual information ``I(A;B|C)`` or a conditional
entropy ``H(A|C)``; variable sets are written comma separated, e.g.
``I(X1,T,U;Y)`` or ``H(Z|X1,T,S)``.  Variables inside each set are sorted so
``I(U,T,X1;Y)`` and ``I(T,U,X1;Y)`` are the same atom.  No information
identities are applied here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

_ATOM_RE = re.compile(r"([IH])\(([^()]*)\)")
_TERM_RE = re.compile(r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?([IH]\([^()]*\))\s*")


def _varset(text: str) -> tuple[str, ...]:
    names = [v.strip() for v in text.split(",") if v.strip()]
    if len(set(names)) != len(names):
        raise ValueError(f"repeated variable in set {text!r}")
    return tuple(sorted(names))


@dataclass(frozen=True, order=True)
class Atom:
    kind: str                     # "I" or "H"
    a: tuple[str, ...]
    b: tuple[str, ...] = ()       # empty for entropies
    c: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("I", "H"):
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if not self.a or (self.kind == "I" and not self.b):
            raise ValueError("empty variable set in atom")
        if self.kind == "H" and self.b:
            raise ValueError("entropy atoms take a single set")

    @classmethod
    def parse(cls, text: str) -> "Atom":
        m = _ATOM_RE.fullmatch(text.strip())
        if m is None:
            raise ValueError(f"cannot parse atom {text!r}")
        kind, body = m.groups()
        cond = ()
        if "|" in body:
            body, ctext = body.split("|", 1)
            cond = _varset(ctext)
        if kind == "I":
            parts = body.split(";")
            if len(parts) != 2:
                raise ValueError(f"mutual information needs exactly one ';': {text!r}")
            return cls("I", _varset(parts[0]), _varset(parts[1]), cond)
        if ";" in body:
            raise ValueError(f"entropy atom with ';': {text!r}")
        return cls("H", _varset(body), (), cond)

    def variables(self) -> set[str]:
        return set(self.a) | set(self.b) | set(self.c)

    def __str__(self) -> str:
        cond = "|" + ",".join(self.c) if self.c else ""
        if self.kind == "H":
            return f"H({','.join(self.a)}{cond})"
        return f"I({','.join(self.a)};{','.join(self.b)}{cond})"


# an expression is a tuple of (coefficient, atom) pairs, atoms unique and sorted
Expr = tuple[tuple[Fraction, Atom], ...]


def make_expr(terms: Iterable[tuple[Fraction | int, Atom]]) -> Expr:
    acc: dict[Atom, Fraction] = {}
    for coef, atom in terms:
        acc[atom] = acc.get(atom, Fraction(0)) + Fraction(coef)
    return tuple((c, a) for a, c in sorted(acc.items()) if c != 0)


def parse_expr(text: str) -> Expr:
    """Parse ``"I(X1,U;Y) - I(U;S|X1) + 2*H(Z|X1)"``; ``"0"`` gives the empty sum."""
    text = text.strip()
    if text in ("", "0"):
        return ()
    pos, terms = 0, []
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"cannot parse expression near {text[pos:]!r}")
        sign, coef, atom = m.groups()
        if terms and sign is None:
            raise ValueError(f"missing operator before {atom!r}")
        value = Fraction(coef) if coef else Fraction(1)
        terms.append((-value if sign == "-" else value, Atom.parse(atom)))
        pos = m.end()
    return make_expr(terms)


def format_expr(expr: Expr) -> str:
    if not expr:
        return "0"
    out = []
    for coef, atom in expr:
        mag = abs(coef)
        body = str(atom) if mag == 1 else f"{mag}*{atom}"
        out.append(("- " if coef < 0 else "+ ") + body)
    s = " ".join(out)
    return s[2:] if s.startswith("+ ") else "-" + s[1:]


def evaluate(expr: Expr, atom_value) -> float:
    """Sum ``coef * atom_value(atom)`` over the expression."""
    return float(sum(float(c) * atom_value(a) for c, a in expr))


def expr_variables(expr: Expr) -> set[str]:
    out: set[str] = set()
    for _, a in expr:
        out |= a.variables()
    return out


def parse_table(table: Mapping[str, str]) -> dict[str, Expr]:
    return {k: parse_expr(v) for k, v in table.items()}

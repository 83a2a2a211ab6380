import itertools
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from cogstate.dmc_regions import eval_thm1_inner, random_channel, random_joint
from cogstate.errors import MismatchReport, UnboundedWitness, ValidationError
from cogstate.fm_polytope import (Assumptions, LinearInequalitySystem, chain_rewrite, compare,
                                  derive_thm1, eliminate, eliminate_all, expected_system, feasible,
                                  is_implied, lemma_system, numeric_projection, parse_constant,
                                  polygon, project, prune, row)

F = Fraction


def test_textbook_elimination():
    s = LinearInequalitySystem.build(("x", "y"), [row((1, 0), "I(A;B)"), row((-1, 0)),
                                                  row((-1, 1), "I(C;D)")])
    e = eliminate(s, "x")
    assert e.variables == ("y",)
    assert {r.to_text() for r in e.rows} == {"0 | I(A;B)", "1 | I(A;B) + I(C;D)"}


def test_empty_and_trivial():
    s = LinearInequalitySystem.build(("x",), [])
    assert len(eliminate(s, "x")) == 0
    s = LinearInequalitySystem.build(("x", "y"), [row((0, 0), "3"), row((1, 1), "1"), row((2, 2), "2")])
    assert len(s) == 1          # trivial row dropped, duplicate merged after scaling
    with pytest.raises(ValidationError):
        s.index("z")


def test_text_roundtrip():
    d, _ = derive_thm1()
    back = LinearInequalitySystem.from_text(d.to_text())
    assert back.row_set() == d.row_set() and back.variables == d.variables


def test_parse_constant():
    assert parse_constant("3/2 + I(X;Y)")[0] == F(3, 2)
    assert parse_constant("- 1 - I(X;Y)")[0] == F(-1)
    assert parse_constant("I(X;Y)")[0] == 0
    const, atoms = parse_constant("2 I(X;Y)")
    assert const == 0 and atoms[0][0] == 2
    with pytest.raises(ValueError):
        parse_constant("2 3")


def test_chain_rewrite():
    _, e = parse_constant("2*I(A;B|C) + 2*I(D;B|A,C) - I(E;F)")
    _, want = parse_constant("2*I(A,D;B|C) - I(E;F)")
    assert chain_rewrite(e) == want
    _, e = parse_constant("I(A;B|C) + 2*I(D;B|A,C)")     # unequal weights: no rewrite
    assert chain_rewrite(e) == e


# -- derivation ---------------------------------------------------------------

def test_derivation_is_exact():
    derived, report = derive_thm1()
    assert report.exact and len(report.matched) == 8
    assert not report.extra and not report.missing
    report.raise_if_mismatch()
    assert compare(derived, expected_system()).exact


def test_lemma_system_rows():
    s = lemma_system()
    assert s.variables == ("R1", "R2", "R21", "R22")
    labels = {r.label for r in s.rows}
    assert {"R2=R21+R22 (a)", "R2=R21+R22 (b)", "R21>=0", "R22>=0"} <= labels
    assert len(lemma_system(omit=["R22>=0"])) == len(s) - 1


@pytest.mark.parametrize("omit", ["R22>=0", "R21>=0"])
def test_omitted_row_reports_mismatch(omit):
    _, report = derive_thm1(omit=[omit])
    assert not report.exact and len(report.missing) == 2
    with pytest.raises(MismatchReport) as err:
        report.raise_if_mismatch()
    assert err.value.missing


# -- pruning ------------------------------------------------------------------

def test_prune_with_atoms():
    s = LinearInequalitySystem.build(("x",), [row((1,), "I(A;B)"), row((1,), "I(A;B) + I(C;D)")])
    assert {r.to_text() for r in prune(s).rows} == {"1 | I(A;B)"}
    # without sign information neither row implies the other
    assert len(prune(s, Assumptions(nonneg=frozenset()))) == 2
    t = row((1,), "2*I(A;B) + I(C;D)")
    assert is_implied(s, t) and not is_implied(s, t, Assumptions(nonneg=frozenset()))


def test_prune_infeasible_warns():
    s = LinearInequalitySystem.build(("x",), [row((1,), "-1"), row((-1,), "0")])
    with pytest.warns(UnboundedWitness):
        out = prune(s)
    assert len(out) == 1 and out.rows[0].is_contradiction()


def test_prune_with_values():
    s = LinearInequalitySystem.build(("x",), [row((1,), "I(A;B)"), row((1,), "I(C;D)")])
    atoms = s.atoms()
    out = prune(s, Assumptions(values={atoms[0]: F(1), atoms[1]: F(1, 2)}))
    r = out.rows[0]                     # canonical rows are coprime integers: 2x <= 1
    assert out.is_numeric() and len(out) == 1 and r.const / r.coeffs[0] == F(1, 2)


# -- exact properties on random numeric systems -------------------------------

small = st.integers(-3, 3)
rows3 = st.lists(st.tuples(st.tuples(small, small, small), st.integers(-4, 6)), min_size=1, max_size=7)


def _system(raw):
    return LinearInequalitySystem.build(("x", "y", "z"), [row(c, str(b)) for c, b in raw])


def _holds(s, point):
    return all(sum(F(c) * v for c, v in zip(r.coeffs, point)) <= r.const for r in s.rows)


def _x_interval(s, rest):
    """Feasible x for fixed (y, z), computed directly: (lo, hi) or None."""
    lo, hi = None, None
    for r in s.rows:
        a = r.coeffs[0]
        b = r.const - sum(F(c) * v for c, v in zip(r.coeffs[1:], rest))
        if a == 0:
            if b < 0:
                return None
        elif a > 0:
            hi = b / a if hi is None else min(hi, b / a)
        else:
            lo = b / a if lo is None else max(lo, b / a)
    if lo is not None and hi is not None and lo > hi:
        return None
    return lo, hi


grid = [F(k, 2) for k in range(-6, 7)]


@settings(max_examples=80)
@given(rows3)
def test_projection_sound_and_complete(raw):
    s = _system(raw)
    proj = eliminate(s, "x")
    for y, z in itertools.product(grid[::2], grid[::2]):
        extendable = _x_interval(s, (y, z)) is not None
        assert _holds(proj, (y, z)) == extendable


@settings(max_examples=80)
@given(rows3, st.lists(st.sampled_from(grid), min_size=3, max_size=3))
def test_feasible_agrees_with_witness(raw, point):
    s = _system(raw)
    fm_rows = [(r.coeffs, r.const, False) for r in s.rows]
    if _holds(s, point):
        assert feasible(fm_rows)
    if not feasible(fm_rows):
        for y, z in itertools.product(grid[::3], grid[::3]):
            assert _x_interval(s, (y, z)) is None


@settings(max_examples=60)
@given(rows3)
def test_prune_preserves_the_set(raw):
    s = _system(raw)
    assume(feasible([(r.coeffs, r.const, False) for r in s.rows]))
    p = prune(s)
    assert len(p) <= len(s)
    for pt in itertools.product(grid[::3], repeat=3):
        assert _holds(p, pt) == _holds(s, pt)


def test_eliminate_all_order_independent():
    s = _system([((1, 1, 0), 2), ((-1, 0, 1), 1), ((0, -1, -1), 0), ((1, -1, 1), 3), ((-1, 1, -1), 1)])
    a = prune(eliminate_all(s, ["x", "y"]))
    b = prune(eliminate_all(s, ["y", "x"]))
    assert a.row_set() == b.row_set()
    assert project(s, ["z"]).row_set() == a.row_set()


# -- numeric projection against the direct evaluator --------------------------

def test_numeric_projection_matches_direct_polygon():
    rng = np.random.default_rng(3)
    checked = 0
    for i in range(12):
        ch = random_channel({"X1": 2, "X2": 2, "S": 1 + i % 2, "Y": 2, "Z": 2}, rng)
        j = random_joint(ch, {"T": 2, "U": 2, "V": 2}, rng, 0.5)
        direct = eval_thm1_inner(j)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnboundedWitness)
            P = polygon(numeric_projection(j))
        if not direct.flags["valid"]:
            assert P.is_empty()
            continue
        a, b = sorted(P.vertices()), sorted(direct.polygon().vertices())
        assert len(a) == len(b)
        for (x1, y1), (x2, y2) in zip(a, b):
            assert abs(float(x1 - x2)) <= 2e-12 and abs(float(y1 - y2)) <= 2e-12
        checked += 1
    assert checked >= 3

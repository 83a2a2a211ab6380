import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cogstate.dmc_regions import (DiscreteChannelSpec, JointDistribution, SearchSpec, check_condition,
                                  check_factorization, check_semidet, compositions, condition_residual,
                                  dirty_xor_channel, eval_cor1_inner, eval_lemma1, eval_thm1_inner,
                                  eval_thm2_outer, eval_thm3, eval_thm4_capacity, eval_thm5_capacity,
                                  falsify_less_noisy, from_factors, markov_residual, noiseless_pair_channel,
                                  optimize_region, random_channel, random_joint, rational,
                                  two_case_reduction_check, xor_erasure_channel)
from cogstate.dmc_regions.polygon import HalfPlane, RatePolygon
from cogstate.errors import (BadFactorization, InfeasibleCaps, MarkovViolation, MissingAssertion,
                             NotDegraded, NotSemidet, ValidationError)

TINY = {"X1": 2, "X2": 2, "S": 2, "Y": 2, "Z": 2}


def bsc_pair(eps):
    """Y = Z = X2 xor S passed through a BSC(eps) for Y only."""
    def y_fn(x1, x2, s):
        z = x2 ^ s
        return np.array([1 - eps, eps])[[z, 1 - z]]

    def z_fn(x1, x2, s, y):
        v = np.zeros(2)
        v[x2 ^ s] = 1.0
        return v
    return DiscreteChannelSpec.from_functions(TINY, [0.5, 0.5], y_fn, z_fn)


# -- channels and joints ------------------------------------------------------

def test_channel_validation():
    with pytest.raises(ValidationError):
        DiscreteChannelSpec(np.array([0.5, 0.5]), np.ones((1, 1, 2, 1, 1)) * 0.7)
    with pytest.raises(ValidationError):
        DiscreteChannelSpec(np.array([1.0]), np.ones((1, 1, 2, 1, 1)))
    ch = xor_erasure_channel()
    assert DiscreteChannelSpec.from_json(ch.to_json()) == ch


def test_entropy_and_mi_of_a_copy():
    ch = noiseless_pair_channel()
    k = np.zeros((2, 1, 1, 2))
    k[:, :, 0, :] = 0.5
    j = from_factors(ch, np.array([0.5, 0.5]), k, (), ())
    assert j.entropy(["X1", "X2"]) == pytest.approx(2.0)
    assert j.mutual_info(("X1", "X2"), "Y") == pytest.approx(2.0)
    assert j.mutual_info("X1", "X2") == pytest.approx(0.0, abs=1e-15)
    assert j.cond_entropy("Y", ("X1", "X2")) == pytest.approx(0.0, abs=1e-15)


def test_joint_json_roundtrip():
    j = random_joint(dirty_xor_channel(), {"U": 2}, np.random.default_rng(0))
    back = JointDistribution.from_json(j.to_json())
    assert back.axes == j.axes and np.allclose(back.p, j.p)
    json.loads(j.to_json())


def test_factorization_detects_feedback():
    ch = random_channel(TINY, np.random.default_rng(1))
    j = random_joint(ch, {"T": 2}, np.random.default_rng(2))
    check_factorization(j, ch)
    # make X1 depend on S
    p = j.p.copy()
    p[0, 0] *= 3
    bad = JointDistribution(j.axes, p / p.sum())
    with pytest.raises(BadFactorization):
        check_factorization(bad, ch)
    with pytest.raises(BadFactorization):
        eval_thm1_inner(bad)


def test_markov_structure():
    ch = random_channel(TINY, np.random.default_rng(3))
    rng = np.random.default_rng(4)
    j = random_joint(ch, {"T": 2, "U": 2, "V": 2}, rng, markov="T-UV")
    assert markov_residual(j, ["T"], ["U", "V"], ["X1", "X2", "S"]) < 1e-12
    eval_thm2_outer(j)
    free = random_joint(ch, {"T": 2, "U": 2, "V": 2}, rng)
    assert markov_residual(free, ["T"], ["U", "V"], ["X1", "X2", "S"]) > 1e-6
    with pytest.raises(MarkovViolation):
        eval_thm2_outer(free)


def test_forbidden_axes():
    ch = random_channel(TINY, np.random.default_rng(5))
    j = random_joint(ch, {"T": 2, "U": 2, "V": 2}, np.random.default_rng(6))
    with pytest.raises(BadFactorization):
        eval_cor1_inner(j)


# -- bounds -------------------------------------------------------------------

def test_lemma_has_five_rows():
    ch = random_channel(TINY, np.random.default_rng(7))
    r = eval_lemma1(random_joint(ch, {"T": 2, "U": 2, "V": 2}, np.random.default_rng(8)))
    assert r.variables == ("R1", "R21", "R22") and len(r.rows) == 5


@settings(max_examples=40)
@given(seed=st.integers(0, 2 ** 32 - 1), s=st.integers(1, 2))
def test_thm1_inside_thm2(seed, s):
    rng = np.random.default_rng(seed)
    ch = random_channel(dict(TINY, S=s), rng)
    j = random_joint(ch, {"T": 2, "U": 2, "V": 2}, rng, 0.5, markov="T-UV")
    inner = eval_thm1_inner(j)
    merged = j.merge(["U", "V"], "Vp", keep_sources=True).drop("V").rename("Vp", "V")
    outer = eval_thm2_outer(merged, check=False)
    ok, margin = outer.polygon().contains_polygon(inner.polygon())
    assert ok and margin >= -1e-10


@settings(max_examples=40)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_degraded_inner_inside_outer(seed):
    rng = np.random.default_rng(seed)
    ch = random_channel(TINY, rng, degraded=True)
    j = random_joint(ch, {"T": 2, "V": 2}, rng, 0.5, markov="T-V")
    r = eval_thm3(j, ch)
    assert r["outer"].flags["markov"]
    if r["inner"].flags["valid"]:
        ok, margin = r["outer"].polygon().contains_polygon(r["inner"].polygon())
        assert ok and margin >= -1e-10


def test_channel_conditions_enforced():
    ch = random_channel(TINY, np.random.default_rng(9))
    j = random_joint(ch, {"T": 2, "V": 2}, np.random.default_rng(10))
    with pytest.raises(NotDegraded):
        eval_thm3(j, ch)
    jt = random_joint(ch, {"T": 2}, np.random.default_rng(11))
    with pytest.raises(NotSemidet):
        eval_thm4_capacity(jt, ch)
    with pytest.raises(MissingAssertion):
        eval_thm5_capacity(random_joint(ch, {"U": 2}, np.random.default_rng(12)))


def test_semidet_identity_single_joint():
    ch = xor_erasure_channel()
    j = random_joint(ch, {"T": 2}, np.random.default_rng(13))
    a = eval_thm4_capacity(j, ch).values()
    b = eval_thm3(j.with_copy("Z", "V"), ch)["inner"].values()
    assert set(a) <= set(b)
    for k in a:
        assert a[k] == pytest.approx(b[k], abs=1e-12)


@settings(max_examples=40)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_two_case_reduction(seed):
    rng = np.random.default_rng(seed)
    ch = random_channel(TINY, rng)
    r = two_case_reduction_check(random_joint(ch, {"K": 2, "T": 2}, rng, 0.7))
    assert r.case in (1, 2) and (r.case == 1) == (r.gap <= 0)
    assert r.margin >= -1e-12


# -- conditions ---------------------------------------------------------------

def test_degradedness_residual():
    assert condition_residual(xor_erasure_channel(), "cond5") < 1e-15
    assert check_condition(random_channel(TINY, np.random.default_rng(0), degraded=True), "cond5")
    assert not check_condition(random_channel(TINY, np.random.default_rng(0)), "cond5")
    with pytest.raises(ValidationError):
        condition_residual(xor_erasure_channel(), "cond9")
    assert check_semidet(xor_erasure_channel()) and check_semidet(bsc_pair(0.1))
    assert not check_semidet(random_channel(TINY, np.random.default_rng(0)))


def _pure_noise_y():
    sizes = {"X1": 2, "X2": 2, "S": 1, "Y": 2, "Z": 4}

    def z_fn(x1, x2, s, y):
        v = np.zeros(4)
        v[2 * x1 + x2] = 1
        return v
    return DiscreteChannelSpec.from_functions(sizes, [1.0], lambda *a: np.array([0.5, 0.5]), z_fn)


def test_falsifier():
    v = falsify_less_noisy(_pure_noise_y(), "cond8", budget=100)
    assert v.falsified and v.violation > 0.5 and v.witness is not None
    ok = falsify_less_noisy(noiseless_pair_channel(), "cond8", budget=200)
    assert not ok.falsified and "not a proof" in str(ok)
    # a Verdict that falsified the condition cannot license the capacity formula
    j = random_joint(_pure_noise_y(), {"U": 2}, np.random.default_rng(1))
    with pytest.raises(MissingAssertion):
        eval_thm5_capacity(j, asserted=v)
    eval_thm5_capacity(random_joint(noiseless_pair_channel(), {"U": 2}, np.random.default_rng(1)), asserted=ok)


# -- polygons and optimization ------------------------------------------------

def test_rational_quantum():
    assert rational(0.1) == rational(0.1 + 1e-14)
    assert rational(1 / 3).denominator <= 10 ** 12


def test_polygon_vertices():
    P = RatePolygon((HalfPlane(rational(1), 0, rational(1)), HalfPlane(0, rational(1), rational(1)),
                     HalfPlane(rational(1), rational(1), rational(1.5))))
    assert [(float(x), float(y)) for x, y in P.vertices()] == [(0, 0), (0, 1), (0.5, 1), (1, 0), (1, 0.5)]
    assert P.max_weighted(1, 1) == 1.5
    empty = RatePolygon((HalfPlane(rational(1), 0, rational(-1)),))
    assert empty.is_empty() and P.contains_polygon(empty) == (True, float("inf"))


def test_compositions():
    c = compositions(3, 4)
    assert len(c) == 15 and np.all(c.sum(axis=1) == 4) and len({tuple(r) for r in c}) == 15


def test_optimize_dirty_xor():
    r = optimize_region(dirty_xor_channel(), "thm5", (0, 1), SearchSpec(aux_sizes={"U": 2}))
    assert r.mode == "exhaustive" and r.value == pytest.approx(1.0, abs=1e-12)
    assert r.joint is not None


def test_optimize_local_search():
    r = optimize_region(noiseless_pair_channel(), "thm1", (1, 1), SearchSpec(exhaustive_limit=10))
    assert r.mode == "local" and r.value == pytest.approx(2.0, abs=1e-9)


def test_optimize_rejects_bad_input():
    with pytest.raises(InfeasibleCaps):
        optimize_region(dirty_xor_channel(), "thm5", (1, 1), SearchSpec(aux_sizes={"U": 9}))
    with pytest.raises(InfeasibleCaps):
        optimize_region(dirty_xor_channel(), "thm5", (1, 1), SearchSpec(aux_sizes={"T": 2}))
    with pytest.raises(ValidationError):
        optimize_region(dirty_xor_channel(), "thm99")
    with pytest.raises(ValidationError):
        optimize_region(dirty_xor_channel(), "thm5", (-1, 1))
    with pytest.raises(NotSemidet):
        optimize_region(random_channel(TINY, np.random.default_rng(1)), "thm4")
    assert optimize_region(dirty_xor_channel(), "thm5", (0, 0)).value == 0.0

import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cogstate.errors import CaseMismatch, InvalidSplit, MissingAssertion, ValidationError
from cogstate.gaussian_regions import (CaseTag, GaussianChannelParams, GridSpec, RateFrontier, SplitParams,
                                       capacity_region, certify_case1a, certify_case2, classify_case,
                                       frontier, inner1a_rates, inner2_rates, outer2_rates)
from cogstate.gaussian_regions.frontier import envelope_at, pareto_envelope, polygon_max

COARSE = GridSpec(n_rho=17, n_split=9, refine_rounds=1)
FIG2 = GaussianChannelParams(1, 1, 1, 1.5, 1.6, 0.9)
FIG3 = GaussianChannelParams(1, 1, 1, 0.8, 0.85, 0.9)


def c(snr):
    return 0.5 * math.log2(1 + snr)


# -- parameters ---------------------------------------------------------------

def test_parse_and_validation():
    assert GaussianChannelParams.parse("1, 2,3,0.5,1,-1").as_tuple() == (1, 2, 3, 0.5, 1, -1)
    with pytest.raises(ValidationError):
        GaussianChannelParams.parse("1,2,3")
    with pytest.raises(ValidationError):
        GaussianChannelParams(-1, 1, 1, 1, 1, 1)
    with pytest.raises(ValidationError):
        GaussianChannelParams(1, 1, float("nan"), 1, 1, 1)


def test_split_validation():
    with pytest.raises(InvalidSplit):
        SplitParams(0.8, 0.8, 0.1)
    with pytest.raises(InvalidSplit):
        SplitParams(0.1, 0.1, -0.1)
    p = GaussianChannelParams(0, 1, 1, 1.5, 1, 1)
    with pytest.raises(InvalidSplit):
        inner2_rates(p, SplitParams(0.3, 0.0, 0.5))
    q0 = GaussianChannelParams(1, 1, 0, 1.5, 1, 1)
    with pytest.raises(InvalidSplit):
        outer2_rates(q0, SplitParams(0.0, 0.3, 0.5))
    with pytest.raises(InvalidSplit):       # more than the private power
        inner2_rates(FIG2, SplitParams(0.6, 0.0, 0.9))


def test_case_classification():
    assert classify_case(FIG2) is CaseTag.ABOVE_ONE
    assert classify_case(GaussianChannelParams(1, 1, 1, -1.0, 0, 0)) is CaseTag.AT_MOST_ONE
    with pytest.raises(CaseMismatch):
        inner2_rates(FIG3, SplitParams(0, 0, 1.0))
    inner2_rates(FIG3, SplitParams(0, 0, 1.0), strict=False)
    with pytest.raises(CaseMismatch):
        inner1a_rates(FIG2, SplitParams(0, 0, 0.5, 0.5))


def test_stateless_point_values():
    # Q = 0, rho = 0, whole power private: textbook Gaussian MAC quantities
    p = GaussianChannelParams(1, 2, 0, 1.5, 0.5, 0.9)
    v = inner2_rates(p, SplitParams(0, 0, 2.0))
    assert v.r2 == pytest.approx(c(2.0), abs=1e-12)
    assert v.r12_z == pytest.approx(c(0.25 + 2.0), abs=1e-12)
    assert v.r12_y == pytest.approx(c(1 + 2.25 * 2.0), abs=1e-12)


def test_dirty_paper_removes_state():
    # a strong state costs receiver 2 nothing when X2 is fully dirty-paper coded
    for q in (0.0, 1.0, 50.0):
        p = GaussianChannelParams(1, 1, q, 1.5, 0.0, 3.0)
        assert outer2_rates(p, SplitParams(0, 0, 1.0)).r2 == pytest.approx(c(1.0), abs=1e-12)
        assert inner2_rates(p, SplitParams(0, 0, 1.0)).r2 == pytest.approx(c(1.0), abs=1e-12)


def test_reported_dpc_coefficient_is_the_corrected_one():
    p = GaussianChannelParams(1, 1, 1, 0.5, 0.3, 0.9)
    sp = SplitParams(0.0, 0.2, 0.48, 0.48)
    d = inner1a_rates(p, sp).dpc
    alpha_over_a = 0.5 * 0.48 / (0.25 * 0.96 + 1)
    assert d.alpha == pytest.approx(0.5 * alpha_over_a)
    assert d.rho2s1 == pytest.approx(alpha_over_a * (1 + 0.5 * 0.2))


# -- envelope -----------------------------------------------------------------

boxes = st.lists(st.tuples(st.floats(0, 2), st.floats(0, 2), st.floats(0, 3)), min_size=1, max_size=10)


@given(boxes, st.booleans())
def test_envelope_matches_polygon_union(polys, quantize):
    A, B, C = (np.array(col) for col in zip(*polys))
    if quantize:                      # exercise exact ties
        A, B, C = (np.round(v * 4) / 4 for v in (A, B, C))
    A, B = np.minimum(A, C), np.minimum(B, C)
    C = np.minimum(C, A + B)
    x, y, _, es = pareto_envelope(A, B, C)
    assert np.all(np.diff(x) > 0) and np.all(np.diff(y) < 0)
    for q in np.linspace(0, A.max(), 41):
        assert envelope_at(x, y, es, q) == pytest.approx(polygon_max(A, B, C, q), abs=1e-12)


def test_staircase_misses_slanted_edge():
    # one polygon with a slope -1 face: the staircase through its two corners
    # underestimates the midpoint of that face
    A, B, C = np.array([1.0]), np.array([1.0]), np.array([1.5])
    x, y, _, es = pareto_envelope(A, B, C)
    assert list(x) == [0.5, 1.0] and list(y) == [1.0, 0.5]
    assert envelope_at(x, y, es, 0.75) == pytest.approx(0.75)
    assert y[np.searchsorted(x, 0.75)] == 0.5


# -- frontiers ----------------------------------------------------------------

@pytest.fixture(scope="module")
def fig2_inner():
    return frontier(FIG2, "inner2", COARSE)


def test_frontier_is_pareto(fig2_inner):
    x, y = fig2_inner.r1s(), fig2_inner.r2s()
    assert len(x) > 3
    assert np.all(np.diff(x) > 0) and np.all(np.diff(y) < 0)
    # every vertex is achieved by the split stored with it
    for pt in fig2_inner.points:
        v = inner2_rates(FIG2, pt.split)
        assert pt.rate.r2 <= v.r2 + 1e-12
        assert pt.rate.r1 + pt.rate.r2 <= min(v.r12_z, v.r12_y) + 1e-12


def test_frontier_csv_and_json(fig2_inner):
    text = fig2_inner.to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "r1_bits,r2_bits,rho21,rho2s,p2_prime,p2_dprime,bound_id,certified"
    assert len(lines) == len(fig2_inner.points) + 1
    first = lines[1].split(",")
    assert float(first[0]) == fig2_inner.points[0].rate.r1
    nats = fig2_inner.to_csv(nats=True).split("\n")
    assert nats[0].startswith("r1_nats,r2_nats")
    assert float(nats[1].split(",")[1]) == pytest.approx(fig2_inner.points[0].rate.r2 * math.log(2))
    back = RateFrontier.from_json(fig2_inner.to_json())
    assert back == fig2_inner
    json.loads(fig2_inner.to_json())


def test_inner_inside_outer_fig2(fig2_inner):
    outer = frontier(FIG2, "outer2", COARSE, seeds=[p.split for p in fig2_inner.points])
    for p in fig2_inner.points:
        assert outer.dominates(p.rate.r1, p.rate.r2, 1e-9)


def test_frontier_errors():
    with pytest.raises(CaseMismatch):
        frontier(FIG3, "inner2", COARSE)
    with pytest.raises(ValidationError):
        frontier(FIG2, "nope", COARSE)
    with pytest.raises(ValidationError):
        GridSpec(n_rho=1)


def test_zero_power_collapses_axes():
    p = GaussianChannelParams(0, 1, 0, 1.5, 1, 1)
    fr = frontier(p, "inner2", COARSE)
    assert all(pt.split.rho21 == 0 and pt.split.rho2s == 0 for pt in fr.points)
    # W1 still reaches receiver 1 through the cognitive transmitter
    assert fr.points[-1].rate.r1 > 0


def test_capacity_assertions():
    with pytest.raises(MissingAssertion):
        capacity_region(FIG3, None, COARSE)
    with pytest.raises(CaseMismatch):
        capacity_region(FIG2, "Cond7", COARSE)
    with pytest.raises(ValidationError):
        capacity_region(FIG2, "Cond9", COARSE)
    fr = capacity_region(FIG2, "8", COARSE)
    assert fr.metadata["theorem"] == "thm7" and all(p.certified for p in fr.points)
    assert capacity_region(FIG3, None, COARSE, state_at_rx2=True).metadata["theorem"] == "thm14"


# -- certification ------------------------------------------------------------

def test_certification_respects_case():
    assert certify_case2(FIG3, COARSE) == []
    assert certify_case1a(FIG2, COARSE) == []


def test_certified_points_on_both_frontiers():
    pts = certify_case2(FIG2, COARSE)
    assert pts and all(p.certified and p.theorem == "thm6" for p in pts)
    fo = frontier(FIG2, "outer2", COARSE, seeds=[p.split for p in pts])
    for p in pts:
        v = inner2_rates(FIG2, p.split)
        assert p.rate.r2 <= v.r2 + 1e-9 and p.rate.r1 + p.rate.r2 <= min(v.r12_z, v.r12_y) + 1e-9
        assert fo.max_r2(p.rate.r1) == pytest.approx(p.rate.r2, abs=5e-3)

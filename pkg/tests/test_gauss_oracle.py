import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cogstate.crosscheck import SCHEME_FORMS, oracle_sweep, random_draw, scheme_error
from cogstate.errors import SingularCovariance
from cogstate.gauss_oracle import (BASE, SCHEMES, CovarianceModel, SchemeSpec, build_model, crosscheck,
                                   eval_expression, gaussian_mi, oracle_values)
from cogstate.gaussian_regions import GaussianChannelParams, SplitParams
from cogstate.gaussian_regions.closed_forms import inner1a_arrays
from cogstate.infoexpr import parse_expr


def unit(name):
    v = np.zeros(len(BASE))
    v[BASE.index(name)] = 1.0
    return v


def toy(p=2.0):
    rows = {n: unit(n) for n in BASE}
    rows["Y"] = unit("X1") + unit("N1")
    rows["Y2"] = unit("X1") + unit("X2p") + unit("N1")
    return CovarianceModel(np.array([p, 1.0, 1.0, 1.0, 1.0, 1.0]), rows)


def test_scalar_awgn():
    m = toy(2.0)
    assert gaussian_mi(m, ["X1"], ["Y"]) == pytest.approx(0.5 * math.log2(3.0), abs=1e-14)
    # conditioning removes interference: I(X2';Y2|X1) = 1/2 log(1 + 1)
    assert gaussian_mi(m, ["X2p"], ["Y2"], ["X1"]) == pytest.approx(0.5, abs=1e-14)
    assert gaussian_mi(m, ["X1"], ["N2"]) == 0.0
    assert gaussian_mi(m, ["X1"], ["Y"], ["X1"]) == 0.0


def test_chain_rule():
    m = toy(1.7)
    lhs = gaussian_mi(m, ["X1", "X2p"], ["Y2"])
    rhs = gaussian_mi(m, ["X1"], ["Y2"]) + gaussian_mi(m, ["X2p"], ["Y2"], ["X1"])
    assert lhs == pytest.approx(rhs, abs=1e-13)


def test_noiseless_dependence_is_unbounded():
    m = toy()
    with pytest.raises(SingularCovariance):
        gaussian_mi(m, ["X1"], ["X1"])


def test_entropy_atoms_rejected():
    with pytest.raises(ValueError):
        eval_expression(toy(), parse_expr("H(X1)"))


def test_unknown_scheme_and_keys():
    p = GaussianChannelParams(1, 1, 1, 1.5, 1, 1)
    with pytest.raises(ValueError):
        SchemeSpec("Prop9", p, SplitParams(0, 0, 1.0))
    with pytest.raises(KeyError):
        crosscheck(SchemeSpec("Prop1", p, SplitParams(0, 0, 1.0)), {"nonsense": 0.0})


@pytest.mark.parametrize("scheme", SCHEMES)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_closed_forms_match_oracle(scheme, seed):
    rng = np.random.default_rng(seed)
    p, sp = random_draw(rng, SCHEME_FORMS[scheme][1])
    assert scheme_error(scheme, p, sp) < 1e-9


@pytest.mark.parametrize("scheme", SCHEMES)
def test_degenerate_corners(scheme):
    layout = SCHEME_FORMS[scheme][1]
    for p in (GaussianChannelParams(1, 1, 0, 0.0, 0, 0), GaussianChannelParams(0, 2, 1, 1.0, 1, 1)):
        split = {"single": (1.0 * p.p2, 0.0), "equality": (p.p2 / 2, p.p2 / 2),
                 "prime": (p.p2 / 2, 0.0), "dprime": (p.p2 / 2, p.p2 / 2)}[layout]
        assert scheme_error(scheme, p, SplitParams(0.0, 0.0, *split)) < 1e-9


def test_printed_y_targeted_coefficient_disagrees():
    """The T-layer coefficient alpha (sqrt Q + a rho2s sqrt P2) as printed is a
    times too large; only the corrected one reproduces the closed-form R1."""
    p = GaussianChannelParams(1.0, 1.5, 0.8, 0.6, 0.4, 0.9)
    sp = SplitParams(0.2, 0.3, 0.6, 0.705)
    spec = SchemeSpec("Prop3", p, sp)
    closed = float(inner1a_arrays(p, sp.rho21, sp.rho2s, sp.p2_prime, sp.p2_dprime)["r1"])
    r1 = parse_expr("I(X1,T;Y) - I(T;S|X1)")
    good = build_model(spec)
    assert eval_expression(good, r1) == pytest.approx(closed, abs=1e-12)
    bad = build_model(spec)
    bad.rows["T"] = bad.rows["X2p"] + p.a * good.coefficients["t_state"] * bad.rows["S"]
    assert abs(eval_expression(bad, r1) - closed) > 1e-3


def test_oracle_values_keys():
    p = GaussianChannelParams(1, 1, 1, 0.8, 0.85, 0.9)
    vals = oracle_values(SchemeSpec("Thm14", p, SplitParams(0, 0, 0.5, 0.5)))
    assert set(vals) == {"r1", "r2", "r12"}


def test_sweep_small():
    worst = oracle_sweep(draws=20, seed=3)
    assert set(worst) == set(SCHEMES) and max(worst.values()) < 1e-9

"""Boundary certification for the Gaussian channel.

Each routine scans the power split on the grid, finds the correlation pair
maximizing the relevant bound for that split, and emits the induced rate pair
when the achievability predicate holds.  A point is certified only when every
bound value it uses is nonnegative.

Argmax ties are broken by the smallest (|rho21|, |rho2s|), lexicographically.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import closed_forms as cf
from .frontier import FrontierPoint, GridSpec, disk_grid, pattern_search
from .params import CaseTag, GaussianChannelParams, RatePair, SplitParams, classify_case

TIE_TOL = 1e-12
PRED_TOL = 1e-12


def _levels(p: GaussianChannelParams, grid: GridSpec) -> np.ndarray:
    if p.p2 == 0:
        return np.zeros(1)
    return np.linspace(0.0, p.p2, grid.n_split)


def _argmax_by_level(p: GaussianChannelParams, objective: Callable, levels: np.ndarray,
                     grid: GridSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per level, the (rho21, rho2s) maximizing ``objective`` on the disk
    rho21^2 + rho2s^2 <= 1 - level/P2, refined by pattern search.

    ``objective(r21, r2s, level)`` is vectorized.
    """
    r21, r2s = disk_grid(p, grid.n_rho)
    rad2 = np.ones_like(levels) if p.p2 == 0 else np.clip(1.0 - levels / p.p2, 0.0, 1.0)
    rho2 = r21 ** 2 + r2s ** 2
    b21 = np.zeros(len(levels))
    b2s = np.zeros(len(levels))
    for j, lv in enumerate(levels):
        ok = rho2 <= rad2[j] + 1e-12
        if not ok.any():            # only the origin survives
            continue
        v = objective(r21[ok], r2s[ok], np.full(int(ok.sum()), lv))
        top = np.max(v)
        tied = np.nonzero(v >= top - TIE_TOL * max(1.0, abs(top)))[0]
        # smallest (|rho21|, |rho2s|); then by value for determinism
        t = tied[np.lexsort((r2s[ok][tied], r21[ok][tied], np.abs(r2s[ok][tied]), np.abs(r21[ok][tied])))[0]]
        b21[j], b2s[j] = r21[ok][t], r2s[ok][t]
    if grid.refine_rounds > 0:
        def obj(x21, x2s, lv, ids):
            return objective(x21, x2s, lv)
        b21, b2s, _ = pattern_search(obj, b21, b2s, levels, rad2, 2.0 / (grid.n_rho - 1), grid,
                                     p.p1 == 0, p.q == 0)
    return b21, b2s, objective(b21, b2s, levels)


def _point(r1, r2, sp: SplitParams, bound_id: str, theorem: str) -> FrontierPoint:
    return FrontierPoint(RatePair(float(r1), float(r2)), sp, bound_id, True, theorem)


def _nonneg(*vals) -> bool:
    return all(float(v) >= -PRED_TOL for v in vals)


def certify_case2(params: GaussianChannelParams, grid: GridSpec | None = None) -> list[FrontierPoint]:
    """Certified boundary points for |a| > 1 (inner2 against outer2).

    For each P2' the sum bound r12 (receiver 2) is maximized over the
    correlations; the point (r12* - r2(P2'), r2(P2')) is emitted when the
    receiver-1 sum bound at the argmax is no smaller.  The top edge
    R2 = r2(P2) is added over the R1 range where the rho = 0 split achieves it.
    """
    grid = grid or GridSpec()
    p = params
    if classify_case(p) is not CaseTag.ABOVE_ONE:
        return []
    levels = _levels(p, grid)

    def r12(r21, r2s, lv):
        return cf.inner2_arrays(p, r21, r2s, lv)["r12_z"]

    b21, b2s, best = _argmax_by_level(p, r12, levels, grid)
    v = cf.inner2_arrays(p, b21, b2s, levels)
    out = []
    for j, lv in enumerate(levels):
        r2, s, s_y = v["r2"][j], best[j], v["r12_y"][j]
        r1 = s - r2
        if s <= s_y + PRED_TOL and _nonneg(r2, s, s_y, r1):
            out.append(_point(max(r1, 0.0), r2, SplitParams(float(b21[j]), float(b2s[j]), float(lv)),
                              "inner2", "thm6"))
    # second statement: P2' = P2 at rho = 0
    z = cf.inner2_arrays(p, 0.0, 0.0, p.p2)
    r2top = float(z["r2"])
    r1max = min(float(z["r12_z"]), float(z["r12_y"])) - r2top
    if _nonneg(r2top, r1max, z["r12_z"], z["r12_y"]):
        sp = SplitParams(0.0, 0.0, p.p2)
        out.append(_point(0.0, r2top, sp, "inner2", "thm6"))
        out.append(_point(r1max, r2top, sp, "inner2", "thm6"))
    return _sorted_unique(out)


def certify_case1a(params: GaussianChannelParams, grid: GridSpec | None = None) -> list[FrontierPoint]:
    """Certified boundary points for |a| <= 1 from inner1a against outer1a.

    For each P2'' the R1 bound r1' is maximized over the correlations (P2'
    takes the rest of the private power); the point (r1'*, r2'(P2'')) is
    emitted when it also satisfies the second R2 bound and the sum bound.
    """
    grid = grid or GridSpec()
    p = params
    if classify_case(p) is not CaseTag.AT_MOST_ONE:
        return []
    levels = _levels(p, grid)

    def split(r21, r2s, lv):
        full = cf.full_private(p, r21, r2s)
        pp = np.minimum(lv, full)
        return full - pp, pp

    def r1(r21, r2s, lv):
        pp, ppp = split(r21, r2s, lv)
        return cf.inner1a_arrays(p, r21, r2s, pp, ppp)["r1"]

    b21, b2s, best = _argmax_by_level(p, r1, levels, grid)
    pp, ppp = split(b21, b2s, levels)
    v = cf.inner1a_arrays(p, b21, b2s, pp, ppp)
    out = []
    for j in range(len(levels)):
        x, y = best[j], v["r2a"][j]
        ok = (y <= v["r2b"][j] + PRED_TOL and x + y <= v["r12"][j] + PRED_TOL
              and _nonneg(x, y, v["r2b"][j], v["r12"][j]))
        if ok:
            sp = SplitParams(float(b21[j]), float(b2s[j]), float(pp[j]), float(ppp[j]))
            out.append(_point(x, y, sp, "inner1a", "thm8"))
    return _sorted_unique(out)


def certify_case1b(params: GaussianChannelParams, grid: GridSpec | None = None) -> list[FrontierPoint]:
    """Certified boundary points for |a| <= 1 from inner1b against outer1b.

    For each P2'' the sum bound r12'' is maximized over correlations with
    P2'' <= (1 - rho^2) P2; P2' takes the remaining power.  The point
    (r12* - r2''(P2''), r2''(P2'')) is emitted when the R1 bound allows it.
    The top edge R2 = r2''(P2) is added as in the |a| > 1 case.
    """
    grid = grid or GridSpec()
    p = params
    if classify_case(p) is not CaseTag.AT_MOST_ONE:
        return []
    levels = _levels(p, grid)

    def r12(r21, r2s, lv):
        full = cf.full_private(p, r21, r2s)
        return cf.inner1b_arrays(p, r21, r2s, full - np.minimum(lv, full), np.minimum(lv, full))["r12"]

    b21, b2s, best = _argmax_by_level(p, r12, levels, grid)
    full = cf.full_private(p, b21, b2s)
    ppp = np.minimum(levels, full)
    pp = full - ppp
    v = cf.inner1b_arrays(p, b21, b2s, pp, ppp)
    out = []
    for j in range(len(levels)):
        y = v["r2"][j]
        x = best[j] - y
        if x <= v["r1"][j] + PRED_TOL and _nonneg(x, y, best[j], v["r1"][j]):
            sp = SplitParams(float(b21[j]), float(b2s[j]), float(pp[j]), float(ppp[j]))
            out.append(_point(max(x, 0.0), y, sp, "inner1b", "thm9"))
    # second statement: P2'' = P2 with rho = 0 and P2' = 0
    z = cf.inner1b_arrays(p, 0.0, 0.0, 0.0, p.p2)
    r2top = float(z["r2"])
    r1max = min(float(z["r1"]), float(z["r12"]) - r2top)
    if _nonneg(r2top, r1max, z["r1"], z["r12"]):
        sp = SplitParams(0.0, 0.0, 0.0, p.p2)
        out.append(_point(0.0, r2top, sp, "inner1b", "thm9"))
        out.append(_point(r1max, r2top, sp, "inner1b", "thm9"))
    return _sorted_unique(out)


def _sorted_unique(pts: list[FrontierPoint]) -> list[FrontierPoint]:
    pts = sorted(pts, key=lambda q: (q.rate.r1, q.rate.r2))
    out: list[FrontierPoint] = []
    for q in pts:
        if out and abs(out[-1].rate.r1 - q.rate.r1) < 1e-15 and abs(out[-1].rate.r2 - q.rate.r2) < 1e-15:
            continue
        out.append(q)
    return out

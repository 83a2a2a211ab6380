"""Weighted-sum optimization of a bound over quantized auxiliary laws.

The searched joints are P(x1) P(s) P(aux, x2 | x1, s) with every factor on a
denominator-k simplex grid.  Small searches are exhaustive (batched); larger
ones use seeded restarts with a moves-of-one-quantum coordinate ascent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from ..errors import InfeasibleCaps, ValidationError
from .bounds import (RegionIneqs, eval_cor1_inner, eval_thm13_capacity, eval_thm1_inner,
                     eval_thm2_outer, eval_thm3, eval_thm4_capacity, eval_thm5_capacity)
from .channel import DiscreteChannelSpec
from .joint import JointDistribution, from_factors

BIG = 1e9        # stand-in for an absent bound (bits)


def _cap_plus1(sz):
    return sz["X1"] * sz["X2"] * sz["S"] + 1


def _cap(sz):
    return sz["X1"] * sz["X2"] * sz["S"]


@dataclass(frozen=True)
class BoundInfo:
    aux: tuple[str, ...]
    caps: dict                       # aux -> function(sizes) -> cap
    needs_channel: bool = False
    validity: bool = False           # inner bounds carry a validity flag


BOUND_INFO = {
    "thm1": BoundInfo(("T", "U", "V"), {a: _cap_plus1 for a in "TUV"}, validity=True),
    "cor1": BoundInfo(("T", "V"), {a: _cap_plus1 for a in "TV"}, validity=True),
    "thm2": BoundInfo(("T", "U", "V"), {a: _cap_plus1 for a in "TUV"}),
    "thm3_inner": BoundInfo(("T", "V"), {a: _cap_plus1 for a in "TV"}, True, True),
    "thm3_outer": BoundInfo(("T", "V"), {a: _cap_plus1 for a in "TV"}, True),
    "thm4": BoundInfo(("T",), {"T": _cap_plus1}, True),
    "thm5": BoundInfo(("U",), {"U": _cap}),
    "thm13": BoundInfo(("U",), {"U": _cap_plus1}),
}


@dataclass(frozen=True)
class SearchSpec:
    denominator: int = 4
    aux_sizes: dict | None = None          # default: smallest of cap and 2
    exhaustive_limit: int = 2_000_000
    restarts: int = 8
    local_denominator: int = 16
    max_steps: int = 200
    seed: int = 0
    batch: int = 16384


@dataclass
class OptimizeResult:
    value: float
    joint: JointDistribution | None
    rates: tuple[float, float]
    evaluated: int
    mode: str
    aux_sizes: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# simplex grids

def compositions(cells: int, k: int) -> np.ndarray:
    """All vectors of ``cells`` nonnegative integers summing to ``k``, lexicographic."""
    if cells == 1:
        return np.array([[k]])
    out = []
    for first in range(k, -1, -1):
        rest = compositions(cells - 1, k - first)
        out.append(np.hstack([np.full((len(rest), 1), first), rest]))
    return np.vstack(out)


def grid_size(cells: int, k: int) -> int:
    return comb(k + cells - 1, cells - 1)


# ---------------------------------------------------------------------------

def _region(channel, bound_id, joint) -> RegionIneqs:
    if bound_id == "thm1":
        return eval_thm1_inner(joint, check=False)
    if bound_id == "cor1":
        return eval_cor1_inner(joint, check=False)
    if bound_id == "thm2":
        return eval_thm2_outer(joint, check=False)
    if bound_id == "thm3_inner":
        return eval_thm3(joint, channel, check=False)["inner"]
    if bound_id == "thm3_outer":
        return eval_thm3(joint, channel, check=False)["outer"]
    if bound_id == "thm4":
        return eval_thm4_capacity(joint, channel, check=False)
    if bound_id == "thm5":
        return eval_thm5_capacity(joint, asserted=True, check=False)
    if bound_id == "thm13":
        return eval_thm13_capacity(joint, check=False)
    raise ValidationError(f"unknown bound {bound_id!r}; choose from {sorted(BOUND_INFO)}")


def weighted_value(reg: RegionIneqs, w1: float, w2: float, use_validity: bool):
    """max w1 R1 + w2 R2 over the region's polygon (vectorized; -inf if empty)."""
    A, B, C = (np.nan_to_num(np.asarray(v, dtype=float), posinf=BIG) for v in reg.caps())
    A, B, C = np.broadcast_arrays(A, B, C)
    empty = (A < 0) | (B < 0) | (C < 0)
    A1, B1 = np.minimum(A, C), np.minimum(B, C)
    verts = [(A1, np.minimum(B1, C - A1)), (np.minimum(A1, C - B1), B1), (A1, 0 * A1), (0 * B1, B1)]
    vals = np.stack([w1 * x + w2 * y for x, y in verts])
    best = np.argmax(vals, axis=0)
    val = np.take_along_axis(vals, best[None], 0)[0]
    r1 = np.choose(best, [v[0] for v in verts])
    r2 = np.choose(best, [v[1] for v in verts])
    val = np.maximum(val, 0.0)                # the origin is always a vertex
    bad = empty
    if use_validity and "valid" in reg.flags:
        bad = bad | ~np.asarray(reg.flags["valid"], dtype=bool)
    val = np.where(bad, -np.inf, val)
    return val, np.where(bad, np.nan, np.maximum(r1, 0)), np.where(bad, np.nan, np.maximum(r2, 0))


def _resolve_sizes(channel, bound_id, search: SearchSpec) -> dict:
    info = BOUND_INFO[bound_id]
    sz = channel.sizes
    out = {}
    for a in info.aux:
        cap = info.caps[a](sz)
        want = (search.aux_sizes or {}).get(a, min(cap, 2))
        if not 1 <= int(want) <= cap:
            raise InfeasibleCaps(f"|{a}| = {want} violates the cardinality cap 1..{cap} for {bound_id}")
        out[a] = int(want)
    extra = set(search.aux_sizes or {}) - set(info.aux)
    if extra:
        raise InfeasibleCaps(f"{bound_id} has no auxiliary {sorted(extra)}")
    return out


def optimize_region(channel: DiscreteChannelSpec, bound_id: str, weight=(1.0, 1.0),
                    search: SearchSpec | None = None) -> OptimizeResult:
    search = search or SearchSpec()
    if bound_id not in BOUND_INFO:
        raise ValidationError(f"unknown bound {bound_id!r}; choose from {sorted(BOUND_INFO)}")
    if search.denominator < 1 or search.local_denominator < 1:
        raise ValidationError("denominators must be positive")
    w1, w2 = (float(x) for x in weight)
    if w1 < 0 or w2 < 0:
        raise ValidationError("weights must be nonnegative")
    info = BOUND_INFO[bound_id]
    sizes = _resolve_sizes(channel, bound_id, search)
    if bound_id in ("thm4", "thm3_inner", "thm3_outer"):
        # channel conditions do not depend on the joint; check them once
        pj = _point_joint(channel, info.aux, sizes)
        if bound_id == "thm4":
            eval_thm4_capacity(pj, channel)
        else:
            eval_thm3(pj, channel)
    sz = channel.sizes
    A = int(np.prod([sizes[a] for a in info.aux])) if info.aux else 1
    cells = A * sz["X2"]
    blocks = sz["X1"] * sz["S"]
    k = search.denominator
    total = grid_size(sz["X1"], k) * grid_size(cells, k) ** blocks
    if w1 == 0 and w2 == 0:
        return OptimizeResult(0.0, None, (0.0, 0.0), 0, "trivial", sizes)
    if total <= search.exhaustive_limit:
        return _exhaustive(channel, bound_id, (w1, w2), sizes, k, search.batch, info)
    return _local(channel, bound_id, (w1, w2), sizes, search, info)


def _point_joint(channel, aux, sizes):
    sz = channel.sizes
    A = int(np.prod([sizes[a] for a in aux])) if aux else 1
    kern = np.full((sz["X1"], sz["S"], A, sz["X2"]), 1.0 / (A * sz["X2"]))
    return from_factors(channel, np.full(sz["X1"], 1.0 / sz["X1"]), kern, aux, [sizes[a] for a in aux])


def _evaluate_batch(channel, bound_id, px1, kern, aux, sizes, w, info):
    j = from_factors(channel, px1, kern, aux, [sizes[a] for a in aux])
    reg = _region(channel, bound_id, j)
    val, r1, r2 = weighted_value(reg, w[0], w[1], info.validity)
    return np.atleast_1d(val), np.atleast_1d(r1), np.atleast_1d(r2), j


def _exhaustive(channel, bound_id, w, sizes, k, batch, info):
    sz = channel.sizes
    aux = info.aux
    A = int(np.prod([sizes[a] for a in aux])) if aux else 1
    cells = A * sz["X2"]
    blocks = sz["X1"] * sz["S"]
    gx = compositions(sz["X1"], k) / k
    gk = compositions(cells, k) / k
    nx, nk = len(gx), len(gk)
    total = nx * nk ** blocks
    best = (-np.inf, -1, 0.0, 0.0)
    for lo in range(0, total, batch):
        idx = np.arange(lo, min(lo + batch, total))
        ix = idx // nk ** blocks
        rem = idx % nk ** blocks
        ks = []
        for _ in range(blocks):
            ks.append(rem % nk)
            rem = rem // nk
        kern = np.stack([gk[i] for i in ks[::-1]], axis=1)           # (n, blocks, cells)
        kern = kern.reshape(len(idx), sz["X1"], sz["S"], A, sz["X2"])
        val, r1, r2, _ = _evaluate_batch(channel, bound_id, gx[ix], kern, aux, sizes, w, info)
        i = int(np.argmax(val))
        if val[i] > best[0]:
            best = (float(val[i]), int(idx[i]), float(r1[i]), float(r2[i]))
    if best[1] < 0:
        return OptimizeResult(-np.inf, None, (np.nan, np.nan), total, "exhaustive", sizes)
    joint = _joint_at(channel, best[1], gx, gk, blocks, A, aux, sizes)
    return OptimizeResult(best[0], joint, (best[2], best[3]), total, "exhaustive", sizes)


def _joint_at(channel, flat, gx, gk, blocks, A, aux, sizes):
    sz = channel.sizes
    nk = len(gk)
    ix = flat // nk ** blocks
    rem = flat % nk ** blocks
    ks = []
    for _ in range(blocks):
        ks.append(rem % nk)
        rem //= nk
    kern = np.stack([gk[i] for i in ks[::-1]]).reshape(sz["X1"], sz["S"], A, sz["X2"])
    return from_factors(channel, gx[ix], kern, aux, [sizes[a] for a in aux])


def _local(channel, bound_id, w, sizes, search: SearchSpec, info):
    """Seeded restarts; each step moves one quantum of mass inside one simplex."""
    sz = channel.sizes
    aux = info.aux
    A = int(np.prod([sizes[a] for a in aux])) if aux else 1
    cells = A * sz["X2"]
    k = search.local_denominator
    rng = np.random.default_rng(search.seed)
    # state: counts for P(x1) and for each (x1, s) block
    blocks = sz["X1"] * sz["S"]

    def moves(cx, ck):
        out = []
        for i in range(len(cx)):
            for j in range(len(cx)):
                if i != j and cx[i] > 0:
                    nx = cx.copy(); nx[i] -= 1; nx[j] += 1
                    out.append((nx, ck))
        for b in range(blocks):
            for i in range(cells):
                if ck[b, i] == 0:
                    continue
                for j in range(cells):
                    if i != j:
                        nk_ = ck.copy(); nk_[b, i] -= 1; nk_[b, j] += 1
                        out.append((cx, nk_))
        return out

    def score(states):
        px1 = np.array([s[0] for s in states]) / k
        kern = (np.array([s[1] for s in states]) / k).reshape(len(states), sz["X1"], sz["S"], A, sz["X2"])
        return _evaluate_batch(channel, bound_id, px1, kern, aux, sizes, w, info)

    best_val, best_state, best_r = -np.inf, None, (np.nan, np.nan)
    evaluated = 0
    for _ in range(search.restarts):
        cx = rng.multinomial(k, np.full(sz["X1"], 1.0 / sz["X1"]))
        ck = rng.multinomial(k, np.full(cells, 1.0 / cells), size=blocks)
        val, r1, r2, _ = score([(cx, ck)])
        cur, cur_r = float(val[0]), (float(r1[0]), float(r2[0]))
        evaluated += 1
        for _step in range(search.max_steps):
            cand = moves(cx, ck)
            if not cand:
                break
            v, a1, a2, _ = score(cand)
            evaluated += len(cand)
            i = int(np.argmax(v))
            if v[i] <= cur + 1e-12:
                break
            cx, ck = cand[i]
            cur, cur_r = float(v[i]), (float(a1[i]), float(a2[i]))
        if cur > best_val:
            best_val, best_state, best_r = cur, (cx.copy(), ck.copy()), cur_r
    joint = None
    if best_state is not None:
        kern = (best_state[1] / k).reshape(sz["X1"], sz["S"], A, sz["X2"])
        joint = from_factors(channel, best_state[0] / k, kern, aux, [sizes[a] for a in aux])
    return OptimizeResult(best_val, joint, best_r, evaluated, "local", sizes)

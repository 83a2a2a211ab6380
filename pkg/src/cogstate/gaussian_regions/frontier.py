"""Frontier sweeps over the split parameters.

At every split the bounds cut out a polygon

    {R1 <= A, R2 <= B, R1 + R2 <= C, R >= 0},

and a bound's region is the union of these polygons over all feasible
splits.  The frontier is the Pareto boundary of that union.  Its edges are
horizontal, vertical or of slope -1, so it is stored exactly as its Pareto
vertices plus, per vertex, the sum R1 + R2 of the slope -1 edge leaving it to
the right (if any).  Between vertices i-1 and i the boundary is
max(y_i, edge_sum_{i-1} - R1).
"""

from __future__ import annotations

import heapq
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import CaseMismatch, EmptyRegion, MissingAssertion, ValidationError
from . import closed_forms as cf
from .params import CaseTag, GaussianChannelParams, RatePair, SplitParams, classify_case

LN2 = math.log(2.0)
CSV_HEADER = "r1_bits,r2_bits,rho21,rho2s,p2_prime,p2_dprime,bound_id,certified"
SUM_TOL = 1e-12


@dataclass(frozen=True)
class BoundSpec:
    fn: Callable
    level: str                    # prime | equality | dprime | none
    r1_keys: tuple[str, ...] = ()
    r2_keys: tuple[str, ...] = ()
    sum_keys: tuple[str, ...] = ()
    case: CaseTag | None = None


BOUNDS: dict[str, BoundSpec] = {
    "inner2": BoundSpec(cf.inner2_arrays, "prime", (), ("r2",), ("r12_z", "r12_y"), CaseTag.ABOVE_ONE),
    "outer2": BoundSpec(cf.outer2_arrays, "prime", (), ("r2",), ("r12",)),
    "inner1a": BoundSpec(cf.inner1a_arrays, "equality", ("r1",), ("r2a", "r2b"), ("r12",), CaseTag.AT_MOST_ONE),
    "inner1b": BoundSpec(cf.inner1b_arrays, "equality", ("r1",), ("r2",), ("r12",), CaseTag.AT_MOST_ONE),
    "outer1a": BoundSpec(cf.outer1a_arrays, "equality", ("r1",), ("r2",), ("r12",), CaseTag.AT_MOST_ONE),
    "outer1b": BoundSpec(cf.outer1b_arrays, "dprime", (), ("r2",), ("r12",)),
    "thm7": BoundSpec(cf.thm7_arrays, "none", (), ("r2",), ("r12",), CaseTag.ABOVE_ONE),
    "thm10": BoundSpec(cf.thm10_arrays, "equality", ("r1",), ("r2",), (), CaseTag.AT_MOST_ONE),
    "thm12": BoundSpec(cf.thm12_arrays, "equality", ("r1",), ("r2",), (), CaseTag.AT_MOST_ONE),
    "thm14": BoundSpec(cf.outer1a_arrays, "equality", ("r1",), ("r2",), ("r12",), CaseTag.AT_MOST_ONE),
    "thm15": BoundSpec(cf.thm15_arrays, "none", (), ("r2",), ("r12a", "r12b"), CaseTag.ABOVE_ONE),
}

# inner bound -> outer bound evaluated at the same split
MATCHING_OUTER = {"inner2": "outer2", "inner1a": "outer1a", "inner1b": "outer1b"}


@dataclass(frozen=True)
class GridSpec:
    n_rho: int = 129
    n_split: int = 65
    refine_rounds: int = 3
    shrink: float = 0.25
    refine_iters: int = 12

    def __post_init__(self):
        if self.n_rho < 2 or self.n_split < 2:
            raise ValidationError("grid resolutions must be at least 2 per axis")
        if not 0 < self.shrink < 1:
            raise ValidationError("shrink factor must lie in (0, 1)")


@dataclass(frozen=True)
class FrontierPoint:
    rate: RatePair
    split: SplitParams
    bound_id: str
    certified: bool = False
    theorem: str | None = None
    edge_sum: float | None = None  # boundary leaves to the right along R1 + R2 = edge_sum


@dataclass(frozen=True)
class RateFrontier:
    points: tuple[FrontierPoint, ...]
    metadata: dict = field(default_factory=dict, compare=True)

    # -- geometry ---------------------------------------------------------
    def r1s(self) -> np.ndarray:
        return np.array([p.rate.r1 for p in self.points])

    def r2s(self) -> np.ndarray:
        return np.array([p.rate.r2 for p in self.points])

    def edge_sums(self) -> np.ndarray:
        return np.array([np.nan if p.edge_sum is None else p.edge_sum for p in self.points])

    def max_r2(self, r1: float) -> float:
        """Largest R2 in the region at rate ``r1``; ``-inf`` beyond the R1 range."""
        return envelope_at(self.r1s(), self.r2s(), self.edge_sums(), r1)

    def dominates(self, r1: float, r2: float, tol: float = 1e-9) -> bool:
        """True if (r1, r2) lies in the region up to ``tol`` in each coordinate."""
        x, y = self.r1s(), self.r2s()
        if len(x) == 0 or r1 > x[-1] + tol:
            return False
        q = min(max(r1 - tol, 0.0), float(x[-1]))
        return r2 <= envelope_at(x, y, self.edge_sums(), q) + tol

    def staircase_dominates(self, r1: float, r2: float, tol: float = 1e-9) -> bool:
        """Plain upper-right dominance by a single stored vertex."""
        x, y = self.r1s(), self.r2s()
        return bool(np.any((x >= r1 - tol) & (y >= r2 - tol)))

    # -- serialization ----------------------------------------------------
    def to_csv(self, nats: bool = False) -> str:
        scale = LN2 if nats else 1.0
        buf = io.StringIO()
        buf.write(CSV_HEADER.replace("_bits", "_nats") if nats else CSV_HEADER)
        buf.write("\n")
        for p in self.points:
            s = p.split
            buf.write(",".join([
                _num(p.rate.r1 * scale), _num(p.rate.r2 * scale), _num(s.rho21), _num(s.rho2s),
                _num(s.p2_prime), _num(s.p2_dprime), p.bound_id, "true" if p.certified else "false",
            ]))
            buf.write("\n")
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {"points": [asdict(p) for p in self.points], "metadata": self.metadata}
        return json.dumps(payload, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RateFrontier":
        raw = json.loads(text)
        pts = tuple(FrontierPoint(RatePair(**d["rate"]), SplitParams(**d["split"]), d["bound_id"],
                                  d["certified"], d["theorem"], d.get("edge_sum"))
                    for d in raw["points"])
        return cls(pts, raw["metadata"])


def _num(v: float) -> str:
    return repr(float(v))


def envelope_at(x: np.ndarray, y: np.ndarray, esum: np.ndarray, r1: float) -> float:
    """Evaluate the frontier through Pareto vertices ``(x, y)`` (x ascending).

    On (x[i-1], x[i]] the boundary is max(y[i], esum[i-1] - R1); ``esum`` is
    NaN where no slope -1 edge leaves the vertex.
    """
    if len(x) == 0 or r1 > x[-1]:
        return -math.inf
    i = int(np.searchsorted(x, r1, side="left"))
    if i == 0 or x[i] == r1:
        return float(y[i])
    val = float(y[i])
    if not np.isnan(esum[i - 1]):
        val = max(val, float(esum[i - 1] - r1))
    return val


def polygon_max(A, B, C, r1: float) -> float:
    """Exact max R2 at ``r1`` over a union of polygons (brute force)."""
    h = np.where(r1 <= A, np.minimum(B, C - r1), -np.inf)
    return float(h.max()) if len(h) else -math.inf


# ---------------------------------------------------------------------------
# polygons and the envelope sweep

def polygons(spec: BoundSpec, vals: dict[str, np.ndarray]):
    """Normalized (A, B, C) plus an infeasibility mask (some bound was < 0)."""
    n = len(next(iter(vals.values())))
    inf = np.full(n, np.inf)
    neg = np.zeros(n, dtype=bool)
    for v in vals.values():
        neg |= v < 0

    def mins(keys):
        out = inf.copy()
        for k in keys:
            out = np.minimum(out, np.maximum(vals[k], 0.0))
        return out

    A, B, C = mins(spec.r1_keys), mins(spec.r2_keys), mins(spec.sum_keys)
    if not spec.sum_keys:
        C = A + B
    A = np.minimum(A, C)
    B = np.minimum(B, C)
    C = np.minimum(C, A + B)
    return A, B, C, neg


def pareto_envelope(A: np.ndarray, B: np.ndarray, C: np.ndarray):
    """Pareto vertices of the union of polygons {R1<=A, R2<=B, R1+R2<=C}.

    Returns ``(x, y, idx, edge_sum)`` with x ascending, ``idx`` the polygon a
    vertex came from and ``edge_sum`` as in :func:`envelope_at`.  Sweeps R1 from right to left keeping the polygons on their
    slope -1 part in a heap keyed by C and the best flat height B.
    """
    A, B, C = (np.asarray(v, dtype=float) for v in (A, B, C))
    n = len(A)
    if n == 0:
        return np.zeros(0), np.zeros(0), np.zeros(0, dtype=int), np.zeros(0)
    L = np.clip(C - B, 0.0, A)
    # event list: activation at A (kind 0), saturation at L (kind 1)
    xs = np.concatenate([A, L])
    kinds = np.concatenate([np.zeros(n, dtype=np.int8), np.ones(n, dtype=np.int8)])
    ids = np.concatenate([np.arange(n), np.arange(n)])
    order = np.lexsort((ids, kinds, -xs))
    xs_l, kinds_l, ids_l = xs[order].tolist(), kinds[order].tolist(), ids[order].tolist()
    Cl, Bl = C.tolist(), B.tolist()

    heap: list[tuple[float, int]] = []
    saturated = bytearray(n)
    bmax, bidx = -math.inf, -1
    cand_x, cand_y, cand_i = [], [], []
    prev_x = math.inf
    j, m = 0, len(xs_l)
    while j < m:
        x = xs_l[j]
        # open interval (x, prev_x): knee where the slanted max meets bmax
        if heap and bidx >= 0:
            cs = -heap[0][0]
            xk = cs - bmax
            if x < xk < prev_x:
                cand_x.append(xk); cand_y.append(bmax); cand_i.append(bidx)
        while j < m and xs_l[j] == x:
            k, i = kinds_l[j], ids_l[j]
            if k == 0:
                heapq.heappush(heap, (-Cl[i], i))
            else:
                saturated[i] = 1
                if Bl[i] > bmax:
                    bmax, bidx = Bl[i], i
            j += 1
        while heap and saturated[heap[0][1]]:
            heapq.heappop(heap)
        if heap and (-heap[0][0] - x) >= bmax:
            cand_x.append(x); cand_y.append(-heap[0][0] - x); cand_i.append(heap[0][1])
        elif bidx >= 0:
            cand_x.append(x); cand_y.append(bmax); cand_i.append(bidx)
        prev_x = x
    cx, cy, ci = np.array(cand_x), np.array(cand_y), np.array(cand_i, dtype=int)
    keep = cx >= 0
    cx, cy, ci = cx[keep], cy[keep], ci[keep]
    # Pareto prune: scan by x descending, keep strictly higher y
    order = np.lexsort((ci, -cy, -cx))
    out_x, out_y, out_i = [], [], []
    best = -math.inf
    for t in order:
        if cy[t] > best + 1e-15:
            out_x.append(cx[t]); out_y.append(cy[t]); out_i.append(ci[t])
            best = cy[t]
    x, y, i = np.array(out_x[::-1]), np.array(out_y[::-1]), np.array(out_i[::-1], dtype=int)
    esum = _edge_sums(A, B, C, L, x, y)
    # drop interior points of slope -1 runs; they are not vertices
    if len(x) > 2:
        s = x + y
        same = np.abs(np.diff(s)) <= SUM_TOL * np.maximum(1.0, np.abs(s[1:]))
        interior = np.zeros(len(x), dtype=bool)
        on = np.abs(esum - s) <= SUM_TOL * np.maximum(1.0, np.abs(s))   # vertex lies on its own edge
        interior[1:-1] = same[:-1] & on[:-2] & on[1:-1]
        x, y, i, esum = x[~interior], y[~interior], i[~interior], esum[~interior]
    return x, y, i, esum


def _edge_sums(A, B, C, L, x, y, chunk: int = 64) -> np.ndarray:
    """Sum of the slope -1 edge leaving each vertex to the right, NaN if none.

    Just right of x[i] the polygons on their slanted side are those with
    L <= x[i] < A; the largest C among them is the edge when it beats the
    next flat level.
    """
    out = np.full(len(x), np.nan)
    if len(x) < 2:
        return out
    tol = SUM_TOL * max(1.0, float(np.max(np.abs(x))))
    for lo in range(0, len(x) - 1, chunk):
        xi = x[lo:min(lo + chunk, len(x) - 1)]
        live = (L[None, :] <= xi[:, None] + tol) & (A[None, :] > xi[:, None] + tol)
        cmax = np.where(live, C[None, :], -np.inf).max(axis=1)
        nxt = y[lo + 1:lo + 1 + len(xi)]
        keep = cmax - xi > nxt + tol
        out[lo:lo + len(xi)] = np.where(keep, cmax, np.nan)
    return out


def _undominated(A, B, C, level, chunk: int = 4096) -> np.ndarray:
    """Mask dropping polygons contained in a per-level champion polygon.

    Champions are, for every level, the maximizers of A, B, C and A+B+C.
    Containment in one polygon is sufficient for irrelevance, so the mask is
    sound; the sweep afterwards is exact.
    """
    n = len(A)
    if n < 2048:
        return np.ones(n, dtype=bool)
    champs = []
    for lv in np.unique(level):
        ids = np.nonzero(level == lv)[0]
        for v in (A, B, C, A + B + C):
            champs.append(ids[np.argmax(v[ids])])
    champs = np.unique(np.array(champs))
    ca, cb, cc = A[champs], B[champs], C[champs]
    keep = np.ones(n, dtype=bool)
    for lo in range(0, n, chunk):
        sl = slice(lo, lo + chunk)
        dom = ((ca[None, :] >= A[sl, None]) & (cb[None, :] >= B[sl, None])
               & (cc[None, :] >= C[sl, None]))
        # a polygon is never dropped because of itself
        self_hit = champs[None, :] == np.arange(lo, min(lo + chunk, n))[:, None]
        keep[sl] = ~np.any(dom & ~self_hit, axis=1)
    keep[champs] = True
    return keep


# ---------------------------------------------------------------------------
# sampling

@dataclass
class Pool:
    """All evaluated splits of one sweep (appended to during refinement)."""

    r21: np.ndarray
    r2s: np.ndarray
    level: np.ndarray

    def extend(self, r21, r2s, level):
        self.r21 = np.concatenate([self.r21, r21])
        self.r2s = np.concatenate([self.r2s, r2s])
        self.level = np.concatenate([self.level, level])


def disk_grid(p: GaussianChannelParams, n: int) -> tuple[np.ndarray, np.ndarray]:
    g = np.linspace(-1.0, 1.0, n)
    g21 = g if p.p1 > 0 else np.zeros(1)
    g2s = g if p.q > 0 else np.zeros(1)
    r21, r2s = np.meshgrid(g21, g2s, indexing="ij")
    r21, r2s = r21.ravel(), r2s.ravel()
    keep = r21 ** 2 + r2s ** 2 <= 1.0 + 1e-12
    return r21[keep], r2s[keep]


def split_arrays(p: GaussianChannelParams, mode: str, r21, r2s, level):
    full = cf.full_private(p, r21, r2s)
    if mode == "prime":
        return np.minimum(level, full), np.zeros_like(full)
    if mode in ("equality", "dprime"):
        pp = np.minimum(level, full)
        return full - pp, pp
    return full, np.zeros_like(full)


def radius2(p: GaussianChannelParams, mode: str, level) -> np.ndarray:
    """Largest rho21^2 + rho2s^2 keeping the split level feasible."""
    level = np.asarray(level, dtype=float)
    if mode == "none" or p.p2 == 0:
        return np.ones_like(level)
    return np.clip(1.0 - level / p.p2, 0.0, 1.0)


def evaluate(p: GaussianChannelParams, bound_id: str, r21, r2s, level):
    spec = BOUNDS[bound_id]
    r21, r2s, level = (np.asarray(v, dtype=float) for v in (r21, r2s, level))
    p2p, p2pp = split_arrays(p, spec.level, r21, r2s, level)
    vals = spec.fn(p, r21, r2s, p2p, p2pp)
    vals = {k: np.broadcast_to(np.asarray(v, dtype=float), r21.shape) for k, v in vals.items()}
    return vals, p2p, p2pp


def initial_pool(p: GaussianChannelParams, mode: str, grid: GridSpec) -> Pool:
    r21, r2s = disk_grid(p, grid.n_rho)
    levels = np.linspace(0.0, p.p2, grid.n_split) if mode != "none" else np.zeros(1)
    if p.p2 == 0:
        levels = np.zeros(1)
    full = cf.full_private(p, r21, r2s)
    parts = []
    for lv in levels:
        ok = full >= lv - 1e-12 * max(1.0, p.p2)
        parts.append((r21[ok], r2s[ok], np.full(int(ok.sum()), lv)))
    return Pool(*(np.concatenate(z) for z in zip(*parts)))


def pattern_search(objective: Callable, r21, r2s, level, rad2, h0: float, grid: GridSpec,
                   fix21: bool, fix2s: bool, record: list | None = None):
    """Vectorized coordinate search maximizing ``objective`` for each start.

    ``objective(r21, r2s, level, idx)`` returns values for states ``idx``;
    moves leaving the disk of radius^2 ``rad2`` are rejected.  Each round
    polls +-h along each free coordinate and moves to the best strict
    improvement; h shrinks by ``grid.shrink`` between rounds.
    """
    r21, r2s = np.array(r21, dtype=float), np.array(r2s, dtype=float)
    level, rad2 = np.asarray(level, dtype=float), np.asarray(rad2, dtype=float)
    k = len(r21)
    idx_all = np.arange(k)
    best = objective(r21, r2s, level, idx_all)
    dirs = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    dirs = [d for d in dirs if not (fix21 and d[0]) and not (fix2s and d[1])]
    h = h0
    for _ in range(grid.refine_rounds):
        active = np.ones(k, dtype=bool)
        for _ in range(grid.refine_iters):
            if not active.any() or not dirs:
                break
            ids = idx_all[active]
            cand21 = np.concatenate([np.clip(r21[ids] + d[0] * h, -1, 1) for d in dirs])
            cand2s = np.concatenate([np.clip(r2s[ids] + d[1] * h, -1, 1) for d in dirs])
            cid = np.tile(ids, len(dirs))
            ok = cand21 ** 2 + cand2s ** 2 <= rad2[cid] + 1e-15
            val = np.full(len(cid), -np.inf)
            if ok.any():
                val[ok] = objective(cand21[ok], cand2s[ok], level[cid[ok]], cid[ok])
                if record is not None:
                    record.append((cand21[ok], cand2s[ok], level[cid[ok]]))
            val = val.reshape(len(dirs), len(ids))
            j = np.argmax(val, axis=0)          # first best direction wins ties
            top = val[j, np.arange(len(ids))]
            move = top > best[ids] + 1e-15
            moved = ids[move]
            sel = j[move] * len(ids) + np.nonzero(move)[0]
            r21[moved], r2s[moved] = cand21[sel], cand2s[sel]
            best[moved] = top[move]
            active[:] = False
            active[moved] = True
        h *= grid.shrink
    return r21, r2s, best


# ---------------------------------------------------------------------------
# public sweep

def _check_case(p: GaussianChannelParams, spec: BoundSpec, bound_id: str):
    if spec.case is not None and classify_case(p) is not spec.case:
        want = "|a| > 1" if spec.case is CaseTag.ABOVE_ONE else "|a| <= 1"
        raise CaseMismatch(f"bound {bound_id} requires {want}; got a = {p.a!r}")


def _build(p: GaussianChannelParams, bound_id: str, pool: Pool, grid: GridSpec,
           refine: bool, certified_theorem: str | None = None) -> RateFrontier:
    spec = BOUNDS[bound_id]
    vals, p2p, p2pp = evaluate(p, bound_id, pool.r21, pool.r2s, pool.level)
    A, B, C, _ = polygons(spec, vals)
    if len(A) == 0:
        raise EmptyRegion(f"no feasible split for bound {bound_id}")
    keep = _undominated(A, B, C, pool.level)
    x, y, sub, esum = pareto_envelope(A[keep], B[keep], C[keep])
    idx = np.nonzero(keep)[0][sub]
    if refine and grid.refine_rounds > 0 and len(idx):
        inc = np.unique(idx)
        fix21, fix2s = p.p1 == 0, p.q == 0
        rad2 = radius2(p, spec.level, pool.level[inc])
        record: list = []
        for which in ("C", "A", "B"):
            def obj(r21, r2s, lv, ids, which=which):
                v, _, _ = evaluate(p, bound_id, r21, r2s, lv)
                a, b, c, _ = polygons(spec, v)
                return {"A": a, "B": b, "C": c}[which]
            pattern_search(obj, pool.r21[inc], pool.r2s[inc], pool.level[inc], rad2,
                           2.0 / (grid.n_rho - 1), grid, fix21, fix2s, record)
        for r21, r2s, lv in record:
            pool.extend(r21, r2s, lv)
        return _build(p, bound_id, pool, grid, False, certified_theorem)
    pts = []
    for xi, yi, i, es in zip(x, y, idx, esum):
        sp = SplitParams(float(pool.r21[i]), float(pool.r2s[i]), float(p2p[i]), float(p2pp[i]))
        pts.append(FrontierPoint(RatePair(float(xi), float(yi)), sp, bound_id,
                                 certified_theorem is not None, certified_theorem,
                                 None if np.isnan(es) else float(es)))
    meta = {"params": list(p.as_tuple()), "bound_id": bound_id,
            "grid": asdict(grid), "evaluated_splits": int(len(pool.r21))}
    return RateFrontier(tuple(pts), meta)


def frontier(params: GaussianChannelParams, bound_id: str, grid: GridSpec | None = None,
             seeds: Sequence[SplitParams] = (), refine: bool = True) -> RateFrontier:
    """Pareto frontier of ``bound_id`` over the split grid.

    ``seeds`` are extra splits added to the grid (used to compare an inner
    bound with its outer bound at exactly the splits the inner one used).
    """
    if bound_id not in BOUNDS:
        raise ValidationError(f"unknown bound {bound_id!r}; choose from {sorted(BOUNDS)}")
    grid = grid or GridSpec()
    spec = BOUNDS[bound_id]
    _check_case(params, spec, bound_id)
    pool = initial_pool(params, spec.level, grid)
    if seeds:
        pool.extend(np.array([s.rho21 for s in seeds]), np.array([s.rho2s for s in seeds]),
                    np.array([_seed_level(spec.level, s) for s in seeds]))
    return _build(params, bound_id, pool, grid, refine)


def _seed_level(mode: str, sp: SplitParams) -> float:
    if mode == "prime":
        return sp.p2_prime
    if mode in ("equality", "dprime"):
        return sp.p2_dprime
    return 0.0


def capacity_region(params: GaussianChannelParams, asserted_condition: str | None,
                    grid: GridSpec | None = None, state_at_rx2: bool = False) -> RateFrontier:
    """Capacity frontier under a caller-asserted condition.

    ``asserted_condition`` is ``"Cond7"`` or ``"Cond8"`` (or the digits 7/8).
    With ``state_at_rx2`` the state is also known at receiver 2 and no
    assertion is needed.
    """
    case = classify_case(params)
    if state_at_rx2:
        bound = "thm15" if case is CaseTag.ABOVE_ONE else "thm14"
    else:
        cond = _cond_name(asserted_condition)
        if cond is None:
            raise MissingAssertion("assert condition 7 or 8 for the capacity statement")
        if case is CaseTag.ABOVE_ONE:
            if cond != "Cond8":
                raise CaseMismatch("for |a| > 1 a capacity result exists only under condition (8)")
            bound = "thm7"
        else:
            bound = "thm10" if cond == "Cond7" else "thm12"
    fr = frontier(params, bound, grid)
    pts = tuple(FrontierPoint(q.rate, q.split, q.bound_id, True, bound, q.edge_sum)
                for q in fr.points)
    return RateFrontier(pts, dict(fr.metadata, theorem=bound))


def _cond_name(c) -> str | None:
    if c is None:
        return None
    s = str(c).strip().lower().replace("cond", "").replace("ition", "").strip("() ")
    if s in ("7", "8"):
        return "Cond" + s
    raise ValidationError(f"unknown condition {c!r}; expected Cond7 or Cond8")

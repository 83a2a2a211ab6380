"""Layered random codebooks and strong typicality tests.

Codeword arrays carry the message/bin indices as leading axes and time last:

    x1[w1, :]                              ~ P(x1)
    t[w1, v1, :]                           ~ P(t | x1)
    u[w1, v1, w21, v21, :]                 ~ P(u | x1, t)
    v[w1, v1, w21, v21, w22, v22, :]       ~ P(v | x1, t, u)

Each layer has 2^ceil(n R) message indices and 2^ceil(n R~) bin indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..dmc_regions.channel import DiscreteChannelSpec
from ..dmc_regions.joint import JointDistribution, check_factorization
from ..errors import MemoryCap, ValidationError

GEN_AXES = ("X1", "S", "T", "U", "V", "X2", "Y", "Z")
MEMORY_CAP = 2 ** 26          # total codeword symbols


@dataclass(frozen=True)
class SimConfig:
    n: int
    rates: tuple[float, float, float] = (0.0, 0.0, 0.0)      # R1, R21, R22
    bins: tuple[float, float, float] = (0.0, 0.0, 0.0)       # R~1, R~21, R~22
    eps: float = 0.05
    trials: int = 1000
    seed: int = 0
    memory_cap: int = MEMORY_CAP

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"blocklength must be a positive integer, got {self.n}")
        if len(self.rates) != 3 or len(self.bins) != 3:
            raise ValidationError("rates and bins take three values each (layer 1, 21, 22)")
        if any(not np.isfinite(r) or r < 0 for r in tuple(self.rates) + tuple(self.bins)):
            raise ValidationError("rates and bin rates must be finite and non-negative")
        if not self.eps > 0:
            raise ValidationError("typicality slack eps must be positive")
        if self.trials < 1:
            raise ValidationError("trials must be positive")

    def index_bits(self) -> tuple[int, ...]:
        """ceil(n R) for (R1, R~1, R21, R~21, R22, R~22)."""
        r1, r21, r22 = self.rates
        b1, b21, b22 = self.bins
        # guard against 12 * 1.25 = 15.000000000000002 style round-up
        return tuple(math.ceil(self.n * r - 1e-9) for r in (r1, b1, r21, b21, r22, b22))

    def sizes(self) -> tuple[int, ...]:
        return tuple(2 ** k for k in self.index_bits())

    def total_symbols(self) -> int:
        m1, b1, m21, b21, m22, b22 = self.sizes()
        layers = (m1, m1 * b1, m1 * b1 * m21 * b21, m1 * b1 * m21 * b21 * m22 * b22)
        return self.n * sum(layers)


@dataclass
class GenLaw:
    """Conditional laws read off a code-generation joint."""

    sizes: dict[str, int]
    joint: np.ndarray                      # P over GEN_AXES
    p_x1: np.ndarray
    p_s: np.ndarray
    t_x1: np.ndarray                       # P(t | x1)
    u_x1t: np.ndarray                      # P(u | x1, t)
    v_x1tu: np.ndarray                     # P(v | x1, t, u)
    x2_given: np.ndarray                   # P(x2 | x1, s, t, u, v)

    def marginal(self, names) -> np.ndarray:
        keep = [GEN_AXES.index(n) for n in names]
        drop = tuple(i for i in range(len(GEN_AXES)) if i not in keep)
        m = self.joint.sum(axis=drop)
        order = sorted(keep)
        return np.transpose(m, [order.index(k) for k in keep])


def _cond(joint: np.ndarray, ncond: int) -> np.ndarray:
    """P(last | first ncond axes); rows with zero mass become uniform (never sampled)."""
    den = joint.sum(axis=tuple(range(ncond, joint.ndim)), keepdims=True)
    out = np.divide(joint, den, out=np.zeros_like(joint), where=den > 0)
    k = int(np.prod(joint.shape[ncond:]))
    return np.where(den > 0, out, 1.0 / k)


def gen_law(channel: DiscreteChannelSpec, gen: JointDistribution) -> GenLaw:
    """Validate the generation joint and extract the conditionals the code needs."""
    if gen.batch_ndim:
        raise ValidationError("the generation joint must not be batched")
    for a in ("T", "U", "V"):
        if a not in gen.axes:
            gen = JointDistribution(gen.axes + (a,), gen.p[..., None])
    unknown = set(gen.axes) - set(GEN_AXES)
    if unknown:
        raise ValidationError(f"unexpected axes {sorted(unknown)} in the generation joint")
    check_factorization(gen, channel)
    p = gen.marginal(GEN_AXES)
    law = GenLaw(dict((k, p.shape[i]) for i, k in enumerate(GEN_AXES)), p,
                 None, None, None, None, None, None)
    law.p_x1 = law.marginal(["X1"])
    law.p_s = law.marginal(["S"])
    law.t_x1 = _cond(law.marginal(["X1", "T"]), 1)
    law.u_x1t = _cond(law.marginal(["X1", "T", "U"]), 2)
    law.v_x1tu = _cond(law.marginal(["X1", "T", "U", "V"]), 3)
    law.x2_given = _cond(law.marginal(["X1", "S", "T", "U", "V", "X2"]), 5)
    return law


def sample_cond(rng: np.random.Generator, cond: np.ndarray, *given: np.ndarray) -> np.ndarray:
    """Draw one symbol per position from ``cond[given..., :]`` (inverse CDF)."""
    cdf = np.cumsum(cond, axis=-1)
    rows = cdf[given] if given else np.broadcast_to(cdf, cdf.shape)
    r = rng.random(rows.shape[:-1])
    idx = (r[..., None] >= rows[..., :-1]).sum(axis=-1)
    return idx.astype(np.int64)


@dataclass
class LayeredCodebooks:
    cfg: SimConfig
    law: GenLaw
    x1: np.ndarray
    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    channel: DiscreteChannelSpec = field(repr=False, default=None)
    _tables: dict = field(default_factory=dict, repr=False)

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.cfg.sizes()

    def table(self, layer: str) -> "CountTable":
        """Cached count table of (x1, t, u) tuples ("u") or (x1, t, u, v) tuples ("v")."""
        if layer not in self._tables:
            shape = self.v.shape if layer == "v" else self.u.shape
            k = len(shape) - 1
            parts = [self.x1[(slice(None),) + (None,) * (k - 1)], self.t[(slice(None),) * 2 + (None,) * (k - 2)],
                     self.u[(slice(None),) * 4 + (None,) * (k - 4)]]
            sizes = [self.law.sizes[a] for a in ("X1", "T", "U")]
            if layer == "v":
                parts.append(self.v)
                sizes.append(self.law.sizes["V"])
            idx = np.zeros(shape, dtype=np.int64)
            for p, m in zip(parts, sizes):
                idx = idx * m + p
            self._tables[layer] = CountTable(idx.reshape(-1, shape[-1]), int(np.prod(sizes)), shape[:-1])
        return self._tables[layer]


def build_codebooks(channel: DiscreteChannelSpec, gen: JointDistribution, cfg: SimConfig) -> LayeredCodebooks:
    """Draw the four layers i.i.d. per the generation conditionals (seeded by ``cfg.seed``)."""
    total = cfg.total_symbols()
    if total > cfg.memory_cap:
        raise MemoryCap(f"codebooks need {total} symbols, cap is {cfg.memory_cap}")
    law = gen_law(channel, gen)
    m1, b1, m21, b21, m22, b22 = cfg.sizes()
    n = cfg.n
    rng = np.random.default_rng([cfg.seed, 0])
    x1 = sample_cond(rng, np.broadcast_to(law.p_x1, (m1, n, len(law.p_x1))))
    t = sample_cond(rng, law.t_x1, np.broadcast_to(x1[:, None, :], (m1, b1, n)))
    xb = np.broadcast_to(x1[:, None, None, None, :], (m1, b1, m21, b21, n))
    tb = np.broadcast_to(t[:, :, None, None, :], (m1, b1, m21, b21, n))
    u = sample_cond(rng, law.u_x1t, xb, tb)
    shape = (m1, b1, m21, b21, m22, b22, n)
    v = sample_cond(rng, law.v_x1tu,
                    np.broadcast_to(x1[:, None, None, None, None, None, :], shape),
                    np.broadcast_to(t[:, :, None, None, None, None, :], shape),
                    np.broadcast_to(u[:, :, :, :, None, None, :], shape))
    return LayeredCodebooks(cfg, law, x1, t, u, v, channel)


# ---------------------------------------------------------------------------
# typicality

CACHE_BYTES = 1 << 28


class CountTable:
    """Joint letter counts of many codeword tuples against one received sequence.

    The tuple symbols are one-hot encoded once; counts against y^n are then a
    single matrix product (K*C, n) @ (n, |Y|).  The one-hot block is cached
    when it fits in ``CACHE_BYTES`` and rebuilt chunk by chunk otherwise.
    """

    def __init__(self, idx: np.ndarray, cells: int, shape: tuple[int, ...], chunk: int = 1 << 14):
        self.idx, self.cells, self.shape, self.chunk = idx, cells, shape, chunk
        k, n = idx.shape
        self._hot = self._onehot(idx) if k * cells * n * 4 <= CACHE_BYTES else None

    def _onehot(self, idx):
        c = np.arange(self.cells, dtype=idx.dtype)
        return (idx[:, None, :] == c[None, :, None]).astype(np.float32)    # (k, C, n)

    def counts(self, seq: np.ndarray, size: int):
        """Yield (start, counts[k, C, size]) over chunks of tuples."""
        k, n = self.idx.shape
        hot_y = (seq[:, None] == np.arange(size)[None, :]).astype(np.float32)  # (n, size)
        for lo in range(0, k, self.chunk):
            hot = self._hot[lo:lo + self.chunk] if self._hot is not None else self._onehot(self.idx[lo:lo + self.chunk])
            m = hot.shape[0]
            yield lo, (hot.reshape(m * self.cells, n) @ hot_y).reshape(m, self.cells, size)

    def typical(self, seq: np.ndarray, pmf: np.ndarray, eps: float) -> np.ndarray:
        """Typicality (same rule as ``typical``) of every tuple joined with ``seq``."""
        n = self.idx.shape[1]
        size = pmf.shape[-1]
        flat = pmf.reshape(self.cells, size)
        slack = eps * flat.size
        zero = flat <= 0
        out = np.empty(self.idx.shape[0], dtype=bool)
        for lo, cnt in self.counts(seq, size):
            ok = np.all(np.abs(cnt / n - flat) <= slack + 1e-12, axis=(1, 2))
            if zero.any():
                ok &= ~np.any(cnt[:, zero] > 0, axis=1)
            out[lo:lo + cnt.shape[0]] = ok
        return out.reshape(self.shape)

def typical(seqs: list[np.ndarray], pmf: np.ndarray, eps: float, chunk: int = 1 << 15) -> np.ndarray:
    """Strong typicality of the tuples ``seqs`` (each ``(..., n)``) w.r.t. ``pmf``.

    A tuple is typical when every cell with positive probability has
    |count/n - p| <= eps * (number of cells) and every zero-probability
    cell has count 0.  Returns a boolean array over the leading shape.
    """
    seqs = np.broadcast_arrays(*seqs)
    shape, n = seqs[0].shape[:-1], seqs[0].shape[-1]
    cells = pmf.size
    idx = np.zeros(seqs[0].shape, dtype=np.int64)
    for s, k in zip(seqs, pmf.shape):
        idx = idx * k + s
    idx = idx.reshape(-1, n)
    flat = pmf.reshape(-1)
    slack = eps * cells
    zero = flat <= 0
    out = np.empty(idx.shape[0], dtype=bool)
    for lo in range(0, idx.shape[0], chunk):
        block = idx[lo:lo + chunk]
        k = block.shape[0]
        counts = np.bincount((block + cells * np.arange(k)[:, None]).ravel(),
                             minlength=k * cells).reshape(k, cells)
        dev = np.abs(counts / n - flat)
        ok = np.all(dev <= slack + 1e-12, axis=1)
        if zero.any():
            ok &= ~np.any(counts[:, zero] > 0, axis=1)
        out[lo:lo + k] = ok
    return out.reshape(shape)

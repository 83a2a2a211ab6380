"""Joint laws over role-tagged axes and information measures on them.

A :class:`JointDistribution` stores a dense tensor whose trailing axes are
named (``X1``, ``S``, aux axes ``T``/``U``/``V``/``K``, ``X2``, ``Y``, ``Z``).
Leading batch axes are allowed: every information quantity is then returned
as an array over the batch.  This is what the exhaustive searches use.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..errors import AxisOverlap, BadFactorization, ValidationError
from .channel import DiscreteChannelSpec

ROLES = ("X1", "S", "T", "U", "V", "K", "X2", "Y", "Z")
AUX_ROLES = ("T", "U", "V", "K")
ZERO = 1e-15
SUM_TOL = 1e-12
FACTOR_TOL = 1e-10


def _as_set(a) -> tuple[str, ...]:
    if isinstance(a, str):
        a = [v for v in a.replace(" ", "").split(",") if v]
    return tuple(a)


@dataclass(eq=False)
class JointDistribution:
    axes: tuple[str, ...]
    p: np.ndarray
    batch_ndim: int = 0
    _hcache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.axes = tuple(self.axes)
        self.p = np.asarray(self.p, dtype=float)
        if len(set(self.axes)) != len(self.axes):
            raise ValidationError(f"repeated axis in {self.axes}")
        if self.p.ndim != self.batch_ndim + len(self.axes):
            raise ValidationError("tensor rank does not match the axis list")

    # -- basic facts -------------------------------------------------------
    @property
    def sizes(self) -> dict[str, int]:
        return dict(zip(self.axes, self.p.shape[self.batch_ndim:]))

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.p.shape[:self.batch_ndim]

    def has(self, *names: str) -> bool:
        return all(n in self.axes for n in names)

    def validate(self) -> None:
        if not np.all(np.isfinite(self.p)) or self.p.min() < -ZERO:
            raise ValidationError("joint probabilities must be finite and nonnegative")
        tot = self.p.sum(axis=tuple(range(self.batch_ndim, self.p.ndim)))
        if np.max(np.abs(tot - 1.0)) > SUM_TOL:
            raise ValidationError("joint distribution must sum to 1")

    def _dims(self, names: Iterable[str]) -> list[int]:
        out = []
        for n in names:
            if n not in self.axes:
                raise ValidationError(f"joint has no axis {n!r} (axes: {self.axes})")
            out.append(self.batch_ndim + self.axes.index(n))
        return out

    def marginal(self, names: Sequence[str]) -> np.ndarray:
        """Marginal tensor over ``names`` in the given order (batch axes first)."""
        names = list(names)
        keep = self._dims(names)
        drop = tuple(d for d in range(self.batch_ndim, self.p.ndim) if d not in keep)
        m = self.p.sum(axis=drop) if drop else self.p
        # order remaining named dims as requested
        present = sorted(keep)
        perm = list(range(self.batch_ndim)) + [self.batch_ndim + present.index(d) for d in keep]
        return np.transpose(m, perm)

    # -- information measures ---------------------------------------------
    def entropy(self, names: Iterable[str]) -> np.ndarray | float:
        key = frozenset(_as_set(names))
        if key in self._hcache:
            return self._hcache[key]
        if not key:
            h = np.zeros(self.batch_shape) if self.batch_ndim else 0.0
        else:
            m = self.marginal(sorted(key))
            m = m.reshape(self.batch_shape + (-1,))
            safe = np.where(m > ZERO, m, 1.0)
            h = -np.sum(np.where(m > ZERO, m * np.log2(safe), 0.0), axis=-1)
            if not self.batch_ndim:
                h = float(h)
        self._hcache[key] = h
        return h

    def cond_entropy(self, a, c=()) -> np.ndarray | float:
        a, c = _as_set(a), _as_set(c)
        return self.entropy(set(a) | set(c)) - self.entropy(c)

    def mutual_info(self, a, b, c=()) -> np.ndarray | float:
        """I(A;B|C) in bits; axis sets must be disjoint."""
        a, b, c = set(_as_set(a)), set(_as_set(b)), set(_as_set(c))
        if not a or not b:
            raise ValidationError("mutual information needs nonempty sets")
        if (a & b) or (a & c) or (b & c):
            raise AxisOverlap(f"axis sets overlap: {sorted(a)} ; {sorted(b)} | {sorted(c)}")
        val = (self.entropy(a | c) + self.entropy(b | c) - self.entropy(a | b | c) - self.entropy(c))
        # clip rounding noise only
        return np.where(np.abs(val) < 1e-13, 0.0, val) if self.batch_ndim else (0.0 if abs(val) < 1e-13 else val)

    # -- transformations -----------------------------------------------------
    def take(self, index: int) -> "JointDistribution":
        """Select one element along the first batch axis."""
        if not self.batch_ndim:
            raise ValidationError("joint has no batch axes")
        return JointDistribution(self.axes, self.p[index], self.batch_ndim - 1)

    def drop(self, *names: str) -> "JointDistribution":
        keep = [a for a in self.axes if a not in names]
        return JointDistribution(tuple(keep), self.marginal(keep), self.batch_ndim)

    def rename(self, old: str, new: str) -> "JointDistribution":
        if new in self.axes:
            raise ValidationError(f"axis {new!r} already present")
        return JointDistribution(tuple(new if a == old else a for a in self.axes), self.p, self.batch_ndim)

    def merge(self, names: Sequence[str], new: str, keep_sources: bool = False) -> "JointDistribution":
        """Add axis ``new`` = the tuple ``names`` (row-major); drop the sources unless asked."""
        names = list(names)
        sizes = [self.sizes[n] for n in names]
        card = int(np.prod(sizes))
        # the tuple axis is a deterministic copy; sources are marginalized after
        p = self.p
        dims = self._dims(names)
        idx = np.indices(p.shape[self.batch_ndim:])
        code = np.zeros(p.shape[self.batch_ndim:], dtype=int)
        for d, s in zip(dims, sizes):
            code = code * s + idx[d - self.batch_ndim]
        onehot = (code[..., None] == np.arange(card)).astype(float)
        q = p[..., None] * onehot
        out = JointDistribution(self.axes + (new,), q, self.batch_ndim)
        if not keep_sources:
            out = out.drop(*names)
        return out

    def with_copy(self, source: str, new: str) -> "JointDistribution":
        """Add axis ``new`` equal to ``source`` with probability one."""
        return self.merge([source], new, keep_sources=True)

    # -- serialization ---------------------------------------------------------
    def to_dict(self) -> dict:
        if self.batch_ndim:
            raise ValidationError("cannot serialize a batched joint")
        return {"axes": list(self.axes), "sizes": [self.sizes[a] for a in self.axes],
                "p": self.p.ravel().tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "JointDistribution":
        try:
            axes, sizes = tuple(d["axes"]), tuple(int(s) for s in d["sizes"])
            p = np.asarray(d["p"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad joint JSON: {exc}") from None
        unknown = set(axes) - set(ROLES)
        if unknown:
            raise ValidationError(f"unknown axis role(s) {sorted(unknown)}")
        if p.size != int(np.prod(sizes)):
            raise ValidationError("joint tensor size does not match the axis sizes")
        j = cls(axes, p.reshape(sizes))
        j.validate()
        return j

    @classmethod
    def from_json(cls, text: str) -> "JointDistribution":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        return (isinstance(other, JointDistribution) and self.axes == other.axes
                and self.batch_ndim == other.batch_ndim and np.array_equal(self.p, other.p))

    __hash__ = None


# ---------------------------------------------------------------------------
# construction

def from_factors(channel: DiscreteChannelSpec, p_x1: np.ndarray, kernel: np.ndarray,
                 aux: Sequence[str], aux_sizes: Sequence[int] | None = None) -> JointDistribution:
    """P(x1) P(s) P(aux, x2 | x1, s) W(y, z | x1, x2, s).

    ``kernel`` has shape ``(*batch, |X1|, |S|, |A|, |X2|)`` where A is the
    flattened aux tuple (or ``(*batch, |X1|, |S|, *aux_sizes, |X2|)``).
    ``p_x1`` has shape ``(*batch, |X1|)``.  Axis order of the result is
    X1, S, aux..., X2, Y, Z.
    """
    sz = channel.sizes
    p_x1 = np.asarray(p_x1, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    batch = p_x1.shape[:-1]
    nb = len(batch)
    if aux_sizes is None:
        aux_sizes = kernel.shape[nb + 2:-1]
    aux_sizes = tuple(int(a) for a in aux_sizes)
    if len(aux_sizes) != len(aux):
        raise ValidationError("one size per auxiliary axis is required")
    A = int(np.prod(aux_sizes)) if aux_sizes else 1
    kernel = kernel.reshape(batch + (sz["X1"], sz["S"], A, sz["X2"]))
    w = channel.transition                                   # (X1, X2, S, Y, Z)
    p = np.einsum("...i,j,...ijak,ikjyz->...ijakyz", p_x1, channel.state_pmf, kernel, w)
    p = p.reshape(batch + (sz["X1"], sz["S"]) + aux_sizes + (sz["X2"], sz["Y"], sz["Z"]))
    return JointDistribution(("X1", "S") + tuple(aux) + ("X2", "Y", "Z"), p, nb)


def random_joint(channel: DiscreteChannelSpec, aux_sizes: dict[str, int], rng: np.random.Generator,
                 concentration: float = 1.0, markov: str | None = None) -> JointDistribution:
    """Random joint with the standard factorization.

    ``markov`` adds structure needed by the outer bounds:
      * ``"T-UV"``: T drawn from P(t | u, v)  (chain T - UV - X1 X2 S)
      * ``"T-V"``:  T drawn from P(t | v)     (chain T - V - X1 X2 S)
    """
    sz = channel.sizes
    aux = tuple(aux_sizes)
    p_x1 = rng.dirichlet(np.full(sz["X1"], concentration))
    if markov is None:
        A = int(np.prod([aux_sizes[a] for a in aux])) if aux else 1
        k = rng.dirichlet(np.full(A * sz["X2"], concentration), size=(sz["X1"], sz["S"]))
        return from_factors(channel, p_x1, k.reshape(sz["X1"], sz["S"], A, sz["X2"]), aux,
                            [aux_sizes[a] for a in aux])
    if markov == "T-UV":
        parents = [a for a in ("U", "V") if a in aux_sizes]
    elif markov == "T-V":
        parents = ["V"]
    else:
        raise ValidationError(f"unknown Markov structure {markov!r}")
    if "T" not in aux_sizes or not all(a in aux_sizes for a in parents):
        raise ValidationError(f"Markov structure {markov} needs axes T and {parents}")
    rest = [a for a in aux if a != "T"]
    R = int(np.prod([aux_sizes[a] for a in rest])) if rest else 1
    k = rng.dirichlet(np.full(R * sz["X2"], concentration), size=(sz["X1"], sz["S"]))
    k = k.reshape((sz["X1"], sz["S"]) + tuple(aux_sizes[a] for a in rest) + (sz["X2"],))
    par_shape = tuple(aux_sizes[a] for a in parents)
    pt = rng.dirichlet(np.full(aux_sizes["T"], concentration), size=par_shape)   # (*parents, T)
    # broadcast P(t | parents) against the rest-axes kernel
    letters = "abcdefgh"
    rest_l = "".join(letters[i] for i in range(len(rest)))
    par_l = "".join(rest_l[rest.index(a)] for a in parents)
    full = np.einsum(f"ij{rest_l}k,{par_l}t->ij{rest_l}tk", k, pt)
    order = rest + ["T"]
    # reorder aux axes to the requested order
    src = [order.index(a) for a in aux]
    full = np.transpose(full, [0, 1] + [2 + s for s in src] + [2 + len(order)])
    return from_factors(channel, p_x1, full, aux, [aux_sizes[a] for a in aux])


# ---------------------------------------------------------------------------
# structural checks

def tv(p: np.ndarray, q: np.ndarray) -> float:
    return float(0.5 * np.abs(np.asarray(p) - np.asarray(q)).sum())


def factorization_residual(joint: JointDistribution, channel: DiscreteChannelSpec | None = None) -> float:
    """Total-variation distance between the joint and its reconstruction

        P(x1) P(s) P(aux, x2 | x1, s) P(y, z | x1, x2, s).

    When ``channel`` is given its state pmf and transition are used for the
    last factors; otherwise they are estimated from the joint.
    """
    if joint.batch_ndim:
        raise ValidationError("factorization checks take an unbatched joint")
    for r in ("X1", "S", "X2", "Y", "Z"):
        if r not in joint.axes:
            raise BadFactorization(f"joint lacks axis {r}")
    aux = [a for a in joint.axes if a in AUX_ROLES]
    order = ["X1", "S"] + aux + ["X2", "Y", "Z"]
    p = joint.marginal(order)
    px1 = p.sum(axis=tuple(range(1, p.ndim)))
    ps = p.sum(axis=tuple(i for i in range(p.ndim) if i != 1))
    if channel is not None:
        ps_ref = channel.state_pmf
        if ps_ref.shape != ps.shape:
            return 1.0
        w = np.transpose(channel.transition, (0, 2, 1, 3, 4))    # (X1, S, X2, Y, Z)
    else:
        ps_ref = ps
        pxs = p.sum(axis=tuple(range(2, 2 + len(aux))))          # (X1, S, X2, Y, Z)
        den = pxs.sum(axis=(3, 4), keepdims=True)
        w = np.where(den > ZERO, pxs / np.where(den > ZERO, den, 1.0), 0.0)
    # P(aux, x2 | x1, s) from the joint
    pax = p.sum(axis=(-1, -2))                                  # (X1, S, *aux, X2)
    pxs1 = pax.reshape(pax.shape[0], pax.shape[1], -1).sum(axis=-1)
    safe = np.where(pxs1 > ZERO, pxs1, 1.0)
    kern = pax / safe.reshape(safe.shape + (1,) * (pax.ndim - 2))
    shape = (p.shape[0], p.shape[1]) + (1,) * len(aux)
    wfull = w.reshape((w.shape[0], w.shape[1]) + (1,) * len(aux) + w.shape[2:])
    recon = (px1[:, None] * ps_ref[None, :]).reshape(shape + (1, 1, 1)) * kern[..., None, None] * wfull
    return tv(p, recon)


def check_factorization(joint: JointDistribution, channel: DiscreteChannelSpec | None = None,
                        tol: float = FACTOR_TOL) -> None:
    r = factorization_residual(joint, channel)
    if r > tol:
        raise BadFactorization(f"joint does not factor as P(X1)P(S)P(aux,X2|S,X1)P(Y,Z|S,X1,X2) "
                               f"(TV residual {r:.3g})")


def markov_residual(joint: JointDistribution, a: Sequence[str], b: Sequence[str], c: Sequence[str]) -> float:
    """TV distance between P(a,b,c) and P(a,b) P(c|b): zero iff a - b - c."""
    a, b, c = list(_as_set(a)), list(_as_set(b)), list(_as_set(c))
    p = joint.marginal(a + b + c)
    na, nb = len(a), len(b)
    pab = p.sum(axis=tuple(range(na + nb, p.ndim)), keepdims=True)
    pbc = p.sum(axis=tuple(range(na)), keepdims=True)
    pb = pbc.sum(axis=tuple(range(na + nb, p.ndim)), keepdims=True)
    recon = pab * np.where(pb > ZERO, pbc / np.where(pb > ZERO, pb, 1.0), 0.0)
    return tv(p, recon)

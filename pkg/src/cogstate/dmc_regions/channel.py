"""Finite-alphabet cognitive interference channel with state."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError

PROB_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteChannelSpec:
    """Transition tensor ``W[x1, x2, s, y, z] = P(y, z | x1, x2, s)``."""

    state_pmf: np.ndarray
    transition: np.ndarray

    def __post_init__(self):
        ps = np.asarray(self.state_pmf, dtype=float)
        w = np.asarray(self.transition, dtype=float)
        object.__setattr__(self, "state_pmf", ps)
        object.__setattr__(self, "transition", w)
        if w.ndim != 5:
            raise ValidationError("transition must have shape (|X1|, |X2|, |S|, |Y|, |Z|)")
        if ps.ndim != 1 or ps.shape[0] != w.shape[2]:
            raise ValidationError("state pmf length must equal |S|")
        for name, arr in (("state pmf", ps), ("transition", w)):
            if not np.all(np.isfinite(arr)) or arr.min() < 0 or arr.max() > 1 + PROB_TOL:
                raise ValidationError(f"{name} entries must lie in [0, 1]")
        if abs(ps.sum() - 1.0) > PROB_TOL:
            raise ValidationError(f"state pmf sums to {ps.sum()!r}")
        sums = w.sum(axis=(3, 4))
        if np.max(np.abs(sums - 1.0)) > PROB_TOL:
            raise ValidationError("each (x1, x2, s) slice of the transition must sum to 1")

    # sizes ---------------------------------------------------------------
    @property
    def sizes(self) -> dict[str, int]:
        x1, x2, s, y, z = self.transition.shape
        return {"X1": x1, "X2": x2, "S": s, "Y": y, "Z": z}

    def __eq__(self, other):
        return (isinstance(other, DiscreteChannelSpec)
                and np.array_equal(self.state_pmf, other.state_pmf)
                and np.array_equal(self.transition, other.transition))

    __hash__ = None

    def z_given(self) -> np.ndarray:
        """P(z | x1, x2, s), shape (X1, X2, S, Z)."""
        return self.transition.sum(axis=3)

    def y_given(self) -> np.ndarray:
        return self.transition.sum(axis=4)

    # construction helpers -----------------------------------------------
    @classmethod
    def from_functions(cls, sizes: dict[str, int], state_pmf, y_fn, z_fn) -> "DiscreteChannelSpec":
        """Build from per-input output pmfs ``y_fn(x1, x2, s)`` and ``z_fn(x1, x2, s, y)``.

        ``z_fn`` may ignore ``y``; the joint is P(y|x) P(z|x, y).
        """
        shape = (sizes["X1"], sizes["X2"], sizes["S"], sizes["Y"], sizes["Z"])
        w = np.zeros(shape)
        for x1 in range(shape[0]):
            for x2 in range(shape[1]):
                for s in range(shape[2]):
                    py = np.asarray(y_fn(x1, x2, s), dtype=float)
                    for y in range(shape[3]):
                        if py[y] > 0:
                            w[x1, x2, s, y] = py[y] * np.asarray(z_fn(x1, x2, s, y), dtype=float)
        return cls(np.asarray(state_pmf, dtype=float), w)

    # JSON ----------------------------------------------------------------
    def to_dict(self) -> dict:
        sz = self.sizes
        return {"x1_size": sz["X1"], "x2_size": sz["X2"], "s_size": sz["S"],
                "y_size": sz["Y"], "z_size": sz["Z"],
                "state_pmf": self.state_pmf.tolist(),
                "transition": self.transition.ravel().tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "DiscreteChannelSpec":
        try:
            shape = tuple(int(d[k]) for k in ("x1_size", "x2_size", "s_size", "y_size", "z_size"))
            flat = np.asarray(d["transition"], dtype=float)
            pmf = np.asarray(d["state_pmf"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad channel JSON: {exc}") from None
        if min(shape) < 1:
            raise ValidationError("alphabet sizes must be positive")
        if flat.size != int(np.prod(shape)):
            raise ValidationError(f"transition has {flat.size} entries, expected {int(np.prod(shape))}")
        return cls(pmf, flat.reshape(shape))

    @classmethod
    def from_json(cls, text: str) -> "DiscreteChannelSpec":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"channel file is not JSON: {exc}") from None


# ---------------------------------------------------------------------------
# example channels

def xor_erasure_channel(erasure: float = 0.5, x1_size: int = 2) -> DiscreteChannelSpec:
    """Z = X2 xor S (binary, uniform state), Y = Z erased with the given probability.

    Semideterministic and degraded; X1 does not enter the outputs.
    """
    sizes = {"X1": x1_size, "X2": 2, "S": 2, "Y": 3, "Z": 2}

    def y_fn(x1, x2, s):
        z = x2 ^ s
        out = np.zeros(3)
        out[z] = 1 - erasure
        out[2] = erasure
        return out

    def z_fn(x1, x2, s, y):
        out = np.zeros(2)
        out[x2 ^ s] = 1.0
        return out

    return DiscreteChannelSpec.from_functions(sizes, [0.5, 0.5], y_fn, z_fn)


def noiseless_pair_channel() -> DiscreteChannelSpec:
    """Y = Z = (X1, X2) with binary inputs and a constant state."""
    sizes = {"X1": 2, "X2": 2, "S": 1, "Y": 4, "Z": 4}

    def one_hot(i):
        v = np.zeros(4)
        v[i] = 1.0
        return v

    return DiscreteChannelSpec.from_functions(
        sizes, [1.0], lambda x1, x2, s: one_hot(2 * x1 + x2), lambda x1, x2, s, y: one_hot(y))


def dirty_xor_channel() -> DiscreteChannelSpec:
    """Z = X2 xor S with a uniform binary state known at transmitter 2; Y = Z."""
    sizes = {"X1": 1, "X2": 2, "S": 2, "Y": 2, "Z": 2}

    def one_hot(i):
        v = np.zeros(2)
        v[i] = 1.0
        return v

    return DiscreteChannelSpec.from_functions(
        sizes, [0.5, 0.5], lambda x1, x2, s: one_hot(x2 ^ s), lambda x1, x2, s, y: one_hot(y))


def random_channel(sizes: dict[str, int], rng: np.random.Generator, degraded: bool = False,
                   concentration: float = 1.0) -> DiscreteChannelSpec:
    """Random channel; with ``degraded`` Y is drawn through a kernel P(y|z)."""
    x1, x2, s, y, z = (sizes[k] for k in ("X1", "X2", "S", "Y", "Z"))
    ps = rng.dirichlet(np.full(s, concentration))
    if degraded:
        pz = rng.dirichlet(np.full(z, concentration), size=(x1, x2, s))
        pyz = rng.dirichlet(np.full(y, concentration), size=z)          # P(y | z)
        w = np.einsum("abcz,zy->abcyz", pz, pyz)
    else:
        w = rng.dirichlet(np.full(y * z, concentration), size=(x1, x2, s)).reshape(x1, x2, s, y, z)
    return DiscreteChannelSpec(ps, w)

"""Structural channel conditions and the less-noisy falsifier."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .channel import DiscreteChannelSpec
from .joint import JointDistribution, from_factors

COND_TOL = 1e-9
ZERO = 1e-15
VIOLATION_TOL = 1e-9


def _kernel_residual(joint: np.ndarray, cond: np.ndarray, pool_axes: tuple[int, ...]) -> float:
    """Fit P(out | cond-cell) shared across ``pool_axes`` and return the worst
    per-cell total-variation residual of the reconstruction.

    ``joint[..., out]`` and ``cond[...]`` are P(out, c | x) and P(c | x); the
    kernel ratio joint/cond must not depend on the pooled input axes.
    """
    w = cond[..., None]
    num = joint.sum(axis=pool_axes, keepdims=True)
    den = cond.sum(axis=pool_axes, keepdims=True)[..., None]
    kern = np.where(den > ZERO, num / np.where(den > ZERO, den, 1.0), 0.0)
    recon = w * kern
    diff = np.abs(joint - recon)
    # TV per input cell (x1, x2, s)
    return float(0.5 * diff.reshape(diff.shape[0], diff.shape[1], diff.shape[2], -1).sum(axis=-1).max())


def condition_residual(channel: DiscreteChannelSpec, which: str) -> float:
    """Reconstruction residual for cond5 / cond1 / cond2 (0 when it holds)."""
    w = channel.transition                                    # (X1, X2, S, Y, Z)
    if which == "cond5":
        # P(y,z|x) = P(z|x) P(y|z): ratio P(y,z|x)/P(z|x) may depend on z only
        j = np.transpose(w, (0, 1, 2, 4, 3))                  # (X1, X2, S, Z, Y)
        return _kernel_residual(j, j.sum(axis=-1), (0, 1, 2))
    if which == "cond1":
        # P(z|x) P(y|z, x1, s): pooled over x2 only
        j = np.transpose(w, (0, 1, 2, 4, 3))
        return _kernel_residual(j, j.sum(axis=-1), (1,))
    if which == "cond2":
        # P(y|x) P(z|y, x1, s)
        return _kernel_residual(w, w.sum(axis=-1), (1,))
    raise ValidationError(f"unknown condition {which!r}; expected cond5, cond1 or cond2")


def check_condition(channel: DiscreteChannelSpec, which: str, tol: float = COND_TOL) -> bool:
    return condition_residual(channel, which) <= tol


def check_semidet(channel: DiscreteChannelSpec) -> bool:
    pz = channel.z_given()
    return bool(np.all((pz <= ZERO) | (pz >= 1.0 - ZERO)))


# ---------------------------------------------------------------------------
# falsifier

@dataclass
class Verdict:
    falsified: bool
    which: str
    witness: JointDistribution | None = None
    violation: float = 0.0
    evaluated: int = 0
    resolution: str = ""

    def __str__(self):
        if self.falsified:
            return f"Falsified({self.which}, violation={self.violation:.6g} bits)"
        return f"NotFalsified({self.which}; {self.resolution}; not a proof)"


def _violations(j: JointDistribution, which: str) -> np.ndarray:
    if which == "cond8":
        return j.mutual_info(("X1", "U"), "Z") - j.mutual_info(("X1", "U"), "Y")
    a = j.mutual_info("X1", "Y") - j.mutual_info("X1", "Z")
    b = j.mutual_info("U", "Y", "X1") - j.mutual_info("U", "Z", "X1")
    return np.maximum(a, b)


def _structured_kernels(sz: dict[str, int], u: int) -> list[np.ndarray]:
    """Deterministic candidates: U copies X2 (or (X2, S) folded into U)."""
    x1, x2, s = sz["X1"], sz["X2"], sz["S"]
    out = []
    for pick in range(x2):
        # X2 uniform or point mass, U = X2 (mod |U|)
        for point in (False, True):
            k = np.zeros((x1, s, u, x2))
            for a in range(x2):
                mass = (1.0 if a == pick else 0.0) if point else 1.0 / x2
                k[:, :, a % u, a] += mass
            out.append(k)
    k = np.zeros((x1, s, u, x2))          # U = (X2, S) folded
    for si in range(s):
        for a in range(x2):
            k[:, si, (a * s + si) % u, a] += 1.0 / x2
    out.append(k)
    return out


def falsify_less_noisy(channel: DiscreteChannelSpec, which: str, budget: int = 4096,
                       seed: int = 0, denominator: int = 4, batch: int = 512) -> Verdict:
    """Search joints P(x1) P(s) P(u, x2 | x1, s) for a violation of cond7/cond8.

    Candidates: structured U = X2 style joints, denominator-``denominator``
    quantized random joints, and Dirichlet draws at two concentrations.
    ``NotFalsified`` only reports that nothing was found within the budget.
    """
    if which not in ("cond7", "cond8"):
        raise ValidationError(f"unknown condition {which!r}; expected cond7 or cond8")
    if budget <= 0:
        raise ValidationError("budget must be positive")
    sz = channel.sizes
    u = sz["X1"] * sz["X2"] * sz["S"]          # cardinality cap
    rng = np.random.default_rng(seed)
    cells = u * sz["X2"]
    done = 0

    def run(px1, kern):
        nonlocal done
        j = from_factors(channel, px1, kern, ("U",), (u,))
        v = np.atleast_1d(_violations(j, which))
        done += len(v)
        i = int(np.argmax(v))
        if v[i] > VIOLATION_TOL:
            return Verdict(True, which, j.take(i), float(v[i]), done, "")
        return None

    # structured candidates with uniform and skewed X1
    x1s = [np.full(sz["X1"], 1.0 / sz["X1"])] + [np.eye(sz["X1"])[i] for i in range(sz["X1"])]
    ks = _structured_kernels(sz, u)
    px1 = np.array([a for a in x1s for _ in ks])
    kern = np.array([k for _ in x1s for k in ks])
    found = run(px1[:budget], kern[:budget])
    if found:
        return found
    while done < budget:
        m = min(batch, budget - done)
        third = m // 3
        # quantized draws: multinomial counts with the given denominator
        q1 = rng.multinomial(denominator, np.full(sz["X1"], 1.0 / sz["X1"]), size=third) / denominator
        qk = rng.multinomial(denominator, np.full(cells, 1.0 / cells),
                             size=(third, sz["X1"], sz["S"])) / denominator
        alpha = np.where(np.arange(m - third) % 2 == 0, 0.3, 1.0)
        d1 = np.array([rng.dirichlet(np.full(sz["X1"], a)) for a in alpha])
        dk = np.array([rng.dirichlet(np.full(cells, a), size=(sz["X1"], sz["S"])) for a in alpha])
        px1 = np.concatenate([q1, d1])
        kern = np.concatenate([qk, dk]).reshape(m, sz["X1"], sz["S"], u, sz["X2"])
        found = run(px1, kern)
        if found:
            return found
    res = (f"{done} joints (structured, denominator-{denominator} quantized, Dirichlet 0.3/1.0), "
           f"|U| = {u}")
    return Verdict(False, which, None, 0.0, done, res)

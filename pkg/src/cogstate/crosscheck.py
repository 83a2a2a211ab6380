"""Seeded sweeps comparing every Gaussian closed form with the covariance oracle."""

from __future__ import annotations

import numpy as np

from .gauss_oracle import SCHEMES, SchemeSpec, crosscheck
from .gaussian_regions import closed_forms as cf
from .gaussian_regions.params import GaussianChannelParams, SplitParams

# scheme -> (closed-form array function, split layout)
#   single: (full, 0)          equality: (f, 1 - f) of full
#   prime:  (f * full, 0)      dprime:   (full - f * full, f * full)
SCHEME_FORMS = {
    "Prop1": (cf.inner2_arrays, "single"),
    "Prop2": (cf.outer2_arrays, "prime"),
    "Prop3": (cf.inner1a_arrays, "equality"),
    "Prop4": (cf.inner1b_arrays, "equality"),
    "Cor4": (cf.outer1b_arrays, "dprime"),
    "Thm12": (cf.thm12_arrays, "equality"),
    "Thm14": (cf.outer1a_arrays, "equality"),
    "Thm15": (cf.thm15_arrays, "single"),
}


def random_draw(rng: np.random.Generator, layout: str) -> tuple[GaussianChannelParams, SplitParams]:
    """Powers and state variance in [0.01, 3], gains in [-2.5, 2.5], correlations uniform on the disk."""
    p = GaussianChannelParams(*rng.uniform(0.01, 3.0, 3), *rng.uniform(-2.5, 2.5, 3))
    r = np.sqrt(rng.uniform())
    th = rng.uniform(0.0, 2 * np.pi)
    r21, r2s = r * np.cos(th), r * np.sin(th)
    full = (1.0 - r * r) * p.p2
    f = rng.uniform()
    split = {"single": (full, 0.0), "equality": (f * full, (1 - f) * full),
             "prime": (f * full, 0.0), "dprime": (full - f * full, f * full)}[layout]
    return p, SplitParams(float(r21), float(r2s), *map(float, split))


def scheme_error(scheme: str, p: GaussianChannelParams, sp: SplitParams) -> float:
    fn, _ = SCHEME_FORMS[scheme]
    vals = {k: float(v) for k, v in fn(p, sp.rho21, sp.rho2s, sp.p2_prime, sp.p2_dprime).items()}
    return crosscheck(SchemeSpec(scheme, p, sp), vals)


def oracle_sweep(draws: int = 1000, seed: int = 0, schemes=SCHEMES) -> dict[str, float]:
    """Worst |closed form - oracle| in bits per scheme over ``draws`` seeded draws each."""
    out = {}
    for i, s in enumerate(schemes):
        rng = np.random.default_rng([seed, i])
        layout = SCHEME_FORMS[s][1]
        out[s] = max(scheme_error(s, *random_draw(rng, layout)) for _ in range(draws))
    return out

"""Encoding, joint-typicality decoding and the Monte-Carlo trial loop."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass

import numpy as np

from ..dmc_regions.channel import DiscreteChannelSpec
from ..dmc_regions.joint import JointDistribution
from ..errors import DecodeFailure, EncoderFailure
from .codebooks import LayeredCodebooks, SimConfig, build_codebooks, sample_cond, typical

CSV_FIELDS = ("n", "trials", "enc_fail_t", "enc_fail_u", "enc_fail_v", "err_y", "err_z", "err_total")


def _first(mask: np.ndarray) -> int | None:
    hit = np.flatnonzero(mask)
    return int(hit[0]) if hit.size else None


def encode(cb: LayeredCodebooks, w1: int, w21: int, w22: int, s_seq: np.ndarray, eps: float,
           rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, tuple[int, int, int]]:
    """Sequential typical selection of t, u, v (smallest bin index wins), then x2.

    Returns (x1^n, x2^n, (v1, v21, v22)); raises EncoderFailure naming the layer.
    """
    law = cb.law
    x1 = cb.x1[w1]
    v1 = _first(typical([x1, s_seq, cb.t[w1]], law.marginal(["X1", "S", "T"]), eps))
    if v1 is None:
        raise EncoderFailure("t")
    t = cb.t[w1, v1]
    v21 = _first(typical([x1, s_seq, t, cb.u[w1, v1, w21]], law.marginal(["X1", "S", "T", "U"]), eps))
    if v21 is None:
        raise EncoderFailure("u")
    u = cb.u[w1, v1, w21, v21]
    cand = cb.v[w1, v1, w21, v21, w22]
    v22 = _first(typical([x1, s_seq, t, u, cand], law.marginal(["X1", "S", "T", "U", "V"]), eps))
    if v22 is None:
        raise EncoderFailure("v")
    v = cand[v22]
    x2 = sample_cond(rng, law.x2_given, x1, s_seq, t, u, v)
    return x1, x2, (v1, v21, v22)


def decode_y(cb: LayeredCodebooks, y_seq: np.ndarray, eps: float) -> tuple[int, int, int, int]:
    """Receiver 1: the tuple (w1, v1, w21, v21) jointly typical with y^n.

    Several typical tuples are tolerated when they agree on w1 (receiver 1
    does not need w21); the smallest such tuple is returned.
    """
    ok = cb.table("u").typical(np.asarray(y_seq), cb.law.marginal(["X1", "T", "U", "Y"]), eps)
    hits = np.argwhere(ok)
    if len(hits) == 0:
        raise DecodeFailure("receiver 1: no typical tuple")
    if len(np.unique(hits[:, 0])) > 1:
        raise DecodeFailure("receiver 1: typical tuples with different w1")
    return tuple(int(i) for i in hits[0])


def decode_z(cb: LayeredCodebooks, z_seq: np.ndarray, eps: float) -> tuple[int, ...]:
    """Receiver 2: the tuple (w1, v1, w21, v21, w22, v22) jointly typical with z^n.

    Ties in bin indices only are resolved to the smallest tuple; typical
    tuples carrying different messages (w1, w21, w22) are an error.
    """
    ok = cb.table("v").typical(np.asarray(z_seq), cb.law.marginal(["X1", "T", "U", "V", "Z"]), eps)
    hits = np.argwhere(ok)
    if len(hits) == 0:
        raise DecodeFailure("receiver 2: no typical tuple")
    msgs = np.unique(hits[:, [0, 2, 4]], axis=0)
    if len(msgs) > 1:
        raise DecodeFailure("receiver 2: typical tuples with different messages")
    return tuple(int(i) for i in hits[0])


def transmit(channel: DiscreteChannelSpec, x1, x2, s, rng) -> tuple[np.ndarray, np.ndarray]:
    w = channel.transition                         # (X1, X2, S, Y, Z)
    ny, nz = w.shape[3], w.shape[4]
    flat = w.reshape(w.shape[:3] + (ny * nz,))
    yz = sample_cond(rng, flat, x1, x2, s)
    return yz // nz, yz % nz


@dataclass(frozen=True)
class SimResult:
    n: int
    trials: int
    enc_fail_t: float
    enc_fail_u: float
    enc_fail_v: float
    err_y: float
    err_z: float
    err_total: float

    @property
    def enc_fail(self) -> float:
        return self.enc_fail_t + self.enc_fail_u + self.enc_fail_v

    @property
    def err_z_any(self) -> float:
        """Receiver 2 misses its messages: decoding error or encoder failure."""
        return self.err_z + self.enc_fail

    def half_width(self, rate: float, z: float = 1.96) -> float:
        """Normal-approximation confidence half-width for an empirical rate."""
        return float(z * np.sqrt(max(rate * (1 - rate), 0.0) / self.trials))

    def to_row(self) -> dict:
        return asdict(self)


def simulate(channel: DiscreteChannelSpec, gen: JointDistribution, cfg: SimConfig,
             codebooks: LayeredCodebooks | None = None) -> SimResult:
    """Encode, transmit and decode ``cfg.trials`` independent blocks.

    Encoder failures are counted per layer and such trials are not decoded, so
    failure and decoding-error counts are disjoint; ``err_total`` counts a
    trial once if anything went wrong.
    """
    cb = codebooks if codebooks is not None else build_codebooks(channel, gen, cfg)
    m1, _, m21, _, m22, _ = cfg.sizes()
    fail = {"t": 0, "u": 0, "v": 0}
    ey = ez = bad = 0
    for trial in range(cfg.trials):
        rng = np.random.default_rng([cfg.seed, 1, trial])
        w1, w21, w22 = (int(rng.integers(m)) for m in (m1, m21, m22))
        s = sample_cond(rng, np.broadcast_to(cb.law.p_s, (cfg.n, len(cb.law.p_s))))
        try:
            x1, x2, _ = encode(cb, w1, w21, w22, s, cfg.eps, rng)
        except EncoderFailure as e:
            fail[e.layer] += 1
            bad += 1
            continue
        y, z = transmit(channel, x1, x2, s, rng)
        try:
            wrong_y = decode_y(cb, y, cfg.eps)[0] != w1
        except DecodeFailure:
            wrong_y = True
        try:
            d = decode_z(cb, z, cfg.eps)
            wrong_z = (d[0], d[2], d[4]) != (w1, w21, w22)
        except DecodeFailure:
            wrong_z = True
        ey += wrong_y
        ez += wrong_z
        bad += wrong_y or wrong_z
    k = cfg.trials
    return SimResult(cfg.n, k, fail["t"] / k, fail["u"] / k, fail["v"] / k, ey / k, ez / k, bad / k)


def lemma_margins(gen: JointDistribution, cfg: SimConfig) -> dict[str, float]:
    """Slack (bits) of every covering and packing constraint of the scheme; > 0 means satisfied."""
    from ..dmc_regions.bounds import _with_aux
    j = _with_aux(gen, ("T", "U", "V"))
    r1, r21, r22 = cfg.rates
    b1, b21, b22 = cfg.bins
    mi = j.mutual_info
    return {
        "cover_t": b1 - mi("T", "S", "X1"),
        "cover_u": b21 - mi("U", "S", ("X1", "T")),
        "cover_v": b22 - mi("V", "S", ("X1", "T", "U")),
        "dec1": mi(("T", "U", "X1"), "Y") - (r1 + b1 + r21 + b21),
        "dec2_v": mi("V", "Z", ("X1", "T", "U")) - (r22 + b22),
        "dec2_uv": mi(("U", "V"), "Z", ("X1", "T")) - (r21 + b21 + r22 + b22),
        "dec2_tuv": mi(("T", "U", "V"), "Z", "X1") - (b1 + r21 + b21 + r22 + b22),
        "dec2_all": mi(("T", "U", "V", "X1"), "Z") - (r1 + b1 + r21 + b21 + r22 + b22),
    }


def results_csv(results: list[SimResult]) -> str:
    buf = io.StringIO()
    wr = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    wr.writeheader()
    for r in results:
        wr.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.to_row().items()})
    return buf.getvalue()


def dirty_xor_scheme():
    """Channel Z = Y = X2 xor S with the dirty-paper generation law V ~ Bern(1/2), X2 = V xor S."""
    from ..dmc_regions.channel import dirty_xor_channel
    from ..dmc_regions.joint import from_factors
    ch = dirty_xor_channel()
    kern = np.zeros((1, 2, 1, 1, 2, 2))            # (X1, S, T, U, V, X2)
    for s in range(2):
        for v in range(2):
            kern[0, s, 0, 0, v, v ^ s] = 0.5
    return ch, from_factors(ch, np.ones(1), kern, ("T", "U", "V"), (1, 1, 2))

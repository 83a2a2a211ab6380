"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 failed internal check (oracle
mismatch, derivation mismatch, ...).  Every command that writes files also
writes ``<output>.manifest.json`` (or ``manifest.json`` in an output
directory) recording the argv needed to reproduce it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CheckFailure, CogStateError, ValidationError

ORACLE_TOL = 1e-9

FIG_PARAMS = {
    "2": (1.0, 1.0, 1.0, 1.5, 1.6, 0.9),
    "3": (1.0, 1.0, 1.0, 0.8, 0.85, 0.9),
}
FIG_FILES = {
    "2": {"fig2_inner.csv": "inner2", "fig2_outer.csv": "outer2"},
    "3": {"fig3_inner1.csv": "inner1a", "fig3_inner2.csv": "inner1b",
          "fig3_outer1.csv": "outer1a", "fig3_outer2.csv": "outer1b"},
}


@dataclass
class RunManifest:
    subcommand: str
    argv: list[str]
    parameters: dict
    seed: int | None
    version: str = __version__
    outputs: list[str] = field(default_factory=list)
    wall_clock_s: float = 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))


def rerun(manifest: RunManifest) -> int:
    """Re-execute the command recorded in a manifest."""
    return run(manifest.argv)


# ---------------------------------------------------------------------------
# argument helpers

def _floats(text: str, k: int | None = None, flag: str = "") -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise ValidationError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if k is not None and len(vals) != k:
        raise ValidationError(f"{flag}: expected {k} values, got {len(vals)}")
    return vals


def _params(text: str):
    from .gaussian_regions import GaussianChannelParams
    return GaussianChannelParams(*_floats(text, 6, "--params"))


def _grid(args):
    from .gaussian_regions import GridSpec
    if args.grid is None:
        return GridSpec()
    return GridSpec(n_rho=args.grid, n_split=args.n_split or args.grid)


BUILTIN_CHANNELS = ("dirty_xor", "xor_erasure", "noiseless_pair")


def _channel(text: str):
    from .dmc_regions import (DiscreteChannelSpec, dirty_xor_channel, noiseless_pair_channel,
                              xor_erasure_channel)
    if text.startswith("builtin:"):
        name = text.split(":", 1)[1]
        table = {"dirty_xor": dirty_xor_channel, "xor_erasure": xor_erasure_channel,
                 "noiseless_pair": noiseless_pair_channel}
        if name not in table:
            raise ValidationError(f"--channel: unknown builtin {name!r}; choose from {BUILTIN_CHANNELS}")
        return table[name]()
    return DiscreteChannelSpec.from_json(_read(text, "--channel"))


def _joint(text: str, flag: str):
    from .dmc_regions import JointDistribution
    if text == "builtin:dirty_xor":
        from .gp_simulator import dirty_xor_scheme
        return dirty_xor_scheme()[1]
    return JointDistribution.from_json(_read(text, flag))


def _read(path: str, flag: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise ValidationError(f"{flag}: cannot read {path!r} ({e.strerror})") from None


def _aux(text: str | None) -> dict | None:
    if not text:
        return None
    out = {}
    for part in text.split(","):
        if "=" not in part:
            raise ValidationError(f"--aux: expected NAME=SIZE, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = int(v)
    return out


def _emit(text: str, out: str | None, outputs: list[str]):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
        outputs.append(out)
    else:
        sys.stdout.write(text)


def _need_seed(args):
    if args.seed is None:
        raise ValidationError(f"{args.cmd} is randomized: --seed is required")


# ---------------------------------------------------------------------------
# subcommands (each returns an exit code and appends written paths)

def cmd_gauss_region(args, outputs):
    from .gaussian_regions import frontier
    fr = frontier(_params(args.params), args.bound, _grid(args), refine=not args.no_refine)
    _emit(fr.to_json() if args.json else fr.to_csv(nats=args.nats), args.out, outputs)
    return 0


def cmd_certify(args, outputs):
    from .gaussian_regions import RateFrontier, certify_case1a, certify_case1b, certify_case2
    fn = {"6": certify_case2, "8": certify_case1a, "9": certify_case1b}[args.theorem]
    pts = fn(_params(args.params), _grid(args))
    fr = RateFrontier(tuple(pts), {"theorem": f"thm{args.theorem}"})
    _emit(fr.to_json() if args.json else fr.to_csv(), args.out, outputs)
    if not pts:
        print(f"no point certified by theorem {args.theorem}", file=sys.stderr)
    return 0


def cmd_capacity(args, outputs):
    from .gaussian_regions import capacity_region
    fr = capacity_region(_params(args.params), args.assert_cond, _grid(args), args.state_at_rx2)
    _emit(fr.to_json() if args.json else fr.to_csv(), args.out, outputs)
    return 0


def cmd_oracle_check(args, outputs):
    _need_seed(args)
    from .crosscheck import oracle_sweep
    worst = oracle_sweep(args.draws, args.seed)
    lines = ["scheme,max_abs_error_bits,pass"]
    ok = True
    for s, v in worst.items():
        good = v < ORACLE_TOL
        ok &= good
        lines.append(f"{s},{v!r},{'true' if good else 'false'}")
    _emit("\n".join(lines) + "\n", args.out, outputs)
    if not ok:
        raise CheckFailure("closed form and oracle disagree beyond 1e-9 bits")
    return 0


def cmd_dmc_eval(args, outputs):
    from .dmc_regions import EVALUATORS, falsify_less_noisy
    ch = _channel(args.channel)
    joint = _joint(args.joint, "--joint")
    b = args.bound
    if b in ("thm3", "thm4"):
        res = EVALUATORS[b](joint, ch)
    elif b == "thm5":
        if args.assert_cond is None:
            asserted = falsify_less_noisy(ch, "cond8", seed=args.seed or 0) if args.falsify else False
        else:
            if str(args.assert_cond) != "8":
                raise ValidationError("--assert-cond: the less-noisy capacity needs condition 8")
            asserted = True
        res = EVALUATORS[b](joint, asserted)
    else:
        res = EVALUATORS[b](joint)
    payload = {k: v.to_dict() for k, v in res.items()} if isinstance(res, dict) else res.to_dict()
    _emit(json.dumps(payload, indent=1, sort_keys=True) + "\n", args.out, outputs)
    return 0


def cmd_dmc_optimize(args, outputs):
    _need_seed(args)
    from .dmc_regions import SearchSpec, optimize_region
    ch = _channel(args.channel)
    spec = SearchSpec(denominator=args.denominator, aux_sizes=_aux(args.aux), seed=args.seed,
                      exhaustive_limit=args.exhaustive_limit)
    r = optimize_region(ch, args.bound, _floats(args.weights, 2, "--weights"), spec)
    payload = {"bound": args.bound, "value": r.value, "rates": list(r.rates), "evaluated": r.evaluated,
               "mode": r.mode, "aux_sizes": r.aux_sizes,
               "joint": json.loads(r.joint.to_json()) if r.joint is not None else None}
    _emit(json.dumps(payload, indent=1, sort_keys=True) + "\n", args.out, outputs)
    return 0


def cmd_dmc_conditions(args, outputs):
    from .dmc_regions import check_semidet, condition_residual, falsify_less_noisy
    ch = _channel(args.channel)
    out = {c: {"residual": condition_residual(ch, c)} for c in ("cond5", "cond1", "cond2")}
    for c in out:
        out[c]["holds"] = out[c]["residual"] <= 1e-9
    out["semideterministic"] = check_semidet(ch)
    if args.falsify:
        _need_seed(args)
        for c in ("cond7", "cond8"):
            v = falsify_less_noisy(ch, c, budget=args.budget, seed=args.seed)
            out[c] = {"falsified": v.falsified, "violation": v.violation, "evaluated": v.evaluated,
                      "verdict": str(v)}
    _emit(json.dumps(out, indent=1, sort_keys=True) + "\n", args.out, outputs)
    return 0


def cmd_fm_derive(args, outputs):
    from .fm_polytope import derive_thm1
    derived, report = derive_thm1(args.omit or ())
    text = derived.to_text() if args.system else report.summary() + "\n"
    _emit(text, args.out, outputs)
    if not report.exact:
        raise CheckFailure(f"derivation mismatch: {len(report.extra)} extra, {len(report.missing)} missing rows")
    return 0


def cmd_gp_sim(args, outputs):
    _need_seed(args)
    from .gp_simulator import SimConfig, results_csv, simulate
    ch = _channel(args.channel)
    gen = _joint(args.gen, "--gen")
    rates = _floats(args.rates, 3, "--rates")
    bins = _floats(args.bins, 3, "--bins")
    ns = [int(x) for x in _floats(args.n, None, "--n")]
    res = [simulate(ch, gen, SimConfig(n, rates, bins, args.eps, args.trials, args.seed)) for n in ns]
    _emit(results_csv(res), args.out, outputs)
    return 0


def cmd_reproduce_fig(args, outputs):
    from .gaussian_regions import (GaussianChannelParams, RateFrontier, certify_case1a, certify_case1b,
                                   certify_case2, frontier)
    p = GaussianChannelParams(*FIG_PARAMS[args.which])
    grid = _grid(args)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, bound in FIG_FILES[args.which].items():
        _emit(frontier(p, bound, grid).to_csv(), str(outdir / name), outputs)
    certs = ({"fig2_certified_thm6.csv": certify_case2} if args.which == "2" else
             {"fig3_certified_thm8.csv": certify_case1a, "fig3_certified_thm9.csv": certify_case1b})
    for name, fn in certs.items():
        _emit(RateFrontier(tuple(fn(p, grid))).to_csv(), str(outdir / name), outputs)
    return 0


COMMANDS = {
    "gauss-region": cmd_gauss_region, "certify": cmd_certify, "capacity": cmd_capacity,
    "oracle-check": cmd_oracle_check, "dmc-eval": cmd_dmc_eval, "dmc-optimize": cmd_dmc_optimize,
    "dmc-conditions": cmd_dmc_conditions, "fm-derive": cmd_fm_derive, "gp-sim": cmd_gp_sim,
    "reproduce-fig": cmd_reproduce_fig,
}


def build_parser() -> argparse.ArgumentParser:
    from .dmc_regions import BOUND_INFO, EVALUATORS
    from .gaussian_regions import BOUNDS

    ap = argparse.ArgumentParser(prog="cogstate", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True, metavar="COMMAND")

    def common(p, seed=False, out=True, grid=False):
        if out:
            p.add_argument("--out", help="output file (default: stdout)")
        if seed:
            p.add_argument("--seed", type=int, help="RNG seed (required)")
        if grid:
            p.add_argument("--grid", type=int, help="correlation grid points per axis")
            p.add_argument("--n-split", type=int, help="power-split levels (default: --grid)")
        return p

    p = common(sub.add_parser("gauss-region", help="frontier of one Gaussian bound"), grid=True)
    p.add_argument("--bound", required=True, choices=sorted(BOUNDS))
    p.add_argument("--params", required=True, help="p1,p2,q,a,b,c")
    p.add_argument("--no-refine", action="store_true")
    p.add_argument("--nats", action="store_true")
    p.add_argument("--json", action="store_true")

    p = common(sub.add_parser("certify", help="boundary points certified by theorem 6, 8 or 9"), grid=True)
    p.add_argument("--theorem", required=True, choices=("6", "8", "9"))
    p.add_argument("--params", required=True, help="p1,p2,q,a,b,c")
    p.add_argument("--json", action="store_true")

    p = common(sub.add_parser("capacity", help="Gaussian capacity region"), grid=True)
    p.add_argument("--params", required=True, help="p1,p2,q,a,b,c")
    p.add_argument("--assert-cond", choices=("7", "8"))
    p.add_argument("--state-at-rx2", action="store_true")
    p.add_argument("--json", action="store_true")

    p = common(sub.add_parser("oracle-check", help="closed forms vs covariance oracle"), seed=True)
    p.add_argument("--draws", type=int, default=1000)

    p = common(sub.add_parser("dmc-eval", help="evaluate a DMC bound on a joint"), seed=True)
    p.add_argument("--channel", required=True, help="channel JSON or builtin:NAME")
    p.add_argument("--joint", required=True, help="joint JSON")
    p.add_argument("--bound", required=True, choices=sorted(EVALUATORS))
    p.add_argument("--assert-cond", choices=("7", "8"))
    p.add_argument("--falsify", action="store_true", help="run the less-noisy falsifier for thm5")

    p = common(sub.add_parser("dmc-optimize", help="maximize a weighted sum rate over joints"), seed=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--bound", required=True, choices=sorted(BOUND_INFO))
    p.add_argument("--weights", default="1,1")
    p.add_argument("--denominator", type=int, default=4)
    p.add_argument("--aux", help="auxiliary sizes, e.g. U=4,V=2")
    p.add_argument("--exhaustive-limit", type=int, default=2_000_000)

    p = common(sub.add_parser("dmc-conditions", help="check structural channel conditions"), seed=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--falsify", action="store_true", help="also search for less-noisy violations")
    p.add_argument("--budget", type=int, default=4096)

    p = common(sub.add_parser("fm-derive", help="re-derive the main inner bound by elimination"))
    p.add_argument("--omit", action="append", help="drop an input row by label (repeatable)")
    p.add_argument("--system", action="store_true", help="print the derived system in text format")

    p = common(sub.add_parser("gp-sim", help="Monte-Carlo run of the layered binning scheme"), seed=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--gen", required=True, help="generation joint JSON or builtin:dirty_xor")
    p.add_argument("--n", required=True, help="blocklength(s), comma separated")
    p.add_argument("--rates", required=True, help="R1,R21,R22")
    p.add_argument("--bins", required=True, help="bin rates R~1,R~21,R~22")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=1000)

    p = common(sub.add_parser("reproduce-fig", help="frontier datasets for a figure"), out=False, grid=True)
    p.add_argument("--which", required=True, choices=("2", "3"))
    p.add_argument("--outdir", default=".")
    return ap


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:               # argparse already printed the offending flag
        return int(e.code or 0)
    outputs: list[str] = []
    t0 = time.perf_counter()
    try:
        code = COMMANDS[args.cmd](args, outputs)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (CheckFailure, CogStateError) as e:
        print(f"check failed: {e}", file=sys.stderr)
        return 3
    if outputs:
        params = {k: v for k, v in vars(args).items() if k != "cmd"}
        man = RunManifest(args.cmd, argv, params, getattr(args, "seed", None), outputs=outputs,
                          wall_clock_s=round(time.perf_counter() - t0, 3))
        target = (Path(args.outdir) / "manifest.json" if args.cmd == "reproduce-fig"
                  else Path(outputs[0] + ".manifest.json"))
        target.write_text(man.to_json() + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command-line entry point: ``qmrlab <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import experiments as ex
from .classical import pairwise_expectations, classical_winner
from .exceptions import QmrError
from .preferences import labels
from .readout import InvalidPolicy


def _config(args):
    if args.config:
        cfg = ex.ExperimentConfig.load(args.config)
    else:
        preset = args.preset or "exp1"
        if preset not in ex.PRESETS:
            raise SystemExit(f"preset {preset!r} is not a sweep preset; use one of {sorted(ex.PRESETS)}")
        cfg = ex.PRESETS[preset]()
        if getattr(args, "hardware_like", False):
            cfg = ex.preset_hardware_like(cfg)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def cmd_classical(args):
    cfg = _config(args)
    tally = pairwise_expectations(cfg.profile_array)
    names = labels(cfg.m)
    for a in range(cfg.m):
        for b in range(a + 1, cfg.m):
            print(f"{names[a]}>{names[b]}: {tally.expected[a, b]:g}   {names[b]}>{names[a]}: {tally.expected[b, a]:g}")
    win = classical_winner(cfg.profile_array)
    print("Condorcet winner:", "none" if win is None else names[win])


def cmd_qmr_analytic(args):
    print(json.dumps(ex.analytic_report(_config(args)), indent=2))


def cmd_qmr_sweep(args):
    cfg = _config(args)
    out = ex.resolve_out_dir(cfg.out_dir, args.out, default=f"results/{cfg.name}")
    rep = ex.run_sweep(cfg, out, workers=args.workers)
    print(ex.report(rep.out_dir))


def cmd_qmr_shots(args):
    cfg = _config(args)
    if args.noise:
        cfg = replace(cfg, grid=tuple(args.noise))
    out = ex.resolve_out_dir(cfg.out_dir, args.out, default=f"results/{cfg.name}-shots")
    ex.run_shot_convergence(cfg, args.shots, out, workers=args.workers)
    print(ex.report(out))


def cmd_qmr2_run(args):
    seed = ex.SEED_QMR2 if args.seed is None else args.seed
    out = ex.resolve_out_dir(None, args.out, default="results/qmr2")
    ex.run_qmr2_scenarios(out, k=args.k, iterations=args.iterations, policy=args.policy,
                          seed=seed, workers=args.workers)
    print(ex.report(out))


def cmd_report(args):
    print(ex.report(ex.resolve_out_dir(None, args.out)))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config (JSON)")
    common.add_argument("--preset", choices=["exp1", "exp2", "qmr2"])
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory (overrides $QMRLAB_OUT)")
    common.add_argument("--workers", type=int, default=1)

    parser = argparse.ArgumentParser(prog="qmrlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classical", parents=[common], help="pairwise tallies and Condorcet winner")
    p.set_defaults(func=cmd_classical)

    qmr = sub.add_parser("qmr", help="QMR constitution").add_subparsers(dest="qmr_command", required=True)
    p = qmr.add_parser("analytic", parents=[common], help="exact rho_soc and winner")
    p.set_defaults(func=cmd_qmr_analytic)
    p = qmr.add_parser("sweep", parents=[common], help="noise sweep -> metrics.csv, runs.jsonl")
    p.add_argument("--hardware-like", action="store_true", help="50 shots, 10 runs")
    p.set_defaults(func=cmd_qmr_sweep)
    p = qmr.add_parser("shots", parents=[common], help="winner agreement versus shot count")
    p.add_argument("--shots", type=int, nargs="+", default=list(ex.DEFAULT_SHOT_GRID))
    p.add_argument("--noise", type=float, nargs="+", help="noise levels (default: config grid)")
    p.set_defaults(func=cmd_qmr_shots)

    q2 = sub.add_parser("qmr2", help="entanglement testbed").add_subparsers(dest="qmr2_command", required=True)
    p = q2.add_parser("run", parents=[common], help="all scenarios x noise levels")
    p.add_argument("-k", type=int, default=4, help="voters per iteration")
    p.add_argument("--iterations", type=int, default=10_000)
    p.add_argument("--policy", choices=[e.value for e in InvalidPolicy], default="discard")
    p.set_defaults(func=cmd_qmr2_run)

    p = sub.add_parser("report", parents=[common], help="print the CSV outputs of a run directory")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (QmrError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

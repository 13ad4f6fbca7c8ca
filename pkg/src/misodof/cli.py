"""
Command-line entry point.

    misodof sweep    --config run.cfg --alpha 0,0.5,1 --pgrid 30:5:60 --out results
    misodof theory   --alpha 0:0.05:1.2 --out results
    misodof validate --seed 3
"""
import argparse
import dataclasses
import logging
import sys

from .config import SimConfig, load_config, parse_config_text, parse_pgrid
from .errors import MisoDofError

log = logging.getLogger("misodof")


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--alpha", help="CSIT quality exponent(s): 0.5, 0,0.5,1 or start:step:stop")
    common.add_argument("--doppler", metavar="v,fc,tf,c", help="drive alpha from a Doppler model")
    common.add_argument("--schemes", help="comma list from zf,mat,mat_variant,hybrid")
    common.add_argument("--pgrid", help="power grid in dB, start:step:stop or comma list")
    common.add_argument("--trials", type=int, help="trials per grid point")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="misodof", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sweep = sub.add_parser("sweep", parents=[common], help="Monte-Carlo power sweep")
    sweep.add_argument("--no-plots", action="store_true", help="skip the PNG figures")
    sub.add_parser("theory", parents=[common], help="closed-form DoF curves")
    sub.add_parser("validate", parents=[common], help="run the invariant suite")
    return parser


def _alphas(text):
    if ":" in text:
        return parse_pgrid(text)
    return tuple(float(x) for x in text.split(",") if x.strip())


def config_from_args(args):
    """File first, then command-line overrides."""
    cfg = load_config(args.config) if args.config else SimConfig()
    lines = []
    if args.seed is not None:
        lines.append(f"seed = {args.seed}")
    if args.out is not None:
        lines.append(f"out = {args.out}")
    if args.doppler is not None:
        lines.append(f"doppler = {args.doppler}")
    if args.schemes is not None:
        lines.append(f"schemes = {args.schemes}")
    if args.pgrid is not None:
        lines.append(f"pgrid = {args.pgrid}")
    if args.trials is not None:
        lines.append(f"trials = {args.trials}")
    if args.workers is not None:
        lines.append(f"workers = {args.workers}")
    cfg = parse_config_text("\n".join(lines), cfg)
    if args.alpha is not None:
        cfg = dataclasses.replace(cfg, alphas=_alphas(args.alpha), doppler=None)
    return cfg


def _sweep(cfg, plots):
    from .dof import fit_all
    from .report import emit_report
    from .sweep import run_sweep

    cfg.validate()
    log.info("sweep: %d alpha value(s), %d grid points, schemes %s, %d trials/point",
             len(cfg.alpha_list), len(cfg.p_grid_db), ",".join(cfg.schemes), cfg.trials)
    samples = run_sweep(cfg)
    estimates = fit_all(samples)
    paths = emit_report(samples, estimates, cfg, plots=plots)
    for e in estimates:
        print(f"alpha={e.alpha:g} {e.scheme:12s} slope {e.slope:.3f} +/- {e.stderr:.3f}")
    for p in paths:
        print(p)
    return 0


def _theory(args, cfg):
    from .report import write_theory

    alphas = _alphas(args.alpha) if args.alpha else parse_pgrid("0:0.05:1.2")
    print(write_theory(cfg.out, alphas))
    return 0


def _validate(cfg):
    from .validation import run_checks

    results = run_checks(cfg.seed)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return 0 if all(ok for _, ok, _ in results) else 1


def main(argv=None):
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        if args.command == "sweep":
            return _sweep(cfg, plots=not args.no_plots)
        if args.command == "theory":
            return _theory(args, cfg)
        return _validate(cfg)
    except (MisoDofError, OSError) as exc:
        print(f"misodof: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

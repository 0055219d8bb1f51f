"""Command line entry point: ``decbandit run|sweep|bounds``.

Exit status is 0 on success, 2 on a configuration error and 1 on any other
failure.
"""
from __future__ import annotations

import argparse
import logging
import sys

from ..analytics import bound_report
from .config import ConfigError, load_config
from .runner import fmt, run_experiment, run_sweep


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="decbandit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Monte Carlo run of one configuration")
    run.add_argument("--config", required=True)
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--threads", type=int, default=1, help="worker processes")
    run.add_argument("--out", required=True)

    sweep = sub.add_parser("sweep", help="leading constant as a function of N or M")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--param", choices=["N", "M"])
    sweep.add_argument("--values", type=_int_list)
    sweep.add_argument("--trials", type=int)
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--threads", type=int, default=1)
    sweep.add_argument("--out", required=True)

    bounds = sub.add_parser("bounds", help="print the closed-form regret constants")
    bounds.add_argument("--config", required=True)
    return parser


def _overrides(cfg, args):
    changes = {}
    if getattr(args, "trials", None) is not None:
        if args.trials < 1:
            raise ConfigError([f"--trials: must be >= 1, got {args.trials}"])
        changes["trials"] = args.trials
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    return cfg.replace(**changes) if changes else cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _overrides(load_config(args.config), args)
        if args.command == "bounds":
            for key, value in bound_report(cfg.params, cfg.M).as_dict().items():
                print(f"{key} = {fmt(value)}")
        elif args.command == "run":
            res = run_experiment(cfg, out_dir=args.out, workers=args.threads)
            print(f"leading_constant = {fmt(res.leading_constant)} "
                  f"+/- {fmt(res.leading_constant_stderr)}")
        else:
            param, values = args.param, args.values
            if param is None or values is None:
                if cfg.sweep is None:
                    raise ConfigError(["sweep: give --param and --values or a [sweep] table"])
                param = param or cfg.sweep[0]
                values = values or list(cfg.sweep[1])
            for row in run_sweep(cfg, param, values, out_dir=args.out, workers=args.threads):
                print(f"{param}={row['value']}: {fmt(row['leading_constant_mean'])} "
                      f"+/- {fmt(row['stderr'])}")
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if args.command and exc.filename == args.config else 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

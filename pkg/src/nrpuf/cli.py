"""Command line entry points.

Exit codes: 0 success, 2 configuration or argument error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .core import crp_count, evaluate_grid, make_instance
from .device import Environment
from .experiments import (
    ExperimentConfig,
    load_config,
    load_instance,
    run_experiment,
    save_instance,
    standard_conditions,
    write_report,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


class _ConfigError(Exception):
    pass


def _parse_u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise _ConfigError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise _ConfigError(f"value out of 64-bit range: {text!r}")
    return value


def _parse_challenge(text: str) -> int:
    cleaned = text.lower().removeprefix("0x")
    try:
        value = int(cleaned, 16)
    except ValueError:
        raise _ConfigError(f"challenge must be hex, got {text!r}") from None
    if value >= 2**64:
        raise _ConfigError(f"challenge wider than 64 bits: {text!r}")
    return value


def _cmd_run(args) -> int:
    try:
        config = load_config(args.config)
    except OSError as exc:
        raise _ConfigError(f"cannot read config: {exc}") from exc
    except ValueError as exc:
        raise _ConfigError(str(exc)) from exc
    if args.seed is not None:
        try:
            config = replace(config, master_seed=args.seed)
        except ValueError as exc:
            raise _ConfigError(str(exc)) from exc
    report = run_experiment(config, workers=args.workers)
    written = write_report(report, args.out, fmt=args.format)
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_crp_count(args) -> int:
    try:
        count = crp_count(args.n, args.m, args.cs, l=args.l, formula=args.formula,
                          floor_log2=args.floor_log2)
    except ValueError as exc:
        raise _ConfigError(str(exc)) from exc
    print(count)
    return EXIT_OK


def _cmd_save_instance(args) -> int:
    device, _ = standard_conditions()
    offset_sigma, sense_margin = 5e-9, 2e-8
    if args.config is not None:
        try:
            cfg = load_config(args.config)
        except (OSError, ValueError) as exc:
            raise _ConfigError(str(exc)) from exc
        device = cfg.device
        offset_sigma, sense_margin = cfg.offset_sigma, cfg.sense_margin
    try:
        puf = make_instance(
            device, args.seed, rows=args.rows, cols=args.cols, cs=args.cs,
            offset_sigma=offset_sigma, sense_margin=sense_margin,
        )
    except ValueError as exc:
        raise _ConfigError(str(exc)) from exc
    save_instance(puf, args.out)
    print(args.out)
    return EXIT_OK


def _cmd_eval(args) -> int:
    puf = load_instance(args.instance)
    if args.noise_free:
        env = Environment(read_voltage=0.1, temperature=300.0)
        from .metrics import noise_free_variant

        puf = noise_free_variant(puf)
    else:
        _, env = standard_conditions()
    words = [_parse_challenge(c) for c in args.challenge]
    grid = evaluate_grid(puf, words, env, dummy_count=args.dummy,
                         trials=args.trials)
    for word, row in zip(words, grid["bit"]):
        bits = "".join(str(int(b)) for b in row)
        print(f"0x{word:016x} {bits}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nrpuf",
        description="Crossbar PUF simulation: experiments, CRP counting, "
        "instance persistence and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config, write a report")
    p_run.add_argument("--config", required=True, help="experiment config JSON")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--format", choices=("json", "csv"), default="json")
    p_run.add_argument("--seed", type=_parse_u64, default=None,
                       help="override the config's master_seed")
    p_run.add_argument("--workers", type=int, default=1,
                       help="parallel instance workers")
    p_run.set_defaults(func=_cmd_run)

    p_crp = sub.add_parser("crp-count", help="challenge-response pair count")
    p_crp.add_argument("--n", type=int, required=True, help="columns")
    p_crp.add_argument("--m", type=int, required=True, help="rows")
    p_crp.add_argument("--cs", type=int, required=True, help="columns read at once")
    p_crp.add_argument("--l", type=int, default=1, help="response bits per challenge")
    p_crp.add_argument("--formula", choices=("eq5", "table1"), default="eq5")
    p_crp.add_argument("--floor-log2", action="store_true",
                       help="round down to a whole challenge-bit count")
    p_crp.set_defaults(func=_cmd_crp_count)

    p_save = sub.add_parser("save-instance", help="build an instance, write JSON")
    p_save.add_argument("--seed", type=_parse_u64, required=True)
    p_save.add_argument("--out", required=True, help="output file")
    p_save.add_argument("--rows", type=int, default=128)
    p_save.add_argument("--cols", type=int, default=128)
    p_save.add_argument("--cs", type=int, default=5)
    p_save.add_argument("--config", default=None,
                        help="take device/comparator parameters from this config")
    p_save.set_defaults(func=_cmd_save_instance)

    p_eval = sub.add_parser("eval", help="evaluate challenges on a saved instance")
    p_eval.add_argument("--instance", required=True, help="instance JSON file")
    p_eval.add_argument("--challenge", required=True, nargs="+",
                        help="64-bit challenge(s) in hex")
    p_eval.add_argument("--dummy", type=int, default=0, help="dummy cell count")
    p_eval.add_argument("--trials", type=int, default=1)
    p_eval.add_argument("--noise-free", action="store_true",
                        help="deterministic read: no jitter, zero sense margin")
    p_eval.set_defaults(func=_cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

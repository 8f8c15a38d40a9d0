"""Command line entry point: ``psrbo run|afo-bench|oracle <config.json>``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .afo import AFO_STRATEGIES
from .driver import ConfigError, ExperimentConfig, afo_sweep, metrics_to_csv, oracle, run_bo
from .pbf import bitstring

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _int_list(text: str):
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _str_list(text: str):
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psrbo", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", type=Path)
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", type=Path, help="override the output path")
    common.add_argument("--repeats", type=int, default=1, help="run seeds seed..seed+k-1")

    sub.add_parser("run", parents=[common], help="run one BO experiment per seed")
    bench = sub.add_parser("afo-bench", parents=[common], help="AFO timing/accuracy sweep")
    bench.add_argument("--dims", type=_int_list, help="dimensions, e.g. 20,40,80")
    bench.add_argument("--afo", type=_str_list, default=["psr", "local-search"],
                       help="candidate first, then baselines")
    sub.add_parser("oracle", parents=[common], help="exhaustive optimum of the benchmark")
    return parser


def _seeded_path(path: Path, seed: int, repeats: int) -> Path:
    return path if repeats == 1 else path.with_name(f"{path.stem}_seed{seed}{path.suffix}")


def _run(args, config: ExperimentConfig) -> None:
    seeds = [config.seed + k for k in range(args.repeats)]
    if args.command == "run":
        out = args.out or (Path(config.output) if config.output else None)
        for seed in seeds:
            record = run_bo(config.replace(seed=seed))
            if out is None:
                sys.stdout.write(record.to_csv())
            else:
                record.write(_seeded_path(out, seed, args.repeats))
    elif args.command == "afo-bench":
        dims = args.dims or [config.n]
        text = metrics_to_csv(afo_sweep(config, dims, args.afo, seeds))
        out = args.out or (Path(config.output) if config.output else None)
        if out is None:
            sys.stdout.write(text)
        else:
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(text, encoding="utf-8")
    elif args.command == "oracle":
        for seed in seeds:
            x, y = oracle(config.replace(seed=seed).make_benchmark())
            print(json.dumps({"seed": seed, "x": bitstring(x), "y": y}))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        if args.repeats < 1:
            raise ConfigError("--repeats must be >= 1")
        config = ExperimentConfig.from_json(args.config)
        if args.seed is not None:
            config = config.replace(seed=args.seed)
        if args.command == "afo-bench":
            bad = [s for s in args.afo if s not in AFO_STRATEGIES]
            if bad:
                raise ConfigError(f"unknown AFO strategies: {bad}")
        config.make_benchmark()
        _run(args, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

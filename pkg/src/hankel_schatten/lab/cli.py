"""Command-line entry point: ``hankel-lab <subcommand> [options]``.

Exit status: 0 when every check passes, 1 on any check failure, 2 on a
configuration error.
"""

from __future__ import annotations

import argparse
import sys
import warnings

from .config import ConfigError, ExperimentConfig, load_config
from .experiments import RUNNERS, write_result

SUBCOMMANDS = {
    "ratio-sweep": "ratio_sweep",
    "lacunary-growth": "lacunary_growth",
    "projection-norm": "projection_norm",
    "block-sweep": "block_sweep",
    "check-suite": "check_suite",
}

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hankel-lab",
                                     description="Experiments on Schatten norms of Hankel matrices.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, experiment in SUBCOMMANDS.items():
        sp = sub.add_parser(name, help=f"run the {experiment} experiment")
        sp.add_argument("--config", metavar="PATH", help="INI or JSON config (by extension)")
        sp.add_argument("--seed", type=int, metavar="N", help="master seed (overrides the config)")
        sp.add_argument("--out", metavar="PATH", help="CSV output path (overrides output_path)")
        sp.add_argument("--jobs", type=int, default=1, metavar="N", help="worker threads (default 1)")
        sp.add_argument("--trials", type=int, metavar="N", help="trials per p (instances per family for check-suite)")
        sp.add_argument("--emit-plot-data", action="store_true",
                        help="also write (x, y, reference) triplets next to the CSV")
        if experiment == "check_suite":
            sp.add_argument("--only", action="append", metavar="FAMILY",
                            help="restrict to a check family (repeatable)")
            sp.add_argument("--index", type=int, metavar="K", help="run only corpus instance K")
            sp.add_argument("--slack", type=float, help="override the slack of inexact checks")
        sp.set_defaults(experiment=experiment)
    return parser


def _config(args) -> ExperimentConfig:
    overrides = {"experiment": args.experiment}
    for key, attr in (("seed", "seed"), ("output_path", "out"), ("trials", "trials"), ("slack", "slack")):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = value
    if args.config:
        # the subcommand decides the experiment; a config file can be shared between them
        return load_config(args.config, overrides)
    return ExperimentConfig(**overrides).validate()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    runner = RUNNERS[cfg.experiment]
    kwargs = {"jobs": args.jobs}
    if cfg.experiment == "check_suite":
        kwargs.update(only=args.only, index=args.index)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            result = runner(cfg, **kwargs)
        except ValueError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    paths = write_result(result, cfg.output_path, args.emit_plot_data)
    status = "PASS" if result.passed else "FAIL"
    print(f"{cfg.experiment}: {len(result.rows)} rows, {status}; wrote {', '.join(map(str, paths))}")
    if cfg.experiment == "check_suite":
        for failure in result.summary["failures"]:
            print(f"  failed {failure['family']}[{failure['index']}]: {failure['repro']}")
    return EXIT_OK if result.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point.

One experiment per invocation: `wicklab <verb> --config cfg.toml --out dir`.
Exit codes: 0 success, 2 configuration error, 3 solver blow-up (structured
failure written to the report), 1 unexpected crash.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .config import EXPERIMENTS, ConfigError, load_config
from .experiments import run_experiment
from .figures import render_figures
from .reporting import write_run_meta

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wicklab",
        description="Spectral laboratory for the cubic NLS on the circle and its Wick ordering.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in EXPERIMENTS:
        p = sub.add_parser(verb, help=f"run the {verb} experiment")
        p.add_argument("--config", required=True, help="TOML or JSON experiment config")
        p.add_argument("--out", default=None, help="output directory (default: config output.directory)")
        p.add_argument("--seed", type=int, default=None, help="seed override (u64)")
        p.add_argument("--threads", type=int, default=None, help="worker threads for independent samples")
        p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        cfg = load_config(args.config)
        if cfg.experiment != args.verb:
            raise ConfigError(
                f"config names experiment '{cfg.experiment}' but verb '{args.verb}' was invoked"
            )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out) if args.out else Path(cfg.output["directory"])
    try:
        report = run_experiment(cfg, out_dir, seed=args.seed, threads=args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - crash path, distinct exit code
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if not args.no_figures and cfg.output.get("figures", True):
        render_figures(report, out_dir)
    write_run_meta(
        out_dir / "run_meta.json",
        seed=report["resolved_config"]["data"].get("seed"),
        wall_time_s=time.perf_counter() - start,
        argv=["wicklab", *argv],
    )

    if report["status"] == "blowup":
        print(f"solver blow-up: {report['failure']['message']}", file=sys.stderr)
        return 3
    print(f"{args.verb}: ok ({out_dir}/report.json)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line front end: ``sparse-nlmf run | sweep | penalty-table``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .algorithms import AlgorithmKind
from .experiment import ExperimentConfig, run_monte_carlo
from .output import (
    cell_name,
    load_config,
    write_bundle,
    write_penalty_csv,
    write_summary,
)
from .penalties import default_grid, penalty_table

log = logging.getLogger("sparse_nlmf")

OUT_ENV = "SPARSE_NLMF_OUT"

# flag dest -> ExperimentConfig field
_CONFIG_FLAGS = {
    "fir": "fir_length",
    "k": "sparsity_k",
    "snr_db": "snr_db",
    "mu": "mu",
    "iters": "iterations",
    "mc": "mc_runs",
    "seed": "master_seed",
    "epsilon": "epsilon",
    "delta": "delta",
}


def _csv_list(kind):
    def parse(text: str) -> list:
        items = [t for t in text.split(",") if t.strip()]
        if not items:
            raise argparse.ArgumentTypeError("empty list")
        return [kind(t) for t in items]

    return parse


def _lambda_override(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KIND=VALUE, got {text!r}")
    try:
        return AlgorithmKind.parse(name).value, float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    # defaults are None so that only explicitly given flags override --config
    p.add_argument("--config", type=Path, help="JSON config or a previous manifest.json")
    p.add_argument("--fir", type=int, help="channel length (default 16)")
    p.add_argument("--k", type=int, help="number of nonzero taps (default 1)")
    p.add_argument("--snr-db", type=float, help="received SNR in dB; 'inf' for noiseless (default 10)")
    p.add_argument("--mu", type=float, help="initial step-size (default 2.0)")
    p.add_argument("--iters", type=int, help="iterations per trial (default 3000)")
    p.add_argument("--mc", type=int, help="Monte Carlo trials (default 100)")
    p.add_argument("--seed", type=int, help="master seed, unsigned 64-bit (default 0)")
    p.add_argument("--algorithms", type=_csv_list(str), help="comma list, e.g. NLMF,ZA,RZA,RL1")
    p.add_argument("--epsilon", type=float, help="RZA reweight factor (default 20)")
    p.add_argument("--delta", type=float, help="RL1 threshold (default 0.05)")
    p.add_argument(
        "--lambda",
        dest="lambdas",
        action="append",
        type=_lambda_override,
        metavar="KIND=VALUE",
        help="override a regularization weight; repeatable",
    )
    p.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
    p.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or ./out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-nlmf", description="Sparse NLMF channel estimation experiments."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one Monte Carlo experiment")
    _add_experiment_flags(run)

    sweep = sub.add_parser("sweep", help="run a grid of experiments")
    _add_experiment_flags(sweep)
    sweep.add_argument("--k-list", type=_csv_list(int), required=True)
    sweep.add_argument("--snr-list", type=_csv_list(float), required=True)
    sweep.add_argument("--mu-list", type=_csv_list(float), required=True)

    pen = sub.add_parser("penalty-table", help="tabulate the three sparse penalty functions")
    pen.add_argument("--epsilon", type=float, default=20.0)
    pen.add_argument("--delta", type=float, default=0.05)
    pen.add_argument("--points", type=int, default=401)
    pen.add_argument("--out", type=Path)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    """Merge a config file with flags; flags win."""
    data: dict[str, Any] = load_config(args.config) if args.config else {}
    for flag, name in _CONFIG_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[name] = value
    if args.algorithms is not None:
        data["algorithms"] = args.algorithms
    if args.lambdas:
        overrides = dict(data.get("lambda_overrides", {}))
        overrides.update(dict(args.lambdas))
        data["lambda_overrides"] = overrides
    return ExperimentConfig.from_dict(data)


def _out_dir(args: argparse.Namespace) -> Path:
    if args.out is not None:
        return args.out
    return Path(os.environ.get(OUT_ENV, "out"))


def cmd_run(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    out = _out_dir(args)
    result = run_monte_carlo(config, workers=args.workers)
    csv_path, _ = write_bundle(result, out)
    diverged = {k.value: n for k, n in result.divergence_counts.items() if n}
    log.info("wrote %s (%.1f s)%s", csv_path, result.elapsed_seconds, f", diverged: {diverged}" if diverged else "")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    base = config_from_args(args)
    out = _out_dir(args)
    cells = []
    for k in args.k_list:
        for snr in args.snr_list:
            for mu in args.mu_list:
                cell: dict[str, Any] = {"sparsity_k": k, "snr_db": snr, "mu": mu}
                try:
                    config = dataclasses.replace(base, sparsity_k=k, snr_db=snr, mu=mu)
                    cell["name"] = cell_name(config)
                    result = run_monte_carlo(config, workers=args.workers)
                    write_bundle(result, out / cell["name"])
                    cell["final_msd"] = {kind.value: v for kind, v in result.final_msd().items()}
                    log.info("cell %s done (%.1f s)", cell["name"], result.elapsed_seconds)
                except (ValueError, OSError) as exc:
                    cell.setdefault("name", f"k{k}_snr{snr!r}_mu{mu!r}")
                    cell["error"] = str(exc)
                    log.error("cell %s failed: %s", cell["name"], exc)
                cells.append(cell)
    path = write_summary(cells, out)
    log.info("wrote %s", path)
    return 1 if any("error" in c for c in cells) else 0


def cmd_penalty_table(args: argparse.Namespace) -> int:
    grid = default_grid(args.points)
    points = penalty_table(grid, epsilon=args.epsilon, delta=args.delta)
    path = write_penalty_csv(points, _out_dir(args))
    log.info("wrote %s", path)
    return 0


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "penalty-table": cmd_penalty_table}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (ValueError, KeyError) as exc:
        print(f"sparse-nlmf: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"sparse-nlmf: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

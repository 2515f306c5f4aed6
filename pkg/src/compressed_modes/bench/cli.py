"""Command-line entry point.

Exit status is 0 when every built-in check passes, 1 when a check fails and
2 on invalid input or a solver error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .. import __version__
from ..cpwbuilder import build_bcpw_set
from ..cpwtransform import CpwCoeffs, cpw_forward, cpw_inverse
from ..errors import CompressedModesError
from ..io import save_coeffs_csv, write_json
from .config import ExperimentConfig, load_config, parse_config
from .experiments import RunReport, run_experiment
from .stock import STOCK, stock_config

log = logging.getLogger("compressed_modes")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="JSON experiment config")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="random seed (unsigned 64-bit)")
    p.add_argument("--format", choices=("csv", "json"), help="data file format")
    p.add_argument("--workers", type=int, help="worker processes for sweeps")


def _overrides(args) -> dict:
    return {"output_dir": args.out, "seed": args.seed, "format": args.format, "workers": args.workers}


def _from_flags(args, data: dict) -> ExperimentConfig:
    if args.config is not None:
        return load_config(args.config).with_overrides(**_overrides(args))
    data.update({k: v for k, v in _overrides(args).items() if v is not None})
    return parse_config(data)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compressed-modes",
        description="Compressed modes and compressed plane waves: solvers and figure data.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cm", help="solve for compressed modes")
    _common(p)
    p.add_argument("--L", type=float, default=50.0)
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--N", type=int, default=5)
    p.add_argument("--mu", type=float, nargs="+", default=[30.0])
    p.add_argument(
        "--potential", choices=("free", "kronig_penney", "impurity_kronig_penney"), default="free"
    )
    p.add_argument("--ortho", choices=("full", "banded"), default="full")
    p.add_argument("--band", type=int, default=1)

    p = sub.add_parser("cpw", help="build basic compressed plane waves")
    _common(p)
    p.add_argument("--L", type=float, default=100.0)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--w", type=float, default=5.0)
    p.add_argument("--mu", type=float, default=5.0)
    p.add_argument("--levels", type=int, default=6)

    p = sub.add_parser("transform", help="CPW transforms of IKP states or of a field file")
    _common(p)
    p.add_argument("--field", type=Path, help="one-column file with field samples to transform")
    p.add_argument("--window", help="node range START:LENGTH for the windowed transforms")

    p = sub.add_parser("study", help="run an experiment by name or from --config")
    _common(p)
    p.add_argument("name", nargs="?", help="experiment name (uses its stock figure config)")

    p = sub.add_parser("reproduce", help="regenerate the data behind a figure or table")
    _common(p)
    p.add_argument("figure", nargs="?", help="figure id, e.g. fig3 or table1")
    p.add_argument("--list", action="store_true", help="list known figure ids")
    return parser


def _print_report(report: RunReport) -> int:
    for name, ok in report.checks.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    runtime = report.runtimes.get("total")
    tail = f" in {runtime:.1f}s" if runtime is not None else ""
    print(f"{report.experiment}: {'passed' if report.passed else 'FAILED'}{tail}; {len(report.files)} files")
    return 0 if report.passed else 1


def _transform_field(args) -> int:
    cfg = stock_config("fig12", **_overrides(args))
    if args.config is not None:
        cfg = load_config(args.config).with_overrides(**_overrides(args))
    grid = cfg.grid.build()
    f = np.loadtxt(args.field, ndmin=1)
    basis = build_bcpw_set(grid, cfg.cpw.mu, cfg.cpw.w, cfg.cpw.levels, cfg.cpw.options())
    coeffs = cpw_forward(f, basis)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_coeffs_csv(out / "coefficients.csv", coeffs.values, figure="fig12")
    rec = cpw_inverse(CpwCoeffs(coeffs.values, grid.L, basis.w), basis)
    resid = float(np.sqrt(grid.dx * np.sum((f - rec) ** 2)))
    write_json(out / "report.json", {"reconstruction_error": resid, "size": basis.size})
    print(f"wrote {out / 'coefficients.csv'}; reconstruction error {resid:.3e}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "reproduce":
            if args.list or not args.figure:
                for fig, data in STOCK.items():
                    print(f"{fig:8s} {data['experiment']}")
                return 0
            cfg = stock_config(args.figure, **_overrides(args))
            if args.config is not None:
                cfg = load_config(args.config).with_overrides(**_overrides(args))
        elif args.command == "study":
            if args.config is not None:
                cfg = load_config(args.config).with_overrides(**_overrides(args))
            elif args.name:
                figure = next((f for f, d in STOCK.items() if d["experiment"] == args.name), None)
                if figure is None:
                    raise ValueError(f"no stock config for experiment {args.name!r}; pass --config")
                cfg = stock_config(figure, **_overrides(args))
            else:
                raise ValueError("study needs an experiment name or --config")
        elif args.command == "cm":
            cfg = _from_flags(
                args,
                {
                    "experiment": "cm-gallery",
                    "figure": "fig3",
                    "grid": {"L": args.L, "n": args.n},
                    "potential": {"kind": args.potential},
                    "solver": {"N": args.N, "mu": args.mu, "ortho": args.ortho, "band": args.band},
                },
            )
        elif args.command == "cpw":
            cfg = _from_flags(
                args,
                {
                    "experiment": "bcpw-gallery",
                    "figure": "fig6",
                    "grid": {"L": args.L, "n": args.n},
                    "cpw": {"w": args.w, "mu": args.mu, "levels": args.levels},
                },
            )
        elif args.command == "transform":
            if args.field is not None:
                return _transform_field(args)
            extra = {}
            if args.window:
                start, length = (int(v) for v in args.window.split(":"))
                extra = {"window": [start, length]}
            cfg = stock_config("fig13", **_overrides(args))
            if args.config is not None:
                cfg = load_config(args.config).with_overrides(**_overrides(args))
            if extra:
                data = cfg.model_dump()
                data["cpw"].update(extra)
                cfg = parse_config(data)
        else:  # pragma: no cover - argparse enforces the choices
            raise ValueError(args.command)
        report = run_experiment(cfg)
    except (CompressedModesError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return _print_report(report)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line orchestration: scans, collapse, verification, figure recipes.

Exit codes: 0 success, 1 verification or science failure, 2 usage/config
error.  All randomness flows from seeds in the config (or ``--seed``); no
network access anywhere.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Optional

from .disorder import COHERENT
from .ensemble import (ScanSpec, TASK_CONDUCTIVITY, TASK_ENTANGLEMENT,
                       TASK_INVARIANT, default_workers, run_scan,
                       write_rows_csv)
from .errors import FermicircError, InvalidInput
from .presets import FIGURES
from .scaling import collapse
from .verify import run_verification


def _load_spec(path: str, task: str, seed: Optional[int]) -> ScanSpec:
    with open(path) as fh:
        cfg = json.load(fh)
    cfg.setdefault("task", task)
    if cfg["task"] != task:
        raise InvalidInput(f"config task {cfg['task']!r} does not match subcommand")
    if seed is not None:
        cfg["base_seed"] = seed
    return ScanSpec.from_dict(cfg)


def _scan_command(args, task: str) -> int:
    try:
        spec = _load_spec(args.config, task, args.seed)
    except (OSError, json.JSONDecodeError, InvalidInput, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    workers = args.workers if args.workers else default_workers()
    try:
        records = run_scan(spec, out_dir=args.out, workers=workers)
    except FermicircError as exc:
        print(f"scan failed: {exc}", file=sys.stderr)
        return 1
    print(f"{len(records)} sweep points -> {args.out}")
    return 0


def _read_csv(path: str):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def _collapse_command(args) -> int:
    try:
        rows = _read_csv(args.input)
        if not rows:
            raise InvalidInput("empty input table")
        for col in (args.param, args.x, args.y):
            if col not in rows[0]:
                raise InvalidInput(f"column {col!r} not in {args.input}")
    except (OSError, InvalidInput) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    curves = {}
    for row in rows:
        key = float(row[args.param])
        err = float(row[args.err]) if args.err and row.get(args.err) else 0.0
        curves.setdefault(key, []).append((float(row[args.x]), float(row[args.y]), err))
    curve_list = []
    for key in sorted(curves):
        pts = sorted(curves[key])
        curve_list.append((key, [p[0] for p in pts], [p[1] for p in pts],
                           [p[2] for p in pts]))
    try:
        result = collapse(curve_list)
    except FermicircError as exc:
        print(f"collapse failed: {exc}", file=sys.stderr)
        return 1
    os.makedirs(args.out, exist_ok=True)
    write_rows_csv(os.path.join(args.out, "collapse.csv"),
                   ["parameter", "scale_factor"],
                   [{"parameter": k, "scale_factor": v}
                    for k, v in sorted(result.factors.items())])
    write_rows_csv(os.path.join(args.out, "master_curve.csv"),
                   ["x_rescaled", "y_master"],
                   [{"x_rescaled": float(u), "y_master": float(y)}
                    for u, y in result.master])
    points = []
    for key, xs, ys, errs in curve_list:
        f = result.factors[key]
        for x, y, e in zip(xs, ys, errs):
            points.append({"parameter": key, "x_rescaled": x / f, "y": y, "yerr": e})
    write_rows_csv(os.path.join(args.out, "collapsed_points.csv"),
                   ["parameter", "x_rescaled", "y", "yerr"], points)
    _write_collapse_plot(args.out, args.x, args.y)
    print(f"residual spread {result.residual:.4g} -> {args.out}")
    return 0


def _write_collapse_plot(out_dir, xcol, ycol) -> None:
    lines = [
        "# gnuplot script: collapsed data against the master curve",
        'set datafile separator ","',
        "set key outside",
        f'set xlabel "{xcol} / scale factor"',
        f'set ylabel "{ycol}"',
        "set logscale x",
        'plot "master_curve.csv" skip 1 using 1:2 with lines lw 2 title "master", \\',
        '     "collapsed_points.csv" skip 1 using 2:3:4 with yerrorbars '
        'pointtype 7 pointsize 0.5 title "data"',
    ]
    with open(os.path.join(out_dir, "plot_collapse.gp"), "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _verify_command(args) -> int:
    results = run_verification(verbose=True)
    n_fail = sum(1 for _n, ok, _d in results if not ok)
    print(f"{len(results) - n_fail}/{len(results)} checks passed")
    return 1 if n_fail else 0


def _figure_command(args) -> int:
    if args.name not in FIGURES:
        print(f"unknown figure {args.name!r}; choose from {sorted(FIGURES)}",
              file=sys.stderr)
        return 2
    workers = args.workers if args.workers else default_workers()
    specs = FIGURES[args.name]()
    os.makedirs(args.out, exist_ok=True)
    try:
        for label, spec in specs.items():
            if args.seed is not None:
                spec = ScanSpec.from_dict(
                    {**json.loads(spec.canonical_json()), "base_seed": args.seed})
            sub = os.path.join(args.out, label)
            run_scan(spec, out_dir=sub, workers=workers)
            print(f"{args.name}/{label}: wrote {sub}")
        _figure_postprocess(args.name, args.out, specs)
    except FermicircError as exc:
        print(f"figure run failed: {exc}", file=sys.stderr)
        return 1
    return 0


def _figure_postprocess(name: str, out_dir: str, specs) -> None:
    gp = [f"# gnuplot script for {name} (desk-scale reproduction)",
          'set datafile separator ","']
    if name in ("fig5", "figB"):
        gp += ["set logscale y" if name == "figB" else "set logscale x",
               'set xlabel "L"', 'set ylabel "g"',
               'plot "conductivity/summary.csv" using 3:6 skip 1 with points title "g(L)"']
    elif name == "fig4":
        gp += ['set xlabel "p"', 'set ylabel "S_half"',
               'plot "entanglement/summary.csv" using 1:(column(6)) skip 1 with points title "entropy"']
    elif name == "fig6":
        gp += ['set xlabel "phi"', 'set ylabel "S_half"',
               'plot "entanglement/summary.csv" using 1:(column(6)) skip 1 with points title "entropy"']
    elif name == "fig7":
        gp += ['set logscale x', 'set xlabel "M / m(phi)"', 'set ylabel "S_half"',
               'plot "entanglement/summary.csv" using 2:(column(6)) skip 1 with points title "entropy"']
    with open(os.path.join(out_dir, f"plot_{name}.gp"), "w") as fh:
        fh.write("\n".join(gp) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermicirc",
        description="Free-fermion circuit scans: entanglement, transport, invariants.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="ScanSpec JSON file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--workers", type=int, default=None,
                       help=f"worker processes (default ${'{'}FERMICIRC_WORKERS{'}'} or 1)")
        p.add_argument("--seed", type=int, default=None, help="override base seed")

    for task, cmd in [(TASK_ENTANGLEMENT, "scan-entanglement"),
                      (TASK_CONDUCTIVITY, "scan-conductivity"),
                      (TASK_INVARIANT, "scan-invariant")]:
        p = sub.add_parser(cmd, help=f"run a {task} scan")
        add_common(p)
        p.set_defaults(func=lambda a, t=task: _scan_command(a, t))

    p = sub.add_parser("collapse", help="single-parameter collapse of a summary table")
    p.add_argument("--input", required=True, help="summary CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--param", default="p_or_phi")
    p.add_argument("--x", default="M")
    p.add_argument("--y", default="mean_S_half")
    p.add_argument("--err", default="stderr2_S_half")
    p.set_defaults(func=_collapse_command)

    p = sub.add_parser("verify", help="run the self-verification suite")
    p.set_defaults(func=_verify_command)

    p = sub.add_parser("reproduce-figure", help="desk-scale figure recipes")
    p.add_argument("name", help=f"one of {sorted(FIGURES)}")
    add_common(p, needs_config=False)
    p.set_defaults(func=_figure_command)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

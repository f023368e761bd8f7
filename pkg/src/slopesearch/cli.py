"""Command-line front end: ``analyze``, ``sweep``, ``bench`` and ``compare``.

Exit codes: 0 success, 1 configuration or usage error, 2 no valid slip
surface in the search grid.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from slopesearch.bench import efficiency_gain, run_sweep, run_table2_benchmarks, simplex_counts_csv, summarize_sweep, sweep_csv
from slopesearch.config import AnalysisConfig, ConfigError, parse_analysis, parse_sweep
from slopesearch.search import ALGORITHMS, AllInvalidError, SearchOutcome, run_search
from slopesearch.slip_geometry import arc_depth

log = logging.getLogger("slopesearch")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ALL_INVALID = 2


def outcome_json(out: SearchOutcome, n_slices: int, timings: bool = False) -> dict:
    p, circle = out.critical_params, out.circle
    xs = np.linspace(p.x_out, p.x_in, n_slices + 1)
    ys = arc_depth(circle, xs)
    # pin the ends to the ground crossings
    ys[0], ys[-1] = circle.exit[1], circle.entry[1]
    doc = {
        "factor_of_safety": out.F,
        "algorithm": out.algorithm.lower(),
        "surface": {
            "x_in": p.x_in,
            "x_out": p.x_out,
            "delta_deg": p.delta_deg,
            "center": [circle.xc, circle.yc],
            "radius": circle.radius,
        },
        "evaluations": {
            "total": out.evaluations,
            "grid": out.grid_evaluations,
            "refine": out.refine_evaluations,
        },
        "solver": {"iterations": out.solver.iterations, "converged": out.solver.converged},
        "polyline": [[float(x), float(y)] for x, y in zip(xs, ys)],
    }
    if timings:
        doc["wall_time"] = out.wall_time
    return doc


def _search(cfg: AnalysisConfig, algorithm: str) -> SearchOutcome:
    kwargs = {}
    if cfg.grid is not None and algorithm == "hi":
        kwargs["coarse"] = cfg.grid
    elif cfg.grid is not None and algorithm == "fi":
        kwargs["fine"] = cfg.grid
    return run_search(algorithm, cfg.slope, n=cfg.n_slices, solver=cfg.solver, **kwargs)


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def cmd_analyze(args) -> int:
    cfg = parse_analysis(args.config)
    if args.algorithm:
        cfg.algorithm = args.algorithm
    if args.slices:
        cfg.n_slices = args.slices
    try:
        out = _search(cfg, cfg.algorithm)
    except AllInvalidError as exc:
        log.error("%s", exc)
        return EXIT_ALL_INVALID
    _write(args.out, _dump(outcome_json(out, cfg.n_slices, args.timings)))
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = parse_analysis(args.config)
    if args.slices:
        cfg.n_slices = args.slices
    results = {}
    try:
        for alg in ("hi", "fi", "fs"):
            # grid overrides in the config apply to the algorithm it names
            alg_cfg = cfg if alg == cfg.algorithm else AnalysisConfig(cfg.slope, alg, cfg.n_slices, None, cfg.solver)
            results[alg] = _search(alg_cfg, alg)
    except AllInvalidError as exc:
        log.error("%s", exc)
        return EXIT_ALL_INVALID
    fs = results["fs"]
    doc = {
        "algorithms": {alg: outcome_json(out, cfg.n_slices, args.timings) for alg, out in results.items()},
        "efficiency_gain_evaluations": {
            alg: efficiency_gain(fs.evaluations, results[alg].evaluations) for alg in ("hi", "fi")
        },
        "accuracy_ratio": {alg: results[alg].F / fs.F for alg in ("hi", "fi")},
    }
    if args.timings:
        doc["efficiency_gain_wall_time"] = {
            alg: efficiency_gain(fs.wall_time, results[alg].wall_time) for alg in ("hi", "fi")
        }
    _write(args.out, _dump(doc))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = parse_sweep(args.config)
    algorithms = cfg.algorithms
    if args.algorithm:
        algorithms = tuple(a.strip().upper() for a in args.algorithm.split(","))
    n = args.slices or cfg.n_slices
    records = run_sweep(cfg.table, algorithms, n=n, jobs=args.jobs, repeats=args.repeats)
    _write(args.out, sweep_csv(records, algorithms, args.timings))
    if args.summary:
        Path(args.summary).write_text(_dump(summarize_sweep(records)))
    if args.simplex_counts:
        Path(args.simplex_counts).write_text(simplex_counts_csv(records))
    return EXIT_OK


def cmd_bench(args) -> int:
    layers = {}
    if args.case3_interface is not None:
        layers[3] = args.case3_interface
    if args.case4_interface is not None:
        layers[4] = args.case4_interface
    n_values = (args.slices, 2 * args.slices) if args.slices else (25, 50)
    _write(args.out, _dump(run_table2_benchmarks(layers, n_values)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slopesearch", description=__doc__.splitlines()[0])
    parser.add_argument("--seedless", action="store_true",
                        help="no-op: every command is deterministic and uses no random numbers")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="config file")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--slices", type=int, default=None, help="number of slices (default 25)")
        p.add_argument("--timings", action="store_true",
                       help="include wall-clock times (output no longer byte-reproducible)")

    p = sub.add_parser("analyze", help="critical surface of one slope")
    common(p)
    p.add_argument("--algorithm", choices=[a.lower() for a in ALGORITHMS])
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="hi, fi and fs side by side on one slope")
    common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="parameter sweep to CSV (default: the built-in 225-case grid)")
    common(p, config_required=False)
    p.add_argument("--algorithm", help="comma-separated subset of hi,fi,fs")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--repeats", type=int, default=1, help="timing repetitions per case")
    p.add_argument("--summary", help="also write gains and accuracy statistics as JSON")
    p.add_argument("--simplex-counts", help="also write hybrid simplex counts per case as CSV")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="benchmark slopes against published results")
    p.add_argument("--out", default=None)
    p.add_argument("--slices", type=int, default=None, help="base slice count; also run with twice as many")
    p.add_argument("--case3-interface", type=float, default=None, help="layer interface elevation for case 3 (m)")
    p.add_argument("--case4-interface", type=float, default=None, help="layer interface elevation for case 4 (m)")
    p.set_defaults(func=cmd_bench, timings=False)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if getattr(args, "slices", None) is not None and args.slices < 1:
        log.error("--slices must be >= 1")
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

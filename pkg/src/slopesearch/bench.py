"""Parameter sweep, efficiency and accuracy statistics, and the layered/homogeneous benchmark cases."""

from __future__ import annotations

import csv
import io
import itertools
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

from slopesearch.bishop import SolverOptions
from slopesearch.search import ALGORITHMS, AllInvalidError, run_search
from slopesearch.slope_model import Material, SlopeCase

# Table of geometric and mechanical parameters of the sweep.
SWEEP_TABLE = {
    "height": (5.0,),
    "beta_deg": (10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0),
    "gamma": (18.0,),
    "c": (0.5, 5.0, 10.0, 15.0, 20.0),
    "phi_deg": (20.0, 25.0, 30.0, 35.0, 40.0),
}


@dataclass(frozen=True)
class SweepCase:
    beta_deg: float
    c: float
    phi_deg: float
    height: float
    gamma: float

    def slope(self) -> SlopeCase:
        return SlopeCase.from_degrees(self.height, self.beta_deg,
                                      Material.from_degrees(self.c, self.phi_deg, self.gamma))


@dataclass(frozen=True)
class AlgorithmResult:
    F: float
    evaluations: int
    grid_evaluations: int
    refine_evaluations: int
    grid_F: float
    wall_time: float
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


@dataclass(frozen=True)
class SweepRecord:
    case: SweepCase
    results: Dict[str, AlgorithmResult]


def sweep_cases(table: Mapping[str, Sequence[float]] = SWEEP_TABLE) -> List[SweepCase]:
    """Cartesian product in sweep order: beta outermost, then c, then phi."""
    missing = {"height", "beta_deg", "gamma", "c", "phi_deg"} - set(table)
    if missing:
        raise ValueError(f"parameter table lacks {sorted(missing)}")
    combos = itertools.product(table["beta_deg"], table["c"], table["phi_deg"],
                               table["height"], table["gamma"])
    cases = [SweepCase(float(b), float(c), float(p), float(h), float(g)) for b, c, p, h, g in combos]
    if not cases:
        raise ValueError("empty parameter table")
    return cases


def _run_one(case: SweepCase, algorithm: str, n: int, solver: SolverOptions, repeats: int) -> AlgorithmResult:
    try:
        slope = case.slope()
        times = []
        for _ in range(repeats):
            out = run_search(algorithm, slope, n=n, solver=solver)
            times.append(out.wall_time)
    except (AllInvalidError, ValueError) as exc:
        return AlgorithmResult(math.nan, 0, 0, 0, math.nan, 0.0, f"{type(exc).__name__}: {exc}")
    return AlgorithmResult(out.F, out.evaluations, out.grid_evaluations, out.refine_evaluations,
                           out.grid_F, statistics.mean(times))


def _run_case(args) -> SweepRecord:
    case, algorithms, n, solver, repeats = args
    return SweepRecord(case, {alg: _run_one(case, alg, n, solver, repeats) for alg in algorithms})


def run_sweep(
    table: Mapping[str, Sequence[float]] | Sequence[SweepCase] = SWEEP_TABLE,
    algorithms: Sequence[str] = ALGORITHMS,
    n: int = 25,
    solver: SolverOptions = SolverOptions(),
    jobs: int = 1,
    repeats: int = 1,
) -> List[SweepRecord]:
    """Run every algorithm on every case; failures are recorded, never raised.

    ``repeats`` averages wall times over repeated runs; evaluation counts and
    factors of safety are deterministic. Results come back in case order
    regardless of ``jobs``.
    """
    cases = sweep_cases(table) if isinstance(table, Mapping) else list(table)
    if not cases:
        raise ValueError("empty parameter table")
    algorithms = [a.upper() for a in algorithms]
    for alg in algorithms:
        if alg not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {alg!r}")
    work = [(case, algorithms, n, solver, max(1, repeats)) for case in cases]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_case, work, chunksize=4))
    return [_run_case(w) for w in work]


CASE_COLUMNS = ("beta_deg", "c", "phi_deg", "H", "gamma")
RESULT_COLUMNS = ("F", "evaluations", "grid_evaluations", "refine_evaluations", "grid_F", "error")


def sweep_header(algorithms: Sequence[str], timings: bool = False) -> List[str]:
    cols = list(CASE_COLUMNS)
    for alg in algorithms:
        cols += [f"{alg.lower()}_{c}" for c in RESULT_COLUMNS]
        if timings:
            cols.append(f"{alg.lower()}_wall_time")
    return cols


def _fmt(x) -> str:
    if isinstance(x, float):
        return "nan" if math.isnan(x) else repr(x)
    return str(x)


def sweep_csv(records: Sequence[SweepRecord], algorithms: Sequence[str], timings: bool = False) -> str:
    """One row per record. Without ``timings`` the output is byte-reproducible."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(sweep_header(algorithms, timings))
    for rec in records:
        c = rec.case
        row = [_fmt(v) for v in (c.beta_deg, c.c, c.phi_deg, c.height, c.gamma)]
        for alg in algorithms:
            r = rec.results[alg.upper()]
            row += [_fmt(r.F), r.evaluations, r.grid_evaluations, r.refine_evaluations, _fmt(r.grid_F), r.error]
            if timings:
                row.append(_fmt(r.wall_time))
        writer.writerow(row)
    return buf.getvalue()


def simplex_counts_csv(records: Sequence[SweepRecord]) -> str:
    """Simplex evaluation counts of the hybrid search per ``(beta, c, phi)`` for surface plots."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["beta_deg", "c", "phi_deg", "refine_evaluations"])
    for rec in records:
        r = rec.results.get("HI")
        if r is not None:
            writer.writerow([_fmt(rec.case.beta_deg), _fmt(rec.case.c), _fmt(rec.case.phi_deg),
                             r.refine_evaluations])
    return buf.getvalue()


def efficiency_gain(t_ref: float, t: float) -> float:
    """Percentage reduction of ``t`` relative to ``t_ref``; negative when slower."""
    if not t_ref > 0:
        raise ValueError(f"reference cost must be > 0, got {t_ref}")
    return (t_ref - t) / t_ref * 100.0


def gains_by_beta(records: Sequence[SweepRecord], metric: str = "evaluations",
                  reference: str = "FS") -> Dict[float, Dict[str, float]]:
    """Gains of each algorithm over ``reference`` using per-inclination totals of ``metric``."""
    if metric not in ("evaluations", "wall_time"):
        raise ValueError("metric must be 'evaluations' or 'wall_time'")
    totals: Dict[float, Dict[str, float]] = {}
    for rec in records:
        row = totals.setdefault(rec.case.beta_deg, {})
        for alg, res in rec.results.items():
            row[alg] = row.get(alg, 0.0) + float(getattr(res, metric))
    return {
        beta: {alg: efficiency_gain(row[reference], v) for alg, v in row.items() if alg != reference}
        for beta, row in totals.items()
    }


def mean_evaluations_by_beta(records: Sequence[SweepRecord], algorithm: str = "HI") -> Dict[float, float]:
    groups: Dict[float, List[int]] = {}
    for rec in records:
        groups.setdefault(rec.case.beta_deg, []).append(rec.results[algorithm].evaluations)
    return {beta: statistics.mean(v) for beta, v in groups.items()}


@dataclass(frozen=True)
class RatioStats:
    ratios: List[float]
    mean: float
    median: float
    mode: float
    histogram: Dict[int, int] = field(repr=False)

    @classmethod
    def of(cls, ratios: Sequence[float]) -> "RatioStats":
        ratios = list(ratios)
        if not ratios:
            raise ValueError("no ratios")
        # 1 percentage-point bins keyed by their lower edge
        bins = [math.floor(round(r * 100.0, 9)) for r in ratios]
        hist: Dict[int, int] = {}
        for b in sorted(bins):
            hist[b] = hist.get(b, 0) + 1
        modal = max(hist, key=lambda b: (hist[b], -b))
        return cls(ratios, statistics.fmean(ratios), statistics.median(ratios), (modal + 0.5) / 100.0, hist)


@dataclass(frozen=True)
class AccuracyStats:
    fi_over_fs: RatioStats
    hi_over_fs: RatioStats


def accuracy_stats(records: Sequence[SweepRecord]) -> AccuracyStats:
    """Ratios ``F_FI / F_FS`` and ``F_HI / F_FS`` over all records."""
    fi, hi = [], []
    for rec in records:
        for alg in ALGORITHMS:
            if alg not in rec.results:
                raise ValueError(f"record {rec.case} lacks algorithm {alg}")
        fs = rec.results["FS"].F
        fi.append(rec.results["FI"].F / fs)
        hi.append(rec.results["HI"].F / fs)
    return AccuracyStats(RatioStats.of(fi), RatioStats.of(hi))


# Published results for the four benchmark slopes (beta = 26.56 deg). Cases 3
# and 4 share materials but differ in layer geometry, which must be supplied.
_SOIL_A = {"c": 9.8, "phi_deg": 10.0, "gamma": 17.64}
_SOIL_B = {"c": 14.71, "phi_deg": 20.0, "gamma": 18.63}

BENCHMARK_CASES = {
    1: {"height": 5.0, "beta_deg": 26.56, "layers": [_SOIL_A],
        "reference": [
            {"algorithm": "PSO", "n_slices": 24, "evaluations": 3500, "factor_of_safety": 1.3128},
            {"algorithm": "PSO", "n_slices": 27, "evaluations": 10000, "factor_of_safety": 1.3136},
            {"algorithm": "HI (published)", "n_slices": 25, "evaluations": 294, "factor_of_safety": 1.3429},
            {"algorithm": "HI (published)", "n_slices": 50, "evaluations": 255, "factor_of_safety": 1.3426},
        ]},
    2: {"height": 8.5, "beta_deg": 26.56, "layers": [_SOIL_B],
        "reference": [
            {"algorithm": "GA", "n_slices": 150, "evaluations": 3000, "factor_of_safety": 1.74},
            {"algorithm": "PSO", "n_slices": 40, "evaluations": 3500, "factor_of_safety": 1.7197},
            {"algorithm": "PSO", "n_slices": 42, "evaluations": 10000, "factor_of_safety": 1.7195},
            {"algorithm": "HI (published)", "n_slices": 25, "evaluations": 286, "factor_of_safety": 1.7336},
            {"algorithm": "HI (published)", "n_slices": 50, "evaluations": 258, "factor_of_safety": 1.7363},
        ]},
    3: {"height": 5.0, "beta_deg": 26.56, "layers": [_SOIL_B, _SOIL_A],
        "reference": [
            {"algorithm": "PSO", "n_slices": 42, "evaluations": 10000, "factor_of_safety": 1.3395},
            {"algorithm": "HI (published)", "n_slices": 25, "evaluations": 322, "factor_of_safety": 1.3645},
        ]},
    4: {"height": 5.0, "beta_deg": 26.56, "layers": [_SOIL_B, _SOIL_A],
        "reference": [
            {"algorithm": "PSO", "n_slices": 42, "evaluations": 10000, "factor_of_safety": 1.3183},
            {"algorithm": "HI (published)", "n_slices": 25, "evaluations": 272, "factor_of_safety": 1.3438},
        ]},
}


def benchmark_slope(case_id: int, interface: Optional[float] = None) -> SlopeCase:
    """Slope of a benchmark case; layered cases need the interface elevation."""
    spec = BENCHMARK_CASES[case_id]
    mats = [Material.from_degrees(m["c"], m["phi_deg"], m["gamma"]) for m in spec["layers"]]
    if len(mats) == 1:
        return SlopeCase.from_degrees(spec["height"], spec["beta_deg"], mats[0])
    if interface is None:
        raise ValueError(f"benchmark case {case_id} needs a layer interface elevation")
    if not interface < spec["height"]:
        raise ValueError("layer interface must lie below the crest")
    layers = [(spec["height"], mats[0]), (interface, mats[1])]
    return SlopeCase.from_degrees(spec["height"], spec["beta_deg"], layers)


def run_table2_benchmarks(
    layer_config: Optional[Mapping[int, float]] = None,
    n_values: Iterable[int] = (25, 50),
    solver: SolverOptions = SolverOptions(),
) -> dict:
    """Hybrid search on the benchmark slopes next to the published values.

    ``layer_config`` maps case 3 and/or 4 to an interface elevation; layered
    cases without one are skipped.
    """
    layer_config = dict(layer_config or {})
    n_values = list(n_values)
    report = {"cases": []}
    for case_id, spec in BENCHMARK_CASES.items():
        interface = layer_config.get(case_id)
        if len(spec["layers"]) > 1 and interface is None:
            continue
        slope = benchmark_slope(case_id, interface)
        runs = []
        for n in n_values:
            out = run_search("HI", slope, n=n, solver=solver)
            runs.append({
                "n_slices": n,
                "factor_of_safety": out.F,
                "evaluations": out.evaluations,
                "grid_evaluations": out.grid_evaluations,
                "refine_evaluations": out.refine_evaluations,
                "surface": {
                    "x_in": out.critical_params.x_in,
                    "x_out": out.critical_params.x_out,
                    "delta_deg": out.critical_params.delta_deg,
                },
            })
        entry = {
            "case": case_id,
            "geometry": {"H": slope.height, "beta_deg": spec["beta_deg"], "B": slope.width},
            "layers": [dict(m) for m in spec["layers"]],
            "layer_interface": interface,
            "runs": runs,
            "reference": [dict(r) for r in spec["reference"]],
        }
        if len(runs) >= 2:
            base = runs[0]["factor_of_safety"]
            entry["slice_refinement_change"] = abs(runs[1]["factor_of_safety"] - base) / base
        report["cases"].append(entry)
    return report


def summarize_sweep(records: Sequence[SweepRecord]) -> dict:
    """Evaluation-count gains, mean hybrid counts per inclination and accuracy ratios."""
    algs = set(records[0].results) if records else set()
    summary = {
        "cases": len(records),
        "failures": sum(1 for r in records for res in r.results.values() if not res.ok),
    }
    if "FS" in algs:
        summary["evaluation_gain_by_beta"] = {
            _fmt(b): g for b, g in sorted(gains_by_beta(records, "evaluations").items())
        }
    if "HI" in algs:
        summary["mean_hi_evaluations_by_beta"] = {
            _fmt(b): v for b, v in sorted(mean_evaluations_by_beta(records).items())
        }
    if algs >= set(ALGORITHMS):
        stats = accuracy_stats(records)
        summary["accuracy"] = {
            name: {"mean": s.mean, "median": s.median, "mode": s.mode,
                   "histogram_percent": {str(k): v for k, v in s.histogram.items()}}
            for name, s in (("fi_over_fs", stats.fi_over_fs), ("hi_over_fs", stats.hi_over_fs))
        }
    return summary


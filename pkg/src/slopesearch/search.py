"""Critical slip-surface searches.

``search_hi``
    coarse grid on ``(x_in, x_out, delta)`` followed by a Nelder-Mead
    refinement from the best grid point.
``search_fi``
    fine grid on ``(x_in, x_out, delta)``.
``search_fs``
    fine grid on conventional centres and radii.

All three evaluate surfaces through the same counted objective, so their
evaluation counts are directly comparable.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from slopesearch.bishop import EvalCounter, SafetyEvaluation, SolverOptions, Status, evaluate_params
from slopesearch.slip_geometry import (
    HALF_PI,
    DegenerateChordError,
    SlipCircle,
    SlipParams,
    check_viability,
    circle_from_params,
    delta_min,
    params_from_circle,
)
from slopesearch.slope_model import SlopeCase

T = TypeVar("T")

ALGORITHMS = ("HI", "FI", "FS")


class AllInvalidError(RuntimeError):
    """No candidate of a grid produced a valid factor of safety."""


@dataclass(frozen=True)
class GridSpec:
    n_xin: int
    n_xout: int
    delta_spacing: float = 5.0  # degrees

    def __post_init__(self):
        if self.n_xin < 2 or self.n_xout < 2:
            raise ValueError("grids need at least 2 values of x_in and x_out")
        if not self.delta_spacing > 0:
            raise ValueError("delta spacing must be > 0")


COARSE_GRID = GridSpec(3, 4, 5.0)
FINE_GRID = GridSpec(8, 12, 5.0)


@dataclass(frozen=True)
class SimplexOptions:
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    initial_step: float = 0.5
    f_tol: float = 1e-5
    x_tol: float = 1e-3
    max_evals: int = 500
    restarts: int = 0

    def __post_init__(self):
        if not (self.reflection > 0 and self.expansion > max(1.0, self.reflection)
                and 0 < self.contraction < 1 and 0 < self.shrink < 1):
            raise ValueError("Nelder-Mead coefficients outside their classical ranges")
        if self.max_evals < 10:
            raise ValueError("max_evals must be >= 10")


@dataclass(frozen=True)
class SearchOutcome:
    algorithm: str
    critical_params: SlipParams
    circle: SlipCircle
    F: float
    evaluations: int
    grid_evaluations: int
    refine_evaluations: int
    wall_time: float
    grid_F: float
    solver: SafetyEvaluation = field(repr=False)


def search_box(slope: SlopeCase) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """Ranges of entry and exit abscissae."""
    B, reach = slope.width, slope.reach
    return (B, B + reach), (-reach, B / 4.0)


def _safe_delta_min(slope: SlopeCase, x_in: float, x_out: float) -> float:
    try:
        return delta_min(slope, x_in, x_out)
    except DegenerateChordError:
        return HALF_PI


def delta_ladder(d_min: float, spacing: float) -> List[float]:
    """``d_min, d_min + spacing, ...`` capped by a final 90 deg rung."""
    if d_min >= HALF_PI:
        return [HALF_PI]
    rungs = []
    k = 0
    while True:
        d = d_min + k * spacing
        if d >= HALF_PI - 1e-9:
            break
        rungs.append(d)
        k += 1
    rungs.append(HALF_PI)
    return rungs


def grid_candidates_new_param(slope: SlopeCase, spec: GridSpec) -> List[SlipParams]:
    (in_lo, in_hi), (out_lo, out_hi) = search_box(slope)
    spacing = math.radians(spec.delta_spacing)
    candidates = []
    for x_in in np.linspace(in_lo, in_hi, spec.n_xin):
        for x_out in np.linspace(out_lo, out_hi, spec.n_xout):
            d_min = _safe_delta_min(slope, float(x_in), float(x_out))
            candidates.extend(SlipParams(float(x_in), float(x_out), d)
                              for d in delta_ladder(d_min, spacing))
    return candidates


def _distance_to_ground(slope: SlopeCase, x: float, y: float) -> float:
    H, B = slope.height, slope.width
    d_low = math.hypot(max(x, 0.0), y)           # ray y = 0, x <= 0
    d_high = math.hypot(min(x - B, 0.0), y - H)  # ray y = H, x >= B
    seg2 = B * B + H * H
    s = min(max((x * B + y * H) / seg2, 0.0), 1.0)
    d_face = math.hypot(x - s * B, y - s * H)
    return min(d_low, d_high, d_face)


def grid_candidates_fs(slope: SlopeCase, n_centres: int = 10, n_radii: int = 10) -> List[Tuple[float, float, float]]:
    """Centre/radius grid ``(xc, yc, R)``; always ``n_centres**2 * n_radii`` entries.

    Centres cover ``[-B/2, 5B/4] x [H, H + 2 max(H, B)]`` (``H`` stands in for
    ``B`` on a vertical face). Radii run from ground tangency to the reach of
    the far exit point ``(-max(H, B), 0)``.
    """
    H = slope.height
    span = slope.width if slope.width > 0 else H
    reach = slope.reach
    candidates = []
    for xc in np.linspace(-span / 2.0, 1.25 * span, n_centres):
        for yc in np.linspace(H, H + 2.0 * reach, n_centres):
            r_lo = _distance_to_ground(slope, float(xc), float(yc))
            r_hi = max(math.hypot(xc + reach, yc), r_lo)
            for r in np.linspace(r_lo, r_hi, n_radii):
                candidates.append((float(xc), float(yc), float(r)))
    return candidates


def _first_minimum(candidates, evaluations, raise_invalid=True):
    best = best_eval = None
    for cand, ev in zip(candidates, evaluations):
        if ev.ok and (best_eval is None or ev.F < best_eval.F):
            best, best_eval = cand, ev
    if best_eval is None and raise_invalid:
        raise AllInvalidError("every grid candidate is invalid")
    return best, best_eval


def grid_minimize(
    candidates: Sequence[T], objective: Callable[[T], SafetyEvaluation]
) -> Tuple[T, SafetyEvaluation]:
    """Evaluate every candidate; first-seen minimum wins."""
    if not candidates:
        raise ValueError("empty candidate list")
    return _first_minimum(candidates, [objective(c) for c in candidates])


def simplex_minimize(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    steps: Sequence[float],
    opts: SimplexOptions = SimplexOptions(),
    f0: Optional[float] = None,
    lower: float = 0.0,
    upper: float = 1.0,
    reject_at: float = math.inf,
) -> Tuple[np.ndarray, float, int]:
    """Nelder-Mead on a box; trial points are clamped into ``[lower, upper]``.

    ``f0`` is the known value at ``x0`` and is not re-evaluated. An initial
    vertex scoring ``>= reject_at`` is retried on the other side of ``x0`` and
    then with halved steps, so the starting simplex avoids infeasible
    neighbours when it can. Returns the best vertex, its value and the number
    of calls made to ``f``.
    """
    calls = 0

    def feval(x):
        nonlocal calls
        calls += 1
        return f(x)

    def clamp(x):
        return np.clip(x, lower, upper)

    x0 = clamp(np.asarray(x0, dtype=float))
    dim = len(x0)
    verts = [x0]
    fvals = [feval(x0) if f0 is None else f0]
    for i, step in enumerate(steps):
        first = 1.0 if x0[i] + step <= upper else -1.0
        for attempt in range(6):
            sign = first if attempt % 2 == 0 else -first
            v = x0.copy()
            v[i] = v[i] + sign * step / 2 ** (attempt // 2)
            v = clamp(v)
            if v[i] == x0[i]:
                continue
            fv = feval(v)
            if fv < reject_at:
                break
        verts.append(v)
        fvals.append(fv)
    verts = np.array(verts)
    fvals = np.array(fvals)

    while calls < opts.max_evals:
        order = np.argsort(fvals, kind="stable")
        verts, fvals = verts[order], fvals[order]
        if (np.max(np.abs(fvals[1:] - fvals[0])) < opts.f_tol
                and np.max(np.abs(verts[1:] - verts[0])) < opts.x_tol):
            break
        centroid = verts[:-1].mean(axis=0)
        worst = verts[-1]
        xr = clamp(centroid + opts.reflection * (centroid - worst))
        fr = feval(xr)
        if fr < fvals[0]:
            xe = clamp(centroid + opts.expansion * (xr - centroid))
            fe = feval(xe)
            verts[-1], fvals[-1] = (xe, fe) if fe < fr else (xr, fr)
            continue
        if fr < fvals[-2]:
            verts[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-1]:
            xc = clamp(centroid + opts.contraction * (xr - centroid))
            fc = feval(xc)
            if fc <= fr:
                verts[-1], fvals[-1] = xc, fc
                continue
        else:
            xc = clamp(centroid + opts.contraction * (worst - centroid))
            fc = feval(xc)
            if fc < fvals[-1]:
                verts[-1], fvals[-1] = xc, fc
                continue
        for i in range(1, dim + 1):
            verts[i] = verts[0] + opts.shrink * (verts[i] - verts[0])
            fvals[i] = feval(verts[i])
            if calls >= opts.max_evals:
                break

    best = int(np.argmin(fvals))
    return verts[best].copy(), float(fvals[best]), calls


class ParamTransform:
    """Maps the unit cube onto ``(x_in, x_out, t)`` with ``t`` spanning ``[delta_min, 90 deg]``."""

    def __init__(self, slope: SlopeCase):
        self.slope = slope
        (self.in_lo, self.in_hi), (self.out_lo, self.out_hi) = search_box(slope)

    def to_params(self, u: np.ndarray) -> SlipParams:
        x_in = self.in_lo + u[0] * (self.in_hi - self.in_lo)
        x_out = self.out_lo + u[1] * (self.out_hi - self.out_lo)
        d_min = _safe_delta_min(self.slope, x_in, x_out)
        delta = HALF_PI if d_min >= HALF_PI else d_min + u[2] * (HALF_PI - d_min)
        return SlipParams(float(x_in), float(x_out), float(delta))

    def to_unit(self, p: SlipParams) -> np.ndarray:
        d_min = _safe_delta_min(self.slope, p.x_in, p.x_out)
        t = 1.0 if d_min >= HALF_PI else (p.delta - d_min) / (HALF_PI - d_min)
        return np.array([
            (p.x_in - self.in_lo) / (self.in_hi - self.in_lo),
            (p.x_out - self.out_lo) / (self.out_hi - self.out_lo),
            t,
        ])


def nelder_mead(
    objective: Callable[[SlipParams], float],
    start: SlipParams,
    slope: SlopeCase,
    opts: SimplexOptions = SimplexOptions(),
    grid: GridSpec = COARSE_GRID,
    f_start: Optional[float] = None,
    reject_at: float = math.inf,
) -> Tuple[SlipParams, float, int]:
    """Refine ``start`` by a simplex search in the transformed ``(x_in, x_out, t)`` space.

    The initial simplex steps ``opts.initial_step`` grid spacings along each
    axis. Returns the best triplet, its objective value and the number of
    objective calls.
    """
    if not check_viability(slope, start).viable:
        raise ValueError("simplex start point is not a viable slip surface")
    tr = ParamTransform(slope)
    d_min = _safe_delta_min(slope, start.x_in, start.x_out)
    t_step = math.radians(grid.delta_spacing) / max(HALF_PI - d_min, math.radians(grid.delta_spacing))
    steps = opts.initial_step * np.array([1.0 / (grid.n_xin - 1), 1.0 / (grid.n_xout - 1), t_step])
    f = lambda u: objective(tr.to_params(u))
    u_best, f_best, calls = simplex_minimize(f, tr.to_unit(start), steps, opts, f0=f_start,
                                             reject_at=reject_at)
    # A fresh simplex around the incumbent escapes collapsed or boundary-stuck simplices.
    for _ in range(opts.restarts):
        budget = opts.max_evals - calls
        if budget < 10:
            break
        u_new, f_new, used = simplex_minimize(
            f, u_best, steps, replace(opts, max_evals=budget), f0=f_best, reject_at=reject_at)
        calls += used
        improved = f_best - f_new > opts.f_tol
        if f_new < f_best:
            u_best, f_best = u_new, f_new
        if not improved:
            break
    if f_start is not None and f_start <= f_best:
        return start, f_start, calls
    return tr.to_params(u_best), f_best, calls


def _outcome(algorithm, slope, params, F, counter, grid_evals, grid_F, started, n, solver):
    evaluation = evaluate_params(slope, params, n, solver)
    return SearchOutcome(
        algorithm=algorithm,
        critical_params=params,
        circle=circle_from_params(slope, params),
        F=F,
        evaluations=counter.count,
        grid_evaluations=grid_evals,
        refine_evaluations=counter.count - grid_evals,
        wall_time=time.perf_counter() - started,
        grid_F=grid_F,
        solver=evaluation,
    )


def search_hi(
    slope: SlopeCase,
    coarse: GridSpec = COARSE_GRID,
    n: int = 25,
    solver: SolverOptions = SolverOptions(),
    simplex: SimplexOptions = SimplexOptions(),
    split_toe: bool = True,
) -> SearchOutcome:
    """Coarse grid, then Nelder-Mead from the best grid point.

    With ``split_toe`` a second simplex also starts from the best grid point
    on the other side of the toe: ``delta_min`` jumps where the exit crosses
    the toe, and a single simplex rarely crosses that seam.
    """
    started = time.perf_counter()
    counter = EvalCounter()

    def objective(p: SlipParams) -> SafetyEvaluation:
        return evaluate_params(slope, p, n, solver, counter)

    candidates = grid_candidates_new_param(slope, coarse)
    evaluations = [objective(p) for p in candidates]
    best, best_eval = _first_minimum(candidates, evaluations)
    grid_evals = counter.count
    starts = [(best, best_eval.F)]
    if split_toe:
        face = best.x_out > 0.0
        other = [(p, ev) for p, ev in zip(candidates, evaluations) if (p.x_out > 0.0) != face]
        if other:
            p2, ev2 = _first_minimum(*zip(*other), raise_invalid=False)
            if p2 is not None:
                starts.append((p2, ev2.F))
    params, F = best, best_eval.F
    for start, f_start in starts:
        p_new, f_new, _ = nelder_mead(lambda p: objective(p).F, start, slope, simplex, coarse, f_start,
                                      reject_at=solver.sentinel_F)
        if f_new < F:
            params, F = p_new, f_new
    return _outcome("HI", slope, params, F, counter, grid_evals, best_eval.F, started, n, solver)


def search_fi(
    slope: SlopeCase,
    fine: GridSpec = FINE_GRID,
    n: int = 25,
    solver: SolverOptions = SolverOptions(),
) -> SearchOutcome:
    """Fine grid on the entry/exit/tangent-angle parametrisation."""
    started = time.perf_counter()
    counter = EvalCounter()
    best, best_eval = grid_minimize(
        grid_candidates_new_param(slope, fine),
        lambda p: evaluate_params(slope, p, n, solver, counter),
    )
    return _outcome("FI", slope, best, best_eval.F, counter, counter.count, best_eval.F, started, n, solver)


def search_fs(
    slope: SlopeCase,
    n: int = 25,
    solver: SolverOptions = SolverOptions(),
) -> SearchOutcome:
    """Fine grid of 10 x 10 centres with 10 radii each."""
    started = time.perf_counter()
    counter = EvalCounter()
    sentinel = SafetyEvaluation(solver.sentinel_F, 0, False, 0.0, Status.NOT_VIABLE)

    def objective(cand):
        p = params_from_circle(slope, *cand)
        if p is None:
            counter.increment()
            return sentinel
        return evaluate_params(slope, p, n, solver, counter)

    best, best_eval = grid_minimize(grid_candidates_fs(slope), objective)
    params = params_from_circle(slope, *best)
    return _outcome("FS", slope, params, best_eval.F, counter, counter.count, best_eval.F, started, n, solver)


def run_search(algorithm: str, slope: SlopeCase, n: int = 25,
               solver: SolverOptions = SolverOptions(), **kwargs) -> SearchOutcome:
    algorithm = algorithm.upper()
    if algorithm == "HI":
        return search_hi(slope, n=n, solver=solver, **kwargs)
    if algorithm == "FI":
        return search_fi(slope, n=n, solver=solver, **kwargs)
    if algorithm == "FS":
        return search_fs(slope, n=n, solver=solver)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")

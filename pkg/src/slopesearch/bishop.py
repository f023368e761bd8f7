"""Bishop's simplified factor of safety and the counted slip-surface objective."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from slopesearch.slicing import SliceSet, build_slices
from slopesearch.slip_geometry import SlipParams, check_viability, circle_from_params
from slopesearch.slope_model import SlopeCase


class Status(enum.Enum):
    OK = "OK"
    NON_DRIVING = "NonDriving"
    M_ALPHA_DEGENERATE = "MAlphaDegenerate"
    NO_CONVERGENCE = "NoConvergence"
    NOT_VIABLE = "NotViable"


class NonDrivingError(ValueError):
    """Sum of ``W sin(alpha)`` is not positive."""


class MAlphaDegenerateError(ValueError):
    """A slice denominator ``m_alpha`` fell to or below the floor."""


@dataclass(frozen=True)
class SolverOptions:
    tol_F: float = 1e-8
    max_iter: int = 100
    F0: float = 1.0
    m_alpha_floor: float = 0.05
    sentinel_F: float = 1e6

    def __post_init__(self):
        if not self.tol_F > 0:
            raise ValueError("tol_F must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0.0 < self.m_alpha_floor < 1.0:
            raise ValueError("m_alpha_floor must lie in (0, 1)")


@dataclass(frozen=True)
class SafetyEvaluation:
    F: float
    iterations: int
    converged: bool
    driving_sum: float
    status: Status

    @property
    def ok(self) -> bool:
        return self.status is Status.OK


class EvalCounter:
    """Counts objective evaluations for one search session."""

    def __init__(self) -> None:
        self.count = 0

    def increment(self) -> None:
        self.count += 1

    def __repr__(self) -> str:
        return f"EvalCounter(count={self.count})"


class _Terms:
    """Per-slice quantities of ``F = sum(A / (cos a + sin a tan phi / F)) / D``."""

    __slots__ = ("resist", "cos_a", "sin_tan", "driving", "frictional")

    def __init__(self, slices: SliceSet):
        sin_a = np.sin(slices.alpha)
        self.cos_a = np.cos(slices.alpha)
        self.resist = slices.c * slices.width + slices.weight * slices.tan_phi
        self.sin_tan = sin_a * slices.tan_phi
        self.driving = float(np.sum(slices.weight * sin_a))
        self.frictional = bool(np.any(slices.tan_phi != 0.0))

    def m_alpha(self, F: float) -> np.ndarray:
        return self.cos_a + self.sin_tan / F

    def rhs(self, F: float) -> float:
        return float(np.sum(self.resist / self.m_alpha(F))) / self.driving


def bishop_rhs(slices: SliceSet, F: float, m_alpha_floor: float = 0.05) -> float:
    """Right-hand side of Bishop's equation evaluated at trial factor ``F``."""
    if not F > 0:
        raise ValueError(f"trial factor of safety must be > 0, got {F}")
    terms = _Terms(slices)
    if not terms.driving > 0.0:
        raise NonDrivingError(f"driving sum {terms.driving} is not positive")
    if np.any(terms.m_alpha(F) <= m_alpha_floor):
        raise MAlphaDegenerateError(f"m_alpha below {m_alpha_floor} at F = {F}")
    return terms.rhs(F)


def solve_F(slices: SliceSet, opts: SolverOptions = SolverOptions()) -> SafetyEvaluation:
    """Fixed-point iteration ``F <- rhs(F)`` starting from ``opts.F0``."""
    if len(slices) == 0:
        raise ValueError("no slices")
    terms = _Terms(slices)
    driving = terms.driving
    if not driving > 0.0:
        return SafetyEvaluation(opts.sentinel_F, 0, False, driving, Status.NON_DRIVING)

    if not terms.frictional:
        # rhs does not depend on F
        F = float(np.sum(terms.resist / terms.cos_a)) / driving
        status = Status.OK if np.all(terms.cos_a > opts.m_alpha_floor) else Status.M_ALPHA_DEGENERATE
        return SafetyEvaluation(F, 1, True, driving, status)

    F = opts.F0
    for k in range(1, opts.max_iter + 1):
        F_next = terms.rhs(F)
        if not (math.isfinite(F_next) and F_next > 0.0):
            return SafetyEvaluation(opts.sentinel_F, k, False, driving, Status.M_ALPHA_DEGENERATE)
        if abs(F_next - F) < opts.tol_F * F:
            if np.any(terms.m_alpha(F_next) <= opts.m_alpha_floor):
                return SafetyEvaluation(F_next, k, True, driving, Status.M_ALPHA_DEGENERATE)
            return SafetyEvaluation(F_next, k, True, driving, Status.OK)
        F = F_next
    return SafetyEvaluation(F, opts.max_iter, False, driving, Status.NO_CONVERGENCE)


def evaluate_params(
    slope: SlopeCase,
    p: SlipParams,
    n: int = 25,
    opts: SolverOptions = SolverOptions(),
    counter: EvalCounter | None = None,
) -> SafetyEvaluation:
    """Objective minimised by the searches: counted, never raises.

    Failed surfaces keep their status but report ``opts.sentinel_F``.
    """
    if counter is not None:
        counter.increment()
    if not check_viability(slope, p, n).viable:
        return SafetyEvaluation(opts.sentinel_F, 0, False, 0.0, Status.NOT_VIABLE)
    slices = build_slices(slope, circle_from_params(slope, p), n)
    result = solve_F(slices, opts)
    if result.status is not Status.OK:
        return SafetyEvaluation(opts.sentinel_F, result.iterations, result.converged,
                                result.driving_sum, result.status)
    return result

"""Slip circles parametrised by entry abscissa, exit abscissa and entry tangent angle.

The entry point lies on the upper ground (right), the exit point on the lower
ground or the face (left). ``delta`` is the angle below horizontal of the
arc's tangent at the entry point, so ``delta = 90 deg`` is a vertical scarp.

Other third parameters are possible (radius, sagitta of the arc from the chord,
distance of the centre from the chord) but are not bounded by the geometry as
naturally as the tangent angle, and equally spaced radii or centre offsets
crowd samples near the chord; they are not implemented.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from slopesearch.slope_model import GROUND_EPS, SlopeCase, ground_elevation

Point = Tuple[float, float]

HALF_PI = math.pi / 2
# Slack on the 90 degree upper bound so grid points computed as 90 deg survive rounding.
ANGLE_EPS = 1e-12


class DegenerateChordError(ValueError):
    pass


class DegenerateCircleError(ValueError):
    pass


@dataclass(frozen=True)
class SlipParams:
    """Candidate slip surface ``(x_in, x_out, delta)``; ``delta`` in radians.

    Out-of-bounds triplets are representable on purpose; ``check_viability``
    classifies them.
    """

    x_in: float
    x_out: float
    delta: float

    @classmethod
    def from_degrees(cls, x_in: float, x_out: float, delta_deg: float) -> "SlipParams":
        return cls(float(x_in), float(x_out), math.radians(delta_deg))

    @property
    def delta_deg(self) -> float:
        return math.degrees(self.delta)


@dataclass(frozen=True)
class SlipCircle:
    xc: float
    yc: float
    radius: float
    entry: Point
    exit: Point

    @property
    def centre(self) -> Point:
        return (self.xc, self.yc)

    def entry_tangent_angle(self) -> float:
        """Angle below horizontal of the tangent at the entry point."""
        x_in, y_in = self.entry
        return math.atan2(x_in - self.xc, self.yc - y_in)


class ViabilityReason(enum.Enum):
    OK = "OK"
    DELTA_BELOW_MIN = "DeltaBelowMin"
    DELTA_ABOVE_MAX = "DeltaAboveMax"
    ARC_ABOVE_GROUND = "ArcAboveGround"
    DEGENERATE_CHORD = "DegenerateChord"


@dataclass(frozen=True)
class Viability:
    viable: bool
    reason: ViabilityReason


def endpoints(slope: SlopeCase, x_in: float, x_out: float) -> Tuple[Point, Point]:
    return (x_in, ground_elevation(slope, x_in)), (x_out, ground_elevation(slope, x_out))


def chord_angle(entry: Point, exit: Point) -> float:
    """Inclination of the chord from exit up to entry, in ``[0, 90 deg)``."""
    dx = entry[0] - exit[0]
    if dx == 0.0:
        raise DegenerateChordError("entry and exit share the same abscissa")
    return math.atan((entry[1] - exit[1]) / dx)


def _toe_circle_tangent(entry: Point, exit: Point) -> float:
    """Entry tangent angle of the circle through entry, exit and the toe.

    The toe lies on the arc between the endpoints, so the tangent-chord angle
    at the entry is the supplement of the inscribed angle at the toe. Collinear
    points give the straight chord.
    """
    ax, ay = entry
    bx, by = exit
    if bx == 0.0 and by == 0.0:
        return chord_angle(entry, exit)
    inscribed = math.atan2(abs(ax * by - ay * bx), ax * bx + ay * by)
    return chord_angle(entry, exit) + (math.pi - inscribed)


def delta_min(slope: SlopeCase, x_in: float, x_out: float) -> float:
    """Smallest entry tangent angle keeping the arc inside the ground.

    Face exits: the chord inclination (straight-line limit). Exits on the
    lower ground (toe included): tangent at the entry of the circle through
    entry, exit and toe.
    """
    entry, exit = endpoints(slope, x_in, x_out)
    if x_out > 0.0:
        return chord_angle(entry, exit)
    return _toe_circle_tangent(entry, exit)


def circle_through(entry: Point, exit: Point, delta: float) -> SlipCircle:
    """Circle through ``entry`` and ``exit`` whose entry tangent dips at ``delta``."""
    if delta > HALF_PI + ANGLE_EPS:
        raise ValueError(f"entry tangent angle {math.degrees(delta)} deg exceeds 90 deg")
    chord = chord_angle(entry, exit)
    omega = delta - chord
    if omega <= 0.0:
        raise DegenerateCircleError("entry tangent not steeper than the chord: infinite radius")
    length = math.hypot(entry[0] - exit[0], entry[1] - exit[1])
    radius = length / (2.0 * math.sin(omega))
    xc = entry[0] - radius * math.sin(delta)
    yc = entry[1] + radius * math.cos(delta)
    return SlipCircle(xc, yc, radius, entry, exit)


def circle_from_params(slope: SlopeCase, p: SlipParams) -> SlipCircle:
    entry, exit = endpoints(slope, p.x_in, p.x_out)
    if p.x_in <= p.x_out:
        raise DegenerateChordError("entry must lie to the right of the exit")
    return circle_through(entry, exit, p.delta)


def arc_depth(circle: SlipCircle, x):
    """Elevation of the lower arc at ``x`` (scalar or array)."""
    dx = np.asarray(x, dtype=float) - circle.xc
    r2 = circle.radius * circle.radius
    span = r2 - dx * dx
    if np.any(span < -1e-9 * r2):
        raise ValueError("abscissa outside the horizontal span of the circle")
    y = circle.yc - np.sqrt(np.maximum(span, 0.0))
    return float(y) if np.ndim(y) == 0 else y


def _arc_inside_ground(slope: SlopeCase, circle: SlipCircle, n: int) -> bool:
    x_out, x_in = circle.exit[0], circle.entry[0]
    # The arc is convex and the ground is linear between its kinks, so
    # arc - ground peaks at a kink or an endpoint: checking the kinks is exact.
    for kink, ground in ((0.0, 0.0), (slope.width, slope.height)):
        if x_out < kink < x_in and arc_depth(circle, kink) > ground + GROUND_EPS:
            return False
    xs = x_out + (np.arange(n) + 0.5) * ((x_in - x_out) / n)
    return bool(np.all(arc_depth(circle, xs) <= slope.surface(xs) + GROUND_EPS))


def check_viability(slope: SlopeCase, p: SlipParams, n: int = 25) -> Viability:
    """Classify a triplet; ``n`` sets the midpoint-sampling fallback resolution."""
    if not p.x_in > p.x_out:
        return Viability(False, ViabilityReason.DEGENERATE_CHORD)
    if p.delta > HALF_PI + ANGLE_EPS:
        return Viability(False, ViabilityReason.DELTA_ABOVE_MAX)
    entry, exit = endpoints(slope, p.x_in, p.x_out)
    chord = chord_angle(entry, exit)
    if p.delta <= chord or p.delta < delta_min(slope, p.x_in, p.x_out) - ANGLE_EPS:
        return Viability(False, ViabilityReason.DELTA_BELOW_MIN)
    try:
        circle = circle_through(entry, exit, min(p.delta, HALF_PI))
    except DegenerateCircleError:
        return Viability(False, ViabilityReason.DELTA_BELOW_MIN)
    if not _arc_inside_ground(slope, circle, n):
        return Viability(False, ViabilityReason.ARC_ABOVE_GROUND)
    return Viability(True, ViabilityReason.OK)


def params_from_circle(slope: SlopeCase, xc: float, yc: float, radius: float) -> Optional[SlipParams]:
    """Triplet of a centre/radius circle cut by the ground, or ``None`` without two crossings.

    Exit and entry are the leftmost and rightmost ground crossings. On a
    vertical face, circles leaving the face between toe and crest also give
    ``None``.
    """
    H, B = slope.height, slope.width
    xs = []
    # lower ground y = 0, x <= 0
    disc = radius * radius - yc * yc
    if disc >= 0.0:
        xs += [x for x in (xc - math.sqrt(disc), xc + math.sqrt(disc)) if x <= 0.0]
    # upper ground y = H, x >= B
    disc = radius * radius - (yc - H) ** 2
    if disc >= 0.0:
        xs += [x for x in (xc - math.sqrt(disc), xc + math.sqrt(disc)) if x >= B]
    # face from (0, 0) to (B, H), parametrised by s in [0, 1]
    if B > 0.0:
        seg = B * B + H * H
        half_b = -(xc * B + yc * H)
        c0 = xc * xc + yc * yc - radius * radius
        disc = half_b * half_b - seg * c0
        if disc >= 0.0:
            root = math.sqrt(disc)
            xs += [s * B for s in ((-half_b - root) / seg, (-half_b + root) / seg) if 0.0 <= s <= 1.0]
    else:
        # vertical face x = 0: only a crossing at the crest corner has a triplet;
        # an exit part-way up the face is not expressible by abscissae alone
        disc = radius * radius - xc * xc
        if disc >= 0.0:
            y_low = yc - math.sqrt(disc)
            if GROUND_EPS < y_low < H - GROUND_EPS:
                return None
            if H - GROUND_EPS <= y_low <= H:
                xs.append(0.0)
    if len(xs) < 2:
        return None
    x_out, x_in = min(xs), max(xs)
    if x_in - x_out <= 1e-12 * max(1.0, radius):
        return None
    y_in = ground_elevation(slope, x_in)
    return SlipParams(x_in, x_out, math.atan2(x_in - xc, yc - y_in))

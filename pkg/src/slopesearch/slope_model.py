"""Slope geometry and horizontally layered soil.

Coordinates: the toe sits at the origin and the slope rises to the right, so
the ground surface is ``0`` left of the toe, ``x tan(beta)`` along the face and
``H`` beyond the crest at ``(B, H)``. Angles are radians internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]

# Tolerance on "point above ground" checks (m).
GROUND_EPS = 1e-9


@dataclass(frozen=True)
class Material:
    """Mohr-Coulomb soil: cohesion (kPa), friction angle (rad), unit weight (kN/m3)."""

    c: float
    phi: float
    gamma: float

    def __post_init__(self):
        if not self.c >= 0.0:
            raise ValueError(f"cohesion must be >= 0, got {self.c}")
        if not 0.0 <= self.phi < math.pi / 2:
            raise ValueError(f"friction angle must be in [0, 90) degrees, got {math.degrees(self.phi)}")
        if not self.gamma > 0.0:
            raise ValueError(f"unit weight must be > 0, got {self.gamma}")

    @classmethod
    def from_degrees(cls, c: float, phi_deg: float, gamma: float) -> "Material":
        return cls(float(c), math.radians(phi_deg), float(gamma))

    @property
    def phi_deg(self) -> float:
        return math.degrees(self.phi)

    @property
    def tan_phi(self) -> float:
        return math.tan(self.phi)


@dataclass(frozen=True)
class SoilProfile:
    """Horizontal layers listed topmost first as ``(top_elevation, material)``.

    A layer spans from its own top down to the top of the next layer; the
    last layer extends indefinitely downwards.
    """

    layers: Tuple[Tuple[float, Material], ...]

    def __post_init__(self):
        layers = tuple((float(top), mat) for top, mat in self.layers)
        object.__setattr__(self, "layers", layers)
        if not layers:
            raise ValueError("soil profile needs at least one layer")
        tops = [top for top, _ in layers]
        if any(b >= a for a, b in zip(tops, tops[1:])):
            raise ValueError(f"layer top elevations must be strictly decreasing, got {tops}")

    @classmethod
    def homogeneous(cls, material: Material, top: float = math.inf) -> "SoilProfile":
        return cls(((top, material),))

    @property
    def is_homogeneous(self) -> bool:
        return len(self.layers) == 1

    @property
    def tops(self) -> np.ndarray:
        return np.array([top for top, _ in self.layers])

    def layer_index(self, y: ArrayLike) -> ArrayLike:
        """Index of the layer holding elevation ``y``; interface ties go to the upper layer."""
        # Layer k covers (tops[k+1], tops[k]].
        lower_tops = -self.tops[1:]
        idx = np.searchsorted(lower_tops, -np.asarray(y, dtype=float), side="left")
        return int(idx) if np.ndim(idx) == 0 else idx

    def column_weight(self, y_lo: np.ndarray, y_hi: np.ndarray) -> np.ndarray:
        """Integral of unit weight over vertical segments ``[y_lo, y_hi]`` (kN/m2)."""
        if self.is_homogeneous:
            return self.layers[0][1].gamma * np.maximum(y_hi - y_lo, 0.0)
        total = np.zeros(np.shape(y_lo))
        bottoms = list(self.tops[1:]) + [-math.inf]
        for (top, mat), bottom in zip(self.layers, bottoms):
            overlap = np.minimum(y_hi, top) - np.maximum(y_lo, bottom)
            total += mat.gamma * np.maximum(overlap, 0.0)
        return total


@dataclass(frozen=True)
class SlopeCase:
    """Simple slope of height ``H`` and inclination ``beta`` over a layered profile."""

    height: float
    beta: float
    profile: SoilProfile
    width: float = field(init=False)

    def __post_init__(self):
        if not self.height > 0.0:
            raise ValueError(f"slope height must be > 0, got {self.height}")
        if not 0.0 < self.beta <= math.pi / 2 + 1e-12:
            raise ValueError("inclination must be in (0, 90]")
        if self.profile.layers[0][0] < self.height:
            raise ValueError("top soil layer must reach the crest elevation")
        if abs(self.beta - math.pi / 2) <= 1e-12:
            object.__setattr__(self, "beta", math.pi / 2)
            object.__setattr__(self, "width", 0.0)
        else:
            object.__setattr__(self, "width", self.height / math.tan(self.beta))

    @classmethod
    def from_degrees(
        cls,
        height: float,
        beta_deg: float,
        soil: Union[Material, SoilProfile, Sequence[Tuple[float, Material]]],
    ) -> "SlopeCase":
        if isinstance(soil, Material):
            profile = SoilProfile.homogeneous(soil)
        elif isinstance(soil, SoilProfile):
            profile = soil
        else:
            profile = SoilProfile(tuple(soil))
        if not 0.0 < beta_deg <= 90.0:
            raise ValueError("inclination must be in (0, 90]")
        return cls(float(height), math.radians(beta_deg), profile)

    @property
    def beta_deg(self) -> float:
        return math.degrees(self.beta)

    @property
    def reach(self) -> float:
        """``max(H, B)``, the horizontal extent of the entry and exit search ranges."""
        return max(self.height, self.width)

    @property
    def vertical(self) -> bool:
        return self.width == 0.0

    def surface(self, x: ArrayLike) -> ArrayLike:
        """Vectorised ground elevation."""
        x = np.asarray(x, dtype=float)
        if self.vertical:
            return np.where(x >= 0.0, self.height, 0.0)
        return np.clip(x * (self.height / self.width), 0.0, self.height)


def ground_elevation(slope: SlopeCase, x: float) -> float:
    """Ground elevation at abscissa ``x``."""
    if x <= 0.0:
        return 0.0 if (x < 0.0 or not slope.vertical) else slope.height
    if x >= slope.width:
        return slope.height
    return min(x * slope.height / slope.width, slope.height)


def material_at(slope: SlopeCase, point: Tuple[float, float]) -> Material:
    """Material at ``point``; raises ``ValueError`` for points above the ground."""
    x, y = point
    if y > ground_elevation(slope, x) + GROUND_EPS:
        raise ValueError(f"point ({x}, {y}) lies above the ground surface")
    return slope.profile.layers[slope.profile.layer_index(y)][1]

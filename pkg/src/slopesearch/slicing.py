"""Vertical slices of the sliding mass above a slip circle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from slopesearch.slope_model import GROUND_EPS, Material, SlopeCase
from slopesearch.slip_geometry import SlipCircle, arc_depth


@dataclass(frozen=True)
class Slice:
    x_mid: float
    width: float
    height: float
    alpha: float
    weight: float
    base_material: Material


@dataclass(frozen=True, eq=False)
class SliceSet:
    """``n`` equal-width slices from exit to entry, stored column-wise.

    ``alpha`` is positive right of the circle centre, where the base dips
    towards the exit. ``c`` and ``tan_phi`` hold the base-material strength.
    """

    x_mid: np.ndarray
    width: np.ndarray
    height: np.ndarray
    alpha: np.ndarray
    weight: np.ndarray
    c: np.ndarray
    tan_phi: np.ndarray
    materials: tuple

    @property
    def n(self) -> int:
        return len(self.x_mid)

    def __len__(self) -> int:
        return self.n

    @property
    def slices(self) -> List[Slice]:
        return [
            Slice(float(x), float(b), float(h), float(a), float(w), m)
            for x, b, h, a, w, m in zip(
                self.x_mid, self.width, self.height, self.alpha, self.weight, self.materials
            )
        ]

    @property
    def driving_sum(self) -> float:
        return float(np.sum(self.weight * np.sin(self.alpha)))

    @classmethod
    def from_slices(cls, slices: List[Slice]) -> "SliceSet":
        mats = tuple(s.base_material for s in slices)
        return cls(
            x_mid=np.array([s.x_mid for s in slices], dtype=float),
            width=np.array([s.width for s in slices], dtype=float),
            height=np.array([s.height for s in slices], dtype=float),
            alpha=np.array([s.alpha for s in slices], dtype=float),
            weight=np.array([s.weight for s in slices], dtype=float),
            c=np.array([m.c for m in mats], dtype=float),
            tan_phi=np.array([m.tan_phi for m in mats], dtype=float),
            materials=mats,
        )


def build_slices(slope: SlopeCase, circle: SlipCircle, n: int = 25) -> SliceSet:
    """Cut the mass between ``circle`` and the ground into ``n`` slices.

    Heights and base angles are taken at slice midpoints. Weights integrate
    the unit weight of every layer crossed between base and ground.
    """
    if n < 1:
        raise ValueError(f"number of slices must be >= 1, got {n}")
    x_out, x_in = circle.exit[0], circle.entry[0]
    if not x_in > x_out:
        raise ValueError("circle entry must lie right of its exit")
    b = (x_in - x_out) / n
    x_mid = x_out + (np.arange(n) + 0.5) * b
    base = arc_depth(circle, x_mid)
    top = slope.surface(x_mid)
    height = top - base
    if np.any(height < -GROUND_EPS):
        raise ValueError("slip arc rises above the ground surface")
    height = np.maximum(height, 0.0)
    alpha = np.arcsin(np.clip((x_mid - circle.xc) / circle.radius, -1.0, 1.0))
    width = np.full(n, b)
    profile = slope.profile
    weight = profile.column_weight(base, base + height) * b
    if profile.is_homogeneous:
        mat = profile.layers[0][1]
        materials = (mat,) * n
        c = np.full(n, mat.c)
        tan_phi = np.full(n, mat.tan_phi)
    else:
        idx = np.atleast_1d(profile.layer_index(base))
        materials = tuple(profile.layers[k][1] for k in idx)
        c = np.array([m.c for m in materials])
        tan_phi = np.array([m.tan_phi for m in materials])
    return SliceSet(x_mid, width, height, alpha, weight, c, tan_phi, materials)

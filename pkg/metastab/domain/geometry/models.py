from __future__ import annotations

import enum
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from metastab.core.errors import CollarError
from metastab.domain.algebra.engine import finite_difference_jacobian
from metastab.domain.algebra.models import SymMatrix3
from metastab.domain.geometry.surfaces import Surface

MatrixField = Callable[[np.ndarray], SymMatrix3]
VectorField = Callable[[np.ndarray], np.ndarray]


class CollarSide(str, enum.Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"


class Orientation(str, enum.Enum):
    HAT_ABOVE = "hat_above"  # F_*A_minus − A_plus ≥ c d^α
    HAT_BELOW = "hat_below"  # A_plus − F_*A_minus ≥ c d^α


@dataclass(frozen=True)
class CollarRegion:
    surface: Surface
    tau: float
    side: CollarSide

    def __post_init__(self) -> None:
        if not 0.0 < self.tau < self.surface.reach():
            raise CollarError(f"collar half-width {self.tau} must lie in (0, reach = {self.surface.reach():.6g})")

    def contains(self, x, slack: float = 1e-12) -> bool:
        d = self.surface.signed_distance(x)
        if self.side == CollarSide.EXTERIOR:
            d = -d
        return -slack <= d <= self.tau + slack

    def samples(self, n_surface: int, n_depth: int) -> np.ndarray:
        """Points p ∓ tν at depth midpoints t = τ(j + ½)/n_depth below the surface samples."""
        sign = -1.0 if self.side == CollarSide.INTERIOR else 1.0
        depths = self.tau * (np.arange(n_depth) + 0.5) / n_depth
        points = []
        for p in self.surface.sample(n_surface):
            nu = self.surface.normal(p)
            points.extend(p + sign * t * nu for t in depths)
        return np.array(points)


@dataclass(frozen=True)
class DiffeoMap:
    """Diffeomorphism with inverse and an optional analytic Jacobian."""

    forward: VectorField
    inverse: VectorField
    analytic_jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    fd_step: float = 1e-5
    name: str = "map"

    def __call__(self, x) -> np.ndarray:
        return self.forward(np.asarray(x, dtype=float))

    def jacobian(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.analytic_jacobian is not None:
            return self.analytic_jacobian(x)
        return finite_difference_jacobian(self.forward, x, self.fd_step)

    def fd_jacobian(self, x, h: float | None = None) -> np.ndarray:
        return finite_difference_jacobian(self.forward, np.asarray(x, dtype=float), h or self.fd_step)

    def det(self, x) -> float:
        return float(np.linalg.det(self.jacobian(x)))


@dataclass(frozen=True)
class OrderingFit:
    c_fit: float
    orientation: Orientation
    c_hat_above: float
    c_hat_below: float
    worst_point: np.ndarray
    n_samples: int

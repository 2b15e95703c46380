from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from metastab.core.errors import SupportError

VectorMap = Callable[[np.ndarray], np.ndarray]

BOX_HALF_WIDTH: float = math.pi
BOX_HEIGHT: float = math.pi
# radial panel breaks 0, ½, ¾, …, 1 − 2⁻⁸, 1
RADIAL_BREAKS: tuple[float, ...] = (0.0,) + tuple(1.0 - 2.0**-j for j in range(1, 9)) + (1.0,)
DEFAULT_CONCENTRATIONS: tuple[float, ...] = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0)
DEFAULT_ALPHAS: tuple[float, ...] = (0.0, 1.0, 1.5, 2.5)


@dataclass(frozen=True)
class TestField:
    """Closed-form field on the unit ball, vectorized over points of shape (N, 3)."""

    __test__ = False

    name: str
    values: VectorMap
    concentration: float = 0.0

    def __call__(self, points) -> np.ndarray:
        return self.values(np.atleast_2d(np.asarray(points, dtype=float)))


@dataclass(frozen=True)
class BumpField:
    """
    u = (0, 0, φ(x)·cos(k x₁)) with φ = A·exp(−1/(1 − |x − c|²/a²)) inside the ball of radius a.

    div u = ∂₃φ·cos(k x₁).
    """

    name: str
    center: tuple[float, float, float]
    radius: float
    amplitude: float = 1.0
    frequency: float = 0.0

    def check_support(self) -> None:
        c1, c2, c3 = self.center
        a = self.radius
        if abs(c1) + a >= BOX_HALF_WIDTH or abs(c2) + a >= BOX_HALF_WIDTH:
            raise SupportError(f"{self.name}: support reaches the lateral boundary of the periodic box")
        if c3 + a >= BOX_HEIGHT:
            raise SupportError(f"{self.name}: support reaches the top of the box")

    def _profile(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        offset = points - np.asarray(self.center)
        s2 = np.sum(offset * offset, axis=-1) / self.radius**2
        inside = s2 < 1.0
        gap = np.where(inside, 1.0 - s2, 1.0)
        phi = np.where(inside, self.amplitude * np.exp(-1.0 / gap), 0.0)
        d3 = np.where(inside, phi * (-2.0 * offset[..., 2] / self.radius**2) / gap**2, 0.0)
        return phi, d3

    def normal_component(self, points: np.ndarray) -> np.ndarray:
        phi, _ = self._profile(points)
        return phi * np.cos(self.frequency * points[..., 0])

    def __call__(self, points: np.ndarray) -> np.ndarray:
        out = np.zeros(np.shape(points), dtype=float)
        out[..., 2] = self.normal_component(points)
        return out

    def divergence(self, points: np.ndarray) -> np.ndarray:
        _, d3 = self._profile(points)
        return d3 * np.cos(self.frequency * points[..., 0])

    def shifted(self, dx1: float, dx2: float) -> BumpField:
        c1, c2, c3 = self.center
        return BumpField(self.name, (c1 + dx1, c2 + dx2, c3), self.radius, self.amplitude, self.frequency)


@dataclass(frozen=True)
class WeightedRatio:
    field: str
    alpha: float
    concentration: float
    numerator: float
    denominator: float

    @property
    def ratio(self) -> float:
        return self.numerator / self.denominator


@dataclass(frozen=True)
class TraceCheck:
    field: str
    resolution: int
    lhs: float
    norm_u: float
    norm_div: float

    @property
    def rhs_product(self) -> float:
        return self.norm_u * (self.norm_u + self.norm_div)

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs_product if self.rhs_product > 0.0 else 0.0


@dataclass(frozen=True)
class TraceFit:
    resolution: int
    constant: float
    worst_field: str


@dataclass
class EstimatesReport:
    ratios: list[WeightedRatio] = field(default_factory=list)
    curl_residuals: dict[str, float] = field(default_factory=dict)
    trace_checks: list[TraceCheck] = field(default_factory=list)
    trace_fits: list[TraceFit] = field(default_factory=list)

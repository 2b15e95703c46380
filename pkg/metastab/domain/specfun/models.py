from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

# Miller start offset and small-argument series cut-over
MILLER_MIN_OFFSET: int = 20
MILLER_ARG_FACTOR: float = 1.5
SERIES_RADIUS: float = 0.5
SERIES_TERMS: int = 20
RESCALE_LIMIT: float = 1e250
MAX_BESSEL_ORDER: int = 5000
MAX_QUADRATURE_ORDER: int = 512


@dataclass(frozen=True)
class BesselEval:
    n: int
    z: complex
    j: complex
    dj: complex
    y: complex
    dy: complex

    @property
    def h1(self) -> complex:
        return self.j + 1j * self.y

    @property
    def dh1(self) -> complex:
        return self.dj + 1j * self.dy


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights on [−1, 1]; exact for polynomials of degree ≤ 2·order − 1."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def scaled(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        half = 0.5 * (b - a)
        return a + half * (self.nodes + 1.0), half * self.weights

    def integrate(self, f: Callable[[np.ndarray], np.ndarray], a: float = -1.0, b: float = 1.0):
        x, w = self.scaled(a, b)
        return np.tensordot(w, f(x), axes=(0, 0))

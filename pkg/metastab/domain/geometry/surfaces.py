"""
Closed interfaces Γ = ∂D given as zero level sets φ = 0 with φ < 0 inside D.

Signed distances are positive inside D and negative outside.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Callable

import numpy as np
from scipy.optimize import brentq

from metastab.core.errors import GeometryError, ProjectionError
from metastab.domain.algebra.engine import eig_sym2, tangent_frame
from metastab.domain.algebra.models import SymMatrix2

logger = logging.getLogger(__name__)

NEWTON_MAX_ITER: int = 50
NEWTON_TOL: float = 1e-10
GOLDEN_ANGLE: float = math.pi * (3.0 - math.sqrt(5.0))


def fibonacci_directions(n: int) -> np.ndarray:
    """Quasi-uniform unit vectors on the Fibonacci lattice, shape (n, 3)."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    phi = GOLDEN_ANGLE * np.arange(n)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


class Surface(ABC):
    """Level-set interface with closest-point projection and curvature."""

    characteristic_length: float = 1.0

    @abstractmethod
    def level(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def gradient(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def hessian(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def project(self, x) -> tuple[np.ndarray, float]:
        """Closest point x_Γ and signed distance (positive inside)."""

    @abstractmethod
    def sample(self, n: int) -> np.ndarray: ...

    def normal(self, p) -> np.ndarray:
        g = self.gradient(np.asarray(p, dtype=float))
        return g / np.linalg.norm(g)

    def contains(self, x) -> bool:
        return bool(self.level(np.asarray(x, dtype=float)) < 0.0)

    def signed_distance(self, x) -> float:
        return self.project(x)[1]

    def shape_operator(self, p) -> np.ndarray:
        """Weingarten map ∇ν = P H P / |∇φ| on the tangent plane at p."""
        p = np.asarray(p, dtype=float)
        g = self.gradient(p)
        gn = float(np.linalg.norm(g))
        nu = g / gn
        proj = np.eye(3) - np.outer(nu, nu)
        return proj @ self.hessian(p) @ proj / gn

    def mean_curvature_trace(self, p) -> float:
        """trace Π; positive for convex surfaces with the outward normal."""
        return float(np.trace(self.shape_operator(p)))

    def principal_curvatures(self, p) -> tuple[float, float]:
        p = np.asarray(p, dtype=float)
        frame = tangent_frame(self.normal(p))
        t = np.column_stack([frame.t1, frame.t2])
        eig = eig_sym2(SymMatrix2.from_array(t.T @ self.shape_operator(p) @ t))
        return eig.lam1, eig.lam2

    def reach(self, n_samples: int = 512) -> float:
        kappa = max(max(abs(k) for k in self.principal_curvatures(p)) for p in self.sample(n_samples))
        return math.inf if kappa == 0.0 else 1.0 / kappa

    def is_strictly_convex(self, n_samples: int = 512) -> bool:
        return all(min(self.principal_curvatures(p)) > 0.0 for p in self.sample(n_samples))


class Sphere(Surface):
    def __init__(self, center=(0.0, 0.0, 0.0), radius: float = 1.0) -> None:
        if radius <= 0.0:
            raise GeometryError(f"sphere radius must be positive, got {radius}")
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.characteristic_length = self.radius

    def level(self, x):
        return np.linalg.norm(np.asarray(x) - self.center, axis=-1) - self.radius

    def _radial(self, x) -> tuple[np.ndarray, float]:
        y = np.asarray(x, dtype=float) - self.center
        r = float(np.linalg.norm(y))
        if r == 0.0:
            return np.array([0.0, 0.0, 1.0]), 0.0
        return y / r, r

    def gradient(self, x):
        return self._radial(x)[0]

    def hessian(self, x):
        u, r = self._radial(x)
        return (np.eye(3) - np.outer(u, u)) / r

    def project(self, x):
        u, r = self._radial(x)
        return self.center + self.radius * u, self.radius - r

    def sample(self, n):
        return self.center + self.radius * fibonacci_directions(n)

    def mean_curvature_trace(self, p) -> float:
        return 2.0 / self.radius

    def reach(self, n_samples: int = 512) -> float:
        return self.radius

    def is_strictly_convex(self, n_samples: int = 512) -> bool:
        return True

    def __repr__(self) -> str:
        return f"Sphere(center={self.center.tolist()}, radius={self.radius})"


class Ellipsoid(Surface):
    def __init__(self, center=(0.0, 0.0, 0.0), semi_axes=(1.0, 1.0, 1.0)) -> None:
        axes = np.asarray(semi_axes, dtype=float)
        if axes.shape != (3,) or np.any(axes <= 0.0):
            raise GeometryError(f"semi-axes must be three positive numbers, got {semi_axes}")
        self.center = np.asarray(center, dtype=float)
        self.axes = axes
        self.characteristic_length = float(axes.max())

    def level(self, x):
        y = (np.asarray(x) - self.center) / self.axes
        return np.sum(y * y, axis=-1) - 1.0

    def gradient(self, x):
        return 2.0 * (np.asarray(x, dtype=float) - self.center) / self.axes**2

    def hessian(self, x):
        return np.diag(2.0 / self.axes**2)

    def project(self, x):
        y = np.asarray(x, dtype=float) - self.center
        p = self._closest_local(y)
        dist = float(np.linalg.norm(y - p))
        inside = float(np.sum((y / self.axes) ** 2)) < 1.0
        return self.center + p, dist if inside else -dist

    def _closest_local(self, y: np.ndarray) -> np.ndarray:
        """
        Closest point p_i = a_i² y_i / (a_i² + t) with t the largest root of
        g(t) = Σ (a_i y_i / (a_i² + t))² − 1 on (−a_min², ∞).
        """
        a = self.axes
        a2 = a * a
        amin2 = float(a2.min())
        smallest = a2 - amin2 <= 1e-14 * amin2
        active = y != 0.0

        if not np.any(active & smallest):
            rest = active & ~smallest
            p = np.zeros(3)
            p[rest] = a2[rest] * y[rest] / (a2[rest] - amin2)
            g_rest = float(np.sum((p[rest] / a[rest]) ** 2))
            if g_rest <= 1.0:
                # medial-axis case: the closest point leaves the plane of y
                k = int(np.flatnonzero(smallest)[0])
                p[k] = math.sqrt(amin2 * (1.0 - g_rest))
                return p
            lo = -amin2
        else:
            eta = amin2
            lo = -amin2 + eta
            for _ in range(1100):
                if self._root_fn(lo, y, active) > 0.0:
                    break
                eta *= 0.5
                lo = -amin2 + eta
        hi = max(float(a.max() * np.linalg.norm(y)), amin2)
        while self._root_fn(hi, y, active) > 0.0:
            hi *= 2.0
        if hi <= lo:
            hi = lo + amin2
        t = brentq(self._root_fn, lo, hi, args=(y, active), xtol=1e-15 * amin2, rtol=4.5e-16)
        p = np.zeros(3)
        p[active] = a2[active] * y[active] / (a2[active] + t)
        return p

    def _root_fn(self, t: float, y: np.ndarray, active: np.ndarray) -> float:
        a = self.axes[active]
        return float(np.sum((a * y[active] / (a * a + t)) ** 2)) - 1.0

    def sample(self, n):
        return self.center + self.axes * fibonacci_directions(n)

    def reach(self, n_samples: int = 512) -> float:
        return float(self.axes.min() ** 2 / self.axes.max())

    def is_strictly_convex(self, n_samples: int = 512) -> bool:
        return True

    def __repr__(self) -> str:
        return f"Ellipsoid(center={self.center.tolist()}, semi_axes={self.axes.tolist()})"


class Implicit(Surface):
    """
    Interface given by a level-set function handle, star-shaped about the bounding-box centre.

    Derivatives fall back to central finite differences when no gradient handle is given.
    """

    def __init__(
        self,
        phi: Callable[[np.ndarray], float],
        bbox: tuple[tuple[float, float, float], tuple[float, float, float]],
        gradient: Callable[[np.ndarray], np.ndarray] | None = None,
        name: str = "implicit",
    ) -> None:
        self._phi = phi
        self._grad = gradient
        self.bbox = (np.asarray(bbox[0], dtype=float), np.asarray(bbox[1], dtype=float))
        self.name = name
        self.center = 0.5 * (self.bbox[0] + self.bbox[1])
        self.characteristic_length = 0.5 * float(np.max(self.bbox[1] - self.bbox[0]))
        self._samples: dict[int, np.ndarray] = {}

    def _check_bbox(self, x: np.ndarray) -> None:
        if np.any(x < self.bbox[0]) or np.any(x > self.bbox[1]):
            raise GeometryError(f"point {x.tolist()} lies outside the bounding box of {self.name}")

    def level(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return float(self._phi(x))
        return np.array([self._phi(row) for row in x.reshape(-1, 3)]).reshape(x.shape[:-1])

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        if self._grad is not None:
            return np.asarray(self._grad(x), dtype=float)
        h = 1e-6 * self.characteristic_length
        return np.array([(self._phi(x + h * e) - self._phi(x - h * e)) / (2.0 * h) for e in np.eye(3)])

    def hessian(self, x):
        x = np.asarray(x, dtype=float)
        h = 1e-4 * self.characteristic_length
        cols = [(self.gradient(x + h * e) - self.gradient(x - h * e)) / (2.0 * h) for e in np.eye(3)]
        m = np.column_stack(cols)
        return 0.5 * (m + m.T)

    def sample(self, n):
        if n not in self._samples:
            reach = float(np.linalg.norm(self.bbox[1] - self.bbox[0]))
            points = []
            for d in fibonacci_directions(n):
                f = lambda s, d=d: self._phi(self.center + s * d)
                if f(0.0) >= 0.0 or f(reach) <= 0.0:
                    raise GeometryError(f"{self.name} is not star-shaped about its bounding-box centre")
                s = brentq(f, 0.0, reach, xtol=1e-14 * reach)
                points.append(self.center + s * d)
            self._samples[n] = np.array(points)
        return self._samples[n]

    def _newton(self, x: np.ndarray, p: np.ndarray) -> np.ndarray | None:
        g = self.gradient(p)
        lam = float(((x - p) @ g + self._phi(p)) / (g @ g))
        z = np.append(p, lam)
        scale = max(1.0, self.characteristic_length)

        def residual(z):
            q, l = z[:3], z[3]
            return np.append(q - x + l * self.gradient(q), self._phi(q))

        res = residual(z)
        for _ in range(NEWTON_MAX_ITER):
            if np.linalg.norm(res) <= NEWTON_TOL * scale:
                return z[:3]
            q, l = z[:3], z[3]
            g = self.gradient(q)
            jac = np.zeros((4, 4))
            jac[:3, :3] = np.eye(3) + l * self.hessian(q)
            jac[:3, 3] = g
            jac[3, :3] = g
            try:
                step = np.linalg.solve(jac, -res)
            except np.linalg.LinAlgError:
                return None
            damping = 1.0
            while damping > 1e-4:
                trial = z + damping * step
                trial_res = residual(trial)
                if np.linalg.norm(trial_res) < (1.0 - 1e-4 * damping) * np.linalg.norm(res):
                    break
                damping *= 0.5
            z, res = trial, trial_res
        return z[:3] if np.linalg.norm(res) <= NEWTON_TOL * scale else None

    def project(self, x):
        """Damped Newton on the Lagrangian of min |p − x|² s.t. φ(p) = 0, with sampled restarts."""
        x = np.asarray(x, dtype=float)
        self._check_bbox(x)
        samples = self.sample(256)
        nearest = samples[int(np.argmin(np.linalg.norm(samples - x, axis=1)))]
        coarse = float(np.linalg.norm(nearest - x))

        p = self._newton(x, x.copy())
        if p is None or np.linalg.norm(p - x) > coarse + 1e-8 * self.characteristic_length:
            logger.debug("projection of %s restarted from sampled initialization", x.tolist())
            p = self._newton(x, nearest)
        if p is None:
            raise ProjectionError(x, NEWTON_MAX_ITER)
        dist = float(np.linalg.norm(x - p))
        return p, dist if self._phi(x) < 0.0 else -dist

    def __repr__(self) -> str:
        return f"Implicit({self.name})"

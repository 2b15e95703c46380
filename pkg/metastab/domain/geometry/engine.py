"""Reflections through Γ and the pushforwards F_*A, F*E, T_*J."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from metastab.core.config import get_settings
from metastab.core.errors import CollarError, DegenerateInputError, NonConvexSurfaceError, SingularJacobianError
from metastab.domain.algebra.engine import min_eig_margin
from metastab.domain.algebra.models import SymMatrix3
from metastab.domain.geometry.models import CollarRegion, CollarSide, DiffeoMap, MatrixField, OrderingFit, Orientation, VectorField
from metastab.domain.geometry.surfaces import Sphere, Surface

logger = logging.getLogger(__name__)

COLLAR_SLACK: float = 1e-9
DET_FLOOR: float = 1e-14


def as_matrix_field(a: SymMatrix3 | MatrixField) -> MatrixField:
    if isinstance(a, SymMatrix3):
        return lambda x: a
    return a


def signed_distance(surface: Surface, x) -> float:
    """Distance to Γ, positive inside D and negative outside."""
    return surface.signed_distance(np.asarray(x, dtype=float))


def _check_tau(surface: Surface, tau: float) -> None:
    reach = surface.reach()
    if not 0.0 < tau < reach:
        raise CollarError(f"tau = {tau} must lie in (0, reach = {reach:.6g})")


def normal_reflection(surface: Surface, tau: float) -> DiffeoMap:
    """x_Γ − tν ↦ x_Γ + tν on the full collar |d| ≤ τ; an involution fixing Γ."""
    _check_tau(surface, tau)
    slack = COLLAR_SLACK * surface.characteristic_length

    def forward(x):
        p, d = surface.project(x)
        if abs(d) > tau + slack:
            raise CollarError(f"point {np.asarray(x).tolist()} lies outside the collar of width {tau}")
        return 2.0 * p - x

    jacobian = None
    if isinstance(surface, Sphere):
        c, big_r = surface.center, surface.radius

        def jacobian(x):
            y = x - c
            r = float(np.linalg.norm(y))
            u = y / r
            return -np.outer(u, u) + (2.0 * big_r - r) / r * (np.eye(3) - np.outer(u, u))

    return DiffeoMap(forward, forward, jacobian, 1e-5 * surface.characteristic_length, "normal_reflection")


def convex_reflection(surface: Surface, beta: float, tau: float, curvature_sign: int = 1) -> DiffeoMap:
    """
    Interior collar → exterior collar, x_Γ − tν ↦ x_Γ + t(1 + t·c)ν with c = curvature_sign·β·trace Π(x_Γ).

    The default sign reproduces c = β·trace Π; curvature_sign = −1 mirrors the correction.
    """
    if not -1.0 < beta < 0.0:
        raise DegenerateInputError(f"beta must lie in (-1, 0), got {beta}")
    if curvature_sign not in (1, -1):
        raise DegenerateInputError(f"curvature_sign must be +1 or -1, got {curvature_sign}")
    if not surface.is_strictly_convex():
        raise NonConvexSurfaceError(f"{surface!r} is not strictly convex")
    _check_tau(surface, tau)
    slack = COLLAR_SLACK * surface.characteristic_length

    def coefficient(p) -> float:
        return curvature_sign * beta * surface.mean_curvature_trace(p)

    def forward(x):
        p, t = surface.project(x)
        if not -slack <= t <= tau + slack:
            raise CollarError(f"point {np.asarray(x).tolist()} lies outside the interior collar of width {tau}")
        t = max(t, 0.0)
        c = coefficient(p)
        if 1.0 + t * c <= 0.0:
            raise CollarError(f"1 + t·c = {1.0 + t * c:.3e} is not positive; reduce tau")
        return p + t * (1.0 + t * c) * surface.normal(p)

    def inverse(x):
        p, d = surface.project(x)
        s = -d
        if s < -slack:
            raise CollarError(f"point {np.asarray(x).tolist()} lies inside D; expected the exterior collar")
        s = max(s, 0.0)
        c = coefficient(p)
        disc = 1.0 + 4.0 * c * s
        if disc < 0.0:
            raise CollarError(f"point {np.asarray(x).tolist()} is beyond the image of the collar")
        t = 2.0 * s / (1.0 + math.sqrt(disc))
        return p - t * surface.normal(p)

    jacobian = None
    if isinstance(surface, Sphere):
        center, big_r = surface.center, surface.radius
        c_sphere = coefficient(center + big_r * np.array([0.0, 0.0, 1.0]))

        def jacobian(x):
            y = x - center
            r = float(np.linalg.norm(y))
            u = y / r
            t = big_r - r
            rho = big_r + t + c_sphere * t * t
            drho = -(1.0 + 2.0 * c_sphere * t)
            return drho * np.outer(u, u) + rho / r * (np.eye(3) - np.outer(u, u))

    return DiffeoMap(forward, inverse, jacobian, 1e-5 * surface.characteristic_length, "convex_reflection")


def affine_map(matrix, offset=(0.0, 0.0, 0.0)) -> DiffeoMap:
    m = np.asarray(matrix, dtype=float)
    b = np.asarray(offset, dtype=float)
    m_inv = np.linalg.inv(m)
    return DiffeoMap(lambda x: m @ x + b, lambda y: m_inv @ (y - b), lambda x: m.copy(), name="affine")


def compose(f: DiffeoMap, g: DiffeoMap) -> DiffeoMap:
    """f ∘ g."""
    return DiffeoMap(
        lambda x: f(g(x)),
        lambda y: g.inverse(f.inverse(y)),
        lambda x: f.jacobian(g(x)) @ g.jacobian(x),
        name=f"{f.name}∘{g.name}",
    )


def _jacobian_at_preimage(f: DiffeoMap, x_prime) -> tuple[np.ndarray, np.ndarray, float]:
    x = f.inverse(np.asarray(x_prime, dtype=float))
    jac = f.jacobian(x)
    det = float(np.linalg.det(jac))
    if abs(det) <= DET_FLOOR * max(float(np.linalg.norm(jac)) ** 3, DET_FLOOR):
        raise SingularJacobianError(x, det)
    return x, jac, det


def pushforward_matrix(f: DiffeoMap, a: SymMatrix3 | MatrixField, x_prime) -> SymMatrix3:
    """F_*A(x′) = ∇F A ∇Fᵀ / det ∇F at x = F⁻¹(x′); the signed determinant is kept."""
    x, jac, det = _jacobian_at_preimage(f, x_prime)
    m = jac @ as_matrix_field(a)(x).to_array() @ jac.T / det
    return SymMatrix3.from_array(0.5 * (m + m.T))


def pushforward_field(f: DiffeoMap, e: VectorField, x_prime) -> np.ndarray:
    """F*E(x′) = ∇F^{−T} E(x)."""
    x, jac, _ = _jacobian_at_preimage(f, x_prime)
    return np.linalg.solve(jac.T, np.asarray(e(x)))


def pushforward_source(f: DiffeoMap, j: VectorField, x_prime) -> np.ndarray:
    """T_*J(x′) = J(x) / det ∇F."""
    x, _, det = _jacobian_at_preimage(f, x_prime)
    return np.asarray(j(x)) / det


def reflected_material_ordering(
    surface: Surface,
    f: DiffeoMap,
    a_minus: SymMatrix3 | MatrixField,
    a_plus: SymMatrix3 | MatrixField,
    alpha: float,
    samples: np.ndarray,
) -> OrderingFit:
    """
    Sampled certificate of F_*A_minus − A_plus ≥ c d^α I (or the mirrored ordering) on the exterior collar.

    Each orientation reports inf over samples of λ_min(·)/d^α; c_fit is the better of the two.
    """
    if not 0.0 <= alpha < 2.0:
        raise DegenerateInputError(f"alpha must lie in [0, 2), got {alpha}")
    samples = np.asarray(samples, dtype=float).reshape(-1, 3)
    if samples.shape[0] == 0:
        raise DegenerateInputError("empty sample set")
    plus = as_matrix_field(a_plus)

    def margins(x_prime: np.ndarray) -> tuple[float, float]:
        d = abs(signed_distance(surface, x_prime))
        if alpha > 0.0 and d == 0.0:
            raise CollarError(f"sample {x_prime.tolist()} lies on the interface")
        hat = pushforward_matrix(f, a_minus, x_prime)
        weight = d**alpha
        target = plus(x_prime)
        return min_eig_margin(hat, target) / weight, min_eig_margin(target, hat) / weight

    with ThreadPoolExecutor(max_workers=get_settings().threads) as pool:
        rows = np.array(list(pool.map(margins, samples)))

    above, below = rows[:, 0], rows[:, 1]
    c_above, c_below = float(above.min()), float(below.min())
    if c_above >= c_below:
        orientation, worst = Orientation.HAT_ABOVE, int(np.argmin(above))
    else:
        orientation, worst = Orientation.HAT_BELOW, int(np.argmin(below))
    logger.debug("ordering fit: above %.6g, below %.6g over %d samples", c_above, c_below, len(samples))
    return OrderingFit(max(c_above, c_below), orientation, c_above, c_below, samples[worst].copy(), len(samples))


def collar_samples(surface: Surface, tau: float, side: CollarSide, n_surface: int, n_depth: int) -> np.ndarray:
    return CollarRegion(surface, tau, side).samples(n_surface, n_depth)

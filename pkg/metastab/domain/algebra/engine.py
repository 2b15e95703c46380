"""Closed-form symmetric eigen-solves, tangent frames and matrix orderings."""

import math
from collections.abc import Callable

import numpy as np

from metastab.core.errors import DegenerateInputError
from metastab.domain.algebra.models import Eigen2, Eigen3, SymMatrix2, SymMatrix3, TangentFrame

DISCRIMINANT_TOL: float = 1e-12
# relative eigen-gap below which cross-product eigenvectors lose accuracy
GAP_TOL: float = 1e-4
JACOBI_MAX_SWEEPS: int = 50


def eig_sym2(m: SymMatrix2) -> Eigen2:
    """
    Eigenpairs of a symmetric 2x2 matrix, lam1 >= lam2.

    lam = (a + c)/2 ± hypot((a − c)/2, b), eigenvector angle θ = ½·atan2(2b, a − c).
    """
    mid = 0.5 * (m.a + m.c)
    radius = math.hypot(0.5 * (m.a - m.c), m.b)
    theta = 0.5 * math.atan2(2.0 * m.b, m.a - m.c)
    v1 = np.array([math.cos(theta), math.sin(theta)])
    v2 = np.array([-v1[1], v1[0]])
    return Eigen2(mid + radius, mid - radius, v1, v2)


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = a.copy()
    v = np.eye(3)
    norm2 = float(np.sum(a * a))
    for _ in range(JACOBI_MAX_SWEEPS):
        off = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
        if off <= 1e-32 * norm2 or off == 0.0:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            if a[p, q] == 0.0:
                continue
            theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
            t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            rot = np.eye(3)
            rot[p, p] = rot[q, q] = c
            rot[p, q] = s
            rot[q, p] = -s
            a = rot.T @ a @ rot
            v = v @ rot
    return np.diag(a).copy(), v


def _null_vector(shifted: np.ndarray) -> np.ndarray:
    r0, r1, r2 = shifted
    candidates = [np.cross(r0, r1), np.cross(r0, r2), np.cross(r1, r2)]
    best = max(candidates, key=lambda c: float(c @ c))
    return best / np.linalg.norm(best)


def _sorted(values: np.ndarray, vectors: np.ndarray) -> Eigen3:
    order = np.argsort(values)[::-1]
    vecs = vectors[:, order]
    if np.linalg.det(vecs) < 0:
        vecs[:, 2] = -vecs[:, 2]
    vals = values[order]
    return Eigen3((float(vals[0]), float(vals[1]), float(vals[2])), vecs)


def eig_sym3(m: SymMatrix3) -> Eigen3:
    """
    Eigenpairs of a symmetric 3x3 matrix, values descending, vectors as a right-handed orthonormal basis.

    Trigonometric (Cardano) solution of the characteristic cubic; falls back to cyclic
    Jacobi rotations when the spectrum is (nearly) degenerate.
    """
    a = m.to_array()
    scale = max(float(np.max(np.abs(a))), 1e-300)
    p1 = m.xy**2 + m.xz**2 + m.yz**2
    if p1 <= (1e-30 * scale) ** 2:
        return _sorted(np.diag(a).copy(), np.eye(3))

    q = m.trace() / 3.0
    p2 = (m.xx - q) ** 2 + (m.yy - q) ** 2 + (m.zz - q) ** 2 + 2.0 * p1
    p = math.sqrt(p2 / 6.0)
    if p <= DISCRIMINANT_TOL * scale:
        return _sorted(np.full(3, q), np.eye(3))

    b = (a - q * np.eye(3)) / p
    r = float(np.clip(np.linalg.det(b) / 2.0, -1.0, 1.0))
    if 1.0 - r * r <= DISCRIMINANT_TOL:
        return _sorted(*_jacobi(a))

    phi = math.acos(r) / 3.0
    lam1 = q + 2.0 * p * math.cos(phi)
    lam3 = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    lam2 = 3.0 * q - lam1 - lam3
    if min(lam1 - lam2, lam2 - lam3) <= GAP_TOL * p:
        return _sorted(*_jacobi(a))

    v1 = _null_vector(a - lam1 * np.eye(3))
    v3 = _null_vector(a - lam3 * np.eye(3))
    v3 = v3 - (v3 @ v1) * v1
    v3 /= np.linalg.norm(v3)
    v2 = np.cross(v3, v1)
    return Eigen3((lam1, lam2, lam3), np.column_stack([v1, v2, v3]))


def tangent_frame(e) -> TangentFrame:
    """
    Orthonormal right-handed frame (t1, t2, e) with t1 × t2 = e.

    e may have any nonzero finite length; the frame is built from e/|e|.
    t1 is the coordinate axis least aligned with e (lowest index on ties), projected onto e⊥.
    The frame jumps where two components of |e| tie for the minimum.
    """
    e = np.asarray(e, dtype=float)
    n = float(np.linalg.norm(e))
    if not math.isfinite(n) or n < 1e-300:
        raise DegenerateInputError(f"cannot build a tangent frame from {e.tolist()}")
    e = e / n
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(e)))] = 1.0
    t1 = axis - (axis @ e) * e
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(e, t1)
    return TangentFrame(e, t1, t2)


def min_eig_margin(a: SymMatrix3, b: SymMatrix3) -> float:
    """λ_min(A − B): the largest c with A ≥ B + cI."""
    return eig_sym3(a - b).values[2]


def finite_difference_jacobian(f: Callable[[np.ndarray], np.ndarray], x, h: float = 1e-5) -> np.ndarray:
    """Central differences; J[i, j] = ∂f_i/∂x_j."""
    x = np.asarray(x, dtype=float)
    columns = []
    for j in range(3):
        step = np.zeros(3)
        step[j] = h
        columns.append((np.asarray(f(x + step)) - np.asarray(f(x - step))) / (2.0 * h))
    return np.column_stack(columns)


def finite_difference_curl(f: Callable[[np.ndarray], np.ndarray], x, h: float = 1e-4) -> np.ndarray:
    j = finite_difference_jacobian(f, x, h)
    return np.array([j[2, 1] - j[1, 2], j[0, 2] - j[2, 0], j[1, 0] - j[0, 1]])

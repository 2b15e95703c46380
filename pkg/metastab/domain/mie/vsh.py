"""Scalar and vector spherical harmonics with the Condon–Shortley phase."""

import math

import numpy as np
from scipy.special import gammaln, lpmv

THETA_CLIP: float = 1e-10


def _normalization(n: int, m: int) -> float:
    return math.sqrt((2 * n + 1) / (4.0 * math.pi)) * math.exp(0.5 * (gammaln(n - m + 1) - gammaln(n + m + 1)))


def ylm(n: int, m: int, theta: float, phi: float) -> tuple[complex, complex]:
    """Y_n^m(θ, φ) and ∂θY_n^m; Y_n^{−m} = (−1)^m conj(Y_n^m)."""
    theta = min(max(theta, THETA_CLIP), math.pi - THETA_CLIP)
    mm = abs(m)
    x = math.cos(theta)
    p = float(lpmv(mm, n, x))
    if mm == 0:
        dp = float(lpmv(1, n, x))
    else:
        dp = 0.5 * (float(lpmv(mm + 1, n, x)) - (n + mm) * (n - mm + 1) * float(lpmv(mm - 1, n, x)))
    norm = _normalization(n, mm)
    phase = complex(math.cos(mm * phi), math.sin(mm * phi))
    y, dy = norm * p * phase, norm * dp * phase
    if m < 0:
        sign = -1.0 if mm % 2 else 1.0
        y, dy = sign * y.conjugate(), sign * dy.conjugate()
    return y, dy


def vector_harmonics(n: int, m: int, theta: float, phi: float) -> tuple[complex, np.ndarray, np.ndarray]:
    """
    Y, B̂ and Ĉ in the local (r̂, θ̂, φ̂) basis.

    B = r∇Y = θ̂∂θY + φ̂ imY/sinθ, C = B × r̂, both divided by √(n(n+1)).
    """
    theta = min(max(theta, THETA_CLIP), math.pi - THETA_CLIP)
    y, dy = ylm(n, m, theta, phi)
    gain = math.sqrt(n * (n + 1))
    azimuthal = 1j * m * y / math.sin(theta)
    b_hat = np.array([0.0, dy, azimuthal], dtype=complex) / gain
    c_hat = np.array([0.0, azimuthal, -dy], dtype=complex) / gain
    return y, b_hat, c_hat


def spherical_coordinates(x: np.ndarray) -> tuple[float, float, float]:
    r = float(np.linalg.norm(x))
    theta = math.atan2(math.hypot(x[0], x[1]), x[2])
    phi = math.atan2(x[1], x[0])
    return r, theta, phi


def spherical_basis(theta: float, phi: float) -> np.ndarray:
    """Rows r̂, θ̂, φ̂ in Cartesian components."""
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    return np.array(
        [
            [st * cp, st * sp, ct],
            [ct * cp, ct * sp, -st],
            [-sp, cp, 0.0],
        ]
    )

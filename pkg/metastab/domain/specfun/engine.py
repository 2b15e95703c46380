"""
Spherical Bessel and Hankel functions of complex argument.

j_n comes from Miller's downward recurrence normalized against the closed forms of j_0 or j_1,
with a power series near the origin; y_n runs upward from its closed forms and h¹_n = j_n + i·y_n.
"""

import cmath
import math

import numpy as np

from metastab.core.errors import SpecialFunctionError
from metastab.domain.specfun.models import (
    MAX_BESSEL_ORDER,
    MILLER_ARG_FACTOR,
    MILLER_MIN_OFFSET,
    RESCALE_LIMIT,
    SERIES_RADIUS,
    SERIES_TERMS,
    BesselEval,
)


def _check(n: int, z: complex) -> complex:
    if n < 0:
        raise SpecialFunctionError(f"order must be non-negative, got {n}")
    if n > MAX_BESSEL_ORDER:
        raise SpecialFunctionError(f"order {n} exceeds the supported maximum {MAX_BESSEL_ORDER}")
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise SpecialFunctionError(f"argument {z} is not finite")
    return z


def _series_j(n_top: int, z: complex) -> np.ndarray:
    """j_0..j_{n_top} from z^n/(2n+1)!! · Σ (−z²/2)^k / (k!(2n+3)…(2n+2k+1))."""
    out = np.zeros(n_top + 1, dtype=complex)
    half_sq = -0.5 * z * z
    lead = 1.0 + 0.0j
    for n in range(n_top + 1):
        if n > 0:
            lead *= z / (2 * n + 1)
        term, total = 1.0 + 0.0j, 1.0 + 0.0j
        for k in range(1, SERIES_TERMS):
            term *= half_sq / (k * (2 * n + 2 * k + 1))
            total += term
        out[n] = lead * total
    return out


def _miller_j(n_top: int, z: complex) -> np.ndarray:
    start = n_top + max(MILLER_MIN_OFFSET, math.ceil(MILLER_ARG_FACTOR * abs(z)))
    f = np.zeros(start + 2, dtype=complex)
    f[start] = 1e-30
    for k in range(start, 0, -1):
        f[k - 1] = (2 * k + 1) / z * f[k] - f[k + 1]
        if abs(f[k - 1]) > RESCALE_LIMIT:
            f[k - 1 :] /= RESCALE_LIMIT

    sin_z, cos_z = cmath.sin(z), cmath.cos(z)
    j0 = sin_z / z
    j1 = sin_z / (z * z) - cos_z / z
    scale = j0 / f[0] if abs(j0) >= abs(j1) else j1 / f[1]
    out = f[: n_top + 1] * scale
    if not np.all(np.isfinite(out)):
        raise SpecialFunctionError(f"spherical Bessel j overflow at z = {z}")
    return out


def spherical_jn_all(n_max: int, z: complex) -> tuple[np.ndarray, np.ndarray]:
    """(j_n(z), j_n′(z)) for n = 0..n_max."""
    z = _check(n_max, z)
    if z == 0:
        j = np.zeros(n_max + 2, dtype=complex)
        j[0] = 1.0
    elif abs(z) < SERIES_RADIUS:
        j = _series_j(n_max + 1, z)
    else:
        j = _miller_j(n_max + 1, z)

    dj = np.empty(n_max + 1, dtype=complex)
    dj[0] = -j[1]
    n = np.arange(1, n_max + 1)
    dj[1:] = (n * j[:-2] - (n + 1) * j[2:]) / (2 * n + 1)
    return j[: n_max + 1], dj


def spherical_yn_all(n_max: int, z: complex) -> tuple[np.ndarray, np.ndarray]:
    """(y_n(z), y_n′(z)) for n = 0..n_max by upward recurrence."""
    z = _check(n_max, z)
    if z == 0:
        raise SpecialFunctionError("spherical Bessel y is singular at z = 0")
    y = np.empty(n_max + 2, dtype=complex)
    sin_z, cos_z = cmath.sin(z), cmath.cos(z)
    y[0] = -cos_z / z
    y[1] = -cos_z / (z * z) - sin_z / z
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, n_max + 1):
            y[n + 1] = (2 * n + 1) / z * y[n] - y[n - 1]
    if not np.all(np.isfinite(y)):
        raise SpecialFunctionError(f"spherical Bessel y overflow for order up to {n_max} at z = {z}")

    dy = np.empty(n_max + 1, dtype=complex)
    dy[0] = -y[1]
    n = np.arange(1, n_max + 1)
    dy[1:] = y[:-2] - (n + 1) / z * y[1 : n_max + 1]
    return y[: n_max + 1], dy


def spherical_h1_all(n_max: int, z: complex) -> tuple[np.ndarray, np.ndarray]:
    j, dj = spherical_jn_all(n_max, z)
    y, dy = spherical_yn_all(n_max, z)
    return j + 1j * y, dj + 1j * dy


def sph_bessel_j(n: int, z: complex) -> tuple[complex, complex]:
    j, dj = spherical_jn_all(n, z)
    return complex(j[n]), complex(dj[n])


def sph_bessel_y(n: int, z: complex) -> tuple[complex, complex]:
    y, dy = spherical_yn_all(n, z)
    return complex(y[n]), complex(dy[n])


def sph_hankel1(n: int, z: complex) -> tuple[complex, complex]:
    h, dh = spherical_h1_all(n, z)
    return complex(h[n]), complex(dh[n])


def bessel_eval(n: int, z: complex) -> BesselEval:
    j, dj = sph_bessel_j(n, z)
    y, dy = sph_bessel_y(n, z)
    return BesselEval(n, complex(z), j, dj, y, dy)


def riccati_psi(n_max: int, z: complex) -> tuple[np.ndarray, np.ndarray]:
    """ψ_n(z) = z·j_n(z) and ψ_n′ = j_n + z·j_n′."""
    j, dj = spherical_jn_all(n_max, z)
    return z * j, j + z * dj


def riccati_xi(n_max: int, z: complex) -> tuple[np.ndarray, np.ndarray]:
    """ξ_n(z) = z·h¹_n(z) and ξ_n′ = h¹_n + z·h¹_n′."""
    h, dh = spherical_h1_all(n_max, z)
    return z * h, h + z * dh

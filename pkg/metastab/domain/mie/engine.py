"""
Radiating solutions for a ball with constant isotropic interior (ε_c, μ_c) in vacuum.

Each (n, m, polarization) mode is E = A·M̂ (TE) or E = A·N̂ (TM) with
M̂ = Z_n(kr)Ĉ and N̂ = √(n(n+1))·Z_n/ρ·Y r̂ + (ρZ_n)′/ρ·B̂, and H = ∇×E/(iωμ).
Tangential continuity at r = R fixes the interior and reflected coefficients; a current sheet
at r = R_s or an incident plane wave supplies the regular exterior part.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from metastab.core.config import get_settings
from metastab.core.errors import DegenerateInputError, IdentityDegenerateError, ResonantModeError, SpecialFunctionError
from metastab.domain.geometry.surfaces import fibonacci_directions
from metastab.domain.mie.models import (
    RESONANCE_TOL,
    LayeredSphereProblem,
    ModeSolution,
    PlaneWave,
    Polarization,
    RadialRegion,
    ShellCurrent,
    modal_gain,
)
from metastab.domain.mie.vsh import THETA_CLIP, spherical_basis, spherical_coordinates, vector_harmonics
from metastab.domain.specfun.engine import riccati_psi, riccati_xi, spherical_jn_all, spherical_yn_all
from metastab.domain.specfun.quadrature import gauss_legendre

logger = logging.getLogger(__name__)

RADIAL_ORDER: int = 40
PANEL_PHASE: float = 2.0
SOURCE_SLACK: float = 1e-12
_I_POWERS = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


# ── coefficients ──────────────────────────────────────────────────────────


def plane_wave_coefficient(n: int, m: int, polarization: Polarization, amplitude: float) -> complex:
    """x̂e^{ikz} = Σ ½·iⁿ⁺¹√(4π(2n+1))·(M̂_{n,1} + N̂_{n,1} + M̂_{n,−1} − N̂_{n,−1})."""
    if abs(m) != 1:
        return 0j
    base = 0.5 * _I_POWERS[(n + 1) % 4] * math.sqrt(4.0 * math.pi * (2 * n + 1)) * amplitude
    if polarization == Polarization.TM and m == -1:
        return -base
    return base


def _shell_coefficients(problem: LayeredSphereProblem, source: ShellCurrent) -> tuple[complex, complex]:
    """(b0, d0): free-space field of the sheet is b0·F[j] inside R_s and d0·F[h¹] outside."""
    n = source.n
    x_s = problem.k0 * source.radius
    psi, dpsi = riccati_psi(n, x_s)
    xi, dxi = riccati_xi(n, x_s)
    scale = -x_s * source.amplitude
    if source.polarization == Polarization.TE:
        return scale * xi[n], scale * psi[n]
    return scale * dxi[n], scale * dpsi[n]


def _transmission(problem: LayeredSphereProblem, n: int, polarization: Polarization, b0: complex, k_c: complex):
    """Interior a and reflected c for a regular exterior field b0 at r = R; uses ψξ′ − ψ′ξ = i."""
    if k_c == 0:
        raise DegenerateInputError("interior wavenumber vanishes")
    x = problem.k0 * problem.radius
    x_c = k_c * problem.radius
    psi, dpsi = (v[n] for v in riccati_psi(n, x))
    xi, dxi = (v[n] for v in riccati_xi(n, x))
    psi_c, dpsi_c = (v[n] for v in riccati_psi(n, x_c))
    ratio = problem.k0 / k_c
    mu = problem.mu_c

    if polarization == Polarization.TE:
        t1, t2 = dpsi_c * xi / mu, ratio * psi_c * dxi
        denominator = t1 - t2
        numerator_c = ratio * psi_c * dpsi - psi * dpsi_c / mu
        sign = -1j
    else:
        t1, t2 = dxi * psi_c / mu, dpsi_c * xi * ratio
        denominator = t1 - t2
        numerator_c = dpsi_c * psi * ratio - psi_c * dpsi / mu
        sign = 1j

    normalized = abs(denominator) / max(abs(t1) + abs(t2), 1e-300)
    if denominator == 0 or (problem.delta == 0.0 and normalized < RESONANCE_TOL):
        raise ResonantModeError(n, polarization.value, denominator)
    return sign * b0 / denominator, b0 * numerator_c / denominator, denominator, normalized


def solve_mode(
    problem: LayeredSphereProblem,
    n: int,
    polarization: Polarization | str,
    m: int | None = None,
    branch: int = 1,
) -> ModeSolution:
    pol = Polarization(polarization)
    if n < 1:
        raise DegenerateInputError(f"mode order must be at least 1, got {n}")
    k_c = problem.k_c(branch)
    source = problem.source

    if isinstance(source, ShellCurrent):
        m = source.m if m is None else m
        b0 = d0 = 0j
        if (n, m, pol) == (source.n, source.m, source.polarization):
            b0, d0 = _shell_coefficients(problem, source)
        a, c, denominator, normalized = _transmission(problem, n, pol, b0, k_c)
        return ModeSolution(n, m, pol, k_c, a, b0, c, 0j, d0 + c, denominator, normalized, source.radius)

    m = 1 if m is None else m
    b0 = plane_wave_coefficient(n, m, pol, source.amplitude)
    a, c, denominator, normalized = _transmission(problem, n, pol, b0, k_c)
    return ModeSolution(n, m, pol, k_c, a, b0, c, b0, c, denominator, normalized)


def plane_wave_modes(problem: LayeredSphereProblem, n: int, branch: int = 1) -> list[ModeSolution]:
    return [solve_mode(problem, n, pol, m, branch) for m in (1, -1) for pol in (Polarization.TE, Polarization.TM)]


def mode_set(problem: LayeredSphereProblem, n_max: int, branch: int = 1) -> list[ModeSolution]:
    source = problem.source
    if isinstance(source, ShellCurrent):
        return [solve_mode(problem, source.n, source.polarization, source.m, branch)]
    return [sol for n in range(1, n_max + 1) for sol in plane_wave_modes(problem, n, branch)]


# ── field synthesis ───────────────────────────────────────────────────────


def _region_medium(problem: LayeredSphereProblem, region: RadialRegion, k_c: complex) -> tuple[complex, complex]:
    if region == RadialRegion.INTERIOR:
        return k_c, problem.mu_c
    return complex(problem.k0), 1.0 + 0j


def _radial_tables(n_max: int, rho: complex, outgoing: bool):
    """(Z, (ρZ)′/ρ) for j_n and, when needed, h¹_n at one argument."""
    j, dj = spherical_jn_all(n_max, rho)
    tables = [(j, j / rho + dj)]
    if outgoing:
        y, dy = spherical_yn_all(n_max, rho)
        h, dh = j + 1j * y, dj + 1j * dy
        tables.append((h, h / rho + dh))
    return tables


def _frame(problem: LayeredSphereProblem) -> np.ndarray:
    if isinstance(problem.source, PlaneWave):
        return problem.source.frame()
    return np.eye(3)


def field_at(problem: LayeredSphereProblem, solutions: list[ModeSolution], x, part: str = "total") -> tuple[np.ndarray, np.ndarray]:
    """
    (E, H) at x from a mode set.

    part="outgoing" keeps only the h¹_n terms outside the sphere.
    """
    if part not in ("total", "outgoing"):
        raise DegenerateInputError(f"unknown field part {part!r}")
    x = np.asarray(x, dtype=float)
    r_s = problem.source_radius
    if r_s is not None and abs(float(np.linalg.norm(x)) - r_s) <= SOURCE_SLACK * r_s:
        raise DegenerateInputError(f"field evaluation on the source sphere r = {r_s}")
    if not solutions:
        return np.zeros(3, dtype=complex), np.zeros(3, dtype=complex)

    frame = _frame(problem)
    r, theta, phi = spherical_coordinates(frame @ x)
    r = max(r, 1e-12 * problem.radius)
    theta = min(max(theta, THETA_CLIP), math.pi - THETA_CLIP)
    region = problem.region(r)
    k, mu = _region_medium(problem, region, solutions[0].k_c)
    rho = k * r
    g = k / (1j * problem.omega * mu)
    n_max = max(sol.n for sol in solutions)
    tables = _radial_tables(n_max, rho, region != RadialRegion.INTERIOR)

    e_sph = np.zeros(3, dtype=complex)
    h_sph = np.zeros(3, dtype=complex)
    for sol in solutions:
        alpha, beta = sol.coefficients(region)
        if part == "outgoing":
            alpha = 0j
        if alpha == 0 and beta == 0:
            continue
        n = sol.n
        z = alpha * tables[0][0][n]
        d = alpha * tables[0][1][n]
        if beta != 0:
            z += beta * tables[1][0][n]
            d += beta * tables[1][1][n]
        y, b_hat, c_hat = vector_harmonics(n, sol.m, theta, phi)
        radial = np.array([modal_gain(n) * z / rho * y, 0.0, 0.0], dtype=complex)
        if sol.polarization == Polarization.TE:
            e_sph += z * c_hat
            h_sph += g * (radial + d * b_hat)
        else:
            e_sph += radial + d * b_hat
            h_sph += g * z * c_hat

    to_cartesian = frame.T @ spherical_basis(theta, phi).T
    return to_cartesian @ e_sph, to_cartesian @ h_sph


# ── norms and balances ────────────────────────────────────────────────────


def _panels(problem: LayeredSphereProblem, r1: float, r2: float, k_scale: float) -> list[tuple[float, float]]:
    breaks = {r1, r2}
    for r in (problem.radius, problem.source_radius):
        if r is not None and r1 < r < r2:
            breaks.add(r)
    ordered = sorted(breaks)
    panels = []
    for a, b in zip(ordered[:-1], ordered[1:]):
        pieces = max(1, math.ceil((b - a) * max(k_scale, 1.0) / PANEL_PHASE))
        edges = np.linspace(a, b, pieces + 1)
        panels.extend(zip(edges[:-1].tolist(), edges[1:].tolist()))
    return panels


def squared_norms(problem: LayeredSphereProblem, solutions: list[ModeSolution], r1: float, r2: float) -> np.ndarray:
    """
    Per-mode ∫_{r1<|x|<r2} |E|² + |H|² dx.

    Angular integrals are exact by orthonormality of Y r̂, B̂ and Ĉ; radial ones use Gauss–Legendre
    panels split at R and R_s.
    """
    if not 0.0 <= r1 < r2:
        raise DegenerateInputError(f"invalid annulus [{r1}, {r2}]")
    if not solutions:
        return np.zeros(0)
    k_c = solutions[0].k_c
    rule = gauss_legendre(RADIAL_ORDER)
    n_max = max(sol.n for sol in solutions)
    terms: list[list[float]] = [[] for _ in solutions]

    for a, b in _panels(problem, r1, r2, max(abs(k_c), problem.k0)):
        region = problem.region(0.5 * (a + b))
        k, mu = _region_medium(problem, region, k_c)
        g2 = abs(k / (problem.omega * mu)) ** 2
        nodes, weights = rule.scaled(a, b)
        for r, w in zip(nodes, weights):
            rho = k * r
            tables = _radial_tables(n_max, rho, region != RadialRegion.INTERIOR)
            for i, sol in enumerate(solutions):
                alpha, beta = sol.coefficients(region)
                if alpha == 0 and beta == 0:
                    continue
                n = sol.n
                z = alpha * tables[0][0][n]
                d = alpha * tables[0][1][n]
                if beta != 0:
                    z += beta * tables[1][0][n]
                    d += beta * tables[1][1][n]
                transverse = n * (n + 1) * abs(z / rho) ** 2 + abs(d) ** 2
                if sol.polarization == Polarization.TE:
                    density = abs(z) ** 2 + g2 * transverse
                else:
                    density = transverse + g2 * abs(z) ** 2
                terms[i].append(w * r * r * density)
    return np.array([math.fsum(t) for t in terms])


def l2_norm(problem: LayeredSphereProblem, solutions: list[ModeSolution], r1: float, r2: float) -> float:
    return math.sqrt(math.fsum(squared_norms(problem, solutions, r1, r2)))


def _tangential_exterior(problem: LayeredSphereProblem, sol: ModeSolution, r: float) -> tuple[complex, complex]:
    """(Z, (ρZ)′/ρ) of one mode outside the sphere."""
    region = problem.region(r)
    alpha, beta = sol.coefficients(region)
    rho = problem.k0 * r
    (j, j_d), (h, h_d) = _radial_tables(sol.n, rho, True)
    n = sol.n
    return alpha * j[n] + beta * h[n], alpha * j_d[n] + beta * h_d[n]


@dataclass(frozen=True)
class EnergyBalance:
    source_power: float  # −Re ∫ J·Ē
    dissipation: float  # ωδ ∫_D |E|² + |H|²
    flux: float  # Re ∮ (E × H̄)·r̂
    outer_radius: float

    @property
    def residual(self) -> float:
        scale = abs(self.source_power) + abs(self.dissipation) + abs(self.flux)
        if scale == 0.0:
            return 0.0
        return abs(self.source_power - self.dissipation - self.flux) / scale


def energy_balance(problem: LayeredSphereProblem, solutions: list[ModeSolution], outer_radius: float | None = None) -> EnergyBalance:
    """
    Both sides of −Re∫J·Ē = ωδ∫_D(|E|² + |H|²) + Re∮_{|x|=R′}(E×H̄)·r̂.

    The identity follows from ∇·(E×H̄) with ∇×E = iωμH and ∇×H = −iωεE + J.
    """
    if problem.delta == 0.0 and problem.sign_changing:
        raise IdentityDegenerateError("the energy identity carries no interior information at delta = 0")
    r_s = problem.source_radius
    outer = outer_radius or 2.0 * max(problem.radius, r_s or 0.0)
    if outer <= problem.radius or (r_s is not None and outer <= r_s):
        raise DegenerateInputError(f"outer radius {outer} must enclose the sphere and the source")

    flux = math.fsum(
        outer * outer * (1j * z * np.conj(d)).real for z, d in (_tangential_exterior(problem, sol, outer) for sol in solutions)
    )
    dissipation = problem.omega * problem.delta * math.fsum(squared_norms(problem, solutions, 0.0, problem.radius))

    source_power = 0.0
    source = problem.source
    if isinstance(source, ShellCurrent):
        for sol in solutions:
            if (sol.n, sol.m, sol.polarization) != (source.n, source.m, source.polarization):
                continue
            z, d = _tangential_exterior(problem, sol, source.radius * (1.0 + 2.0 * SOURCE_SLACK))
            e_tangential = z if source.polarization == Polarization.TE else d
            source_power -= source.radius**2 * (source.amplitude * np.conj(e_tangential)).real
    return EnergyBalance(float(source_power), float(dissipation), float(flux), outer)


def energy_identity_check(problem: LayeredSphereProblem, solutions: list[ModeSolution], outer_radius: float | None = None) -> float:
    return energy_balance(problem, solutions, outer_radius).residual


def silver_muller_residual(problem: LayeredSphereProblem, solutions: list[ModeSolution], r: float, n_directions: int = 64) -> float:
    """r·max over directions of |H × x̂ − E| for the outgoing part of the field."""
    if r <= problem.radius:
        raise DegenerateInputError(f"radius {r} must lie outside the sphere")
    worst = 0.0
    for direction in fibonacci_directions(n_directions):
        e, h = field_at(problem, solutions, r * direction, part="outgoing")
        worst = max(worst, float(np.linalg.norm(np.cross(h, direction) - e)))
    return r * worst


def truncated_modes(problem: LayeredSphereProblem, r_max: float, branch: int = 1) -> tuple[list[ModeSolution], int, bool]:
    """
    Mode set whose per-order contribution to ‖(E, H)‖²_{L²(B_{r_max})} has dropped below the threshold.

    Returns (solutions, highest order used, truncation warning).
    """
    if isinstance(problem.source, ShellCurrent):
        return mode_set(problem, 0, branch), problem.source.n, False

    settings = get_settings()
    n_min = math.ceil(problem.k0 * r_max) + 2
    solutions: list[ModeSolution] = []
    contributions: list[float] = []
    for n in range(1, settings.max_order + 1):
        try:
            block = plane_wave_modes(problem, n, branch)
            contribution = math.fsum(squared_norms(problem, block, 0.0, r_max))
        except SpecialFunctionError as exc:
            logger.warning("mode series stopped at n = %d: %s", n, exc)
            return solutions, n - 1, True
        solutions.extend(block)
        contributions.append(contribution)
        if n >= n_min and contribution <= settings.truncation_threshold * math.fsum(contributions):
            return solutions, n, False
    logger.warning("mode series hit the cap n = %d without converging (delta = %g)", settings.max_order, problem.delta)
    return solutions, settings.max_order, True

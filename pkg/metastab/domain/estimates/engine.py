"""
Numerical checks of the weighted anti-curl bound on B₁ and the normal-trace estimate on a half-space.

The anti-curl is F(x) = −∫₀¹ t·x × f(tx) dt, so that ∇×F = f whenever div f = 0.
"""

import logging
import math

import numpy as np

from metastab.core.errors import DegenerateInputError, QuadratureError, SupportError
from metastab.domain.algebra.engine import finite_difference_curl
from metastab.domain.estimates.corpus import anticurl_corpus, rotational_field, trace_corpus
from metastab.domain.estimates.models import (
    BOX_HALF_WIDTH,
    BOX_HEIGHT,
    DEFAULT_ALPHAS,
    DEFAULT_CONCENTRATIONS,
    RADIAL_BREAKS,
    BumpField,
    EstimatesReport,
    TestField,
    TraceCheck,
    TraceFit,
    WeightedRatio,
)
from metastab.domain.specfun.quadrature import composite_rule, gauss_legendre

logger = logging.getLogger(__name__)

QUAD_ORDER: int = 64
QUAD_TOL: float = 1e-10
RADIAL_ORDER: int = 12
POLAR_ORDER: int = 12
AZIMUTHAL_POINTS: int = 24


# ── anti-curl ─────────────────────────────────────────────────────────────


def anti_curl_many(f: TestField, points, quad_order: int = QUAD_ORDER) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    t, w = gauss_legendre(quad_order).scaled(0.0, 1.0)
    rays = t[None, :, None] * points[:, None, :]
    values = f(rays.reshape(-1, 3)).reshape(rays.shape)
    integrand = t[None, :, None] * np.cross(points[:, None, :], values)
    return -np.einsum("q,nqk->nk", w, integrand)


def anti_curl(f: TestField, x, quad_order: int = QUAD_ORDER, check: bool = True) -> np.ndarray:
    """Gauss–Legendre evaluation of the line integral; order doubling bounds the quadrature error."""
    x = np.asarray(x, dtype=float)
    if float(np.linalg.norm(x)) >= 1.0:
        raise DegenerateInputError(f"point {x.tolist()} is not inside the unit ball")
    value = anti_curl_many(f, x, quad_order)[0]
    if check:
        doubled = anti_curl_many(f, x, min(2 * quad_order, 512))[0]
        error = float(np.linalg.norm(doubled - value))
        scale = max(float(np.linalg.norm(doubled)), float(np.max(np.abs(f(x)))), 1e-300)
        if error > QUAD_TOL * scale:
            raise QuadratureError(f"anti-curl quadrature at order {quad_order} not converged at {x.tolist()}", error)
    return value


def curl_residual(f: TestField, points, h: float = 1e-4, quad_order: int = QUAD_ORDER) -> float:
    """max ‖∇×F(x) − f(x)‖ over points, with central differences."""
    worst = 0.0
    for x in np.atleast_2d(points):
        curl = finite_difference_curl(lambda y: anti_curl(f, y, quad_order, check=False), x, h)
        worst = max(worst, float(np.linalg.norm(curl - f(x)[0])))
    return worst


# ── weighted ratio ────────────────────────────────────────────────────────


def ball_grid(
    radial_order: int = RADIAL_ORDER,
    polar_order: int = POLAR_ORDER,
    azimuthal_points: int = AZIMUTHAL_POINTS,
) -> tuple[np.ndarray, np.ndarray]:
    """Product rule on B₁: graded Gauss panels in r, Gauss in cos θ, trapezoid in φ."""
    r, wr = composite_rule(RADIAL_BREAKS, radial_order)
    mu, wmu = gauss_legendre(polar_order).scaled(-1.0, 1.0)
    phi = 2.0 * math.pi * np.arange(azimuthal_points) / azimuthal_points
    wphi = np.full(azimuthal_points, 2.0 * math.pi / azimuthal_points)

    rr, mm, pp = np.meshgrid(r, mu, phi, indexing="ij")
    s = np.sqrt(1.0 - mm * mm)
    points = np.stack([rr * s * np.cos(pp), rr * s * np.sin(pp), rr * mm], axis=-1).reshape(-1, 3)
    weights = (wr[:, None, None] * r[:, None, None] ** 2 * wmu[None, :, None] * wphi[None, None, :]).reshape(-1)
    return points, weights


def _weighted_sums(f: TestField, alphas, grid) -> tuple[float, dict[float, float]]:
    points, weights = grid
    numerator = float(np.dot(weights, np.sum(np.abs(anti_curl_many(f, points)) ** 2, axis=1)))
    f2 = np.sum(np.abs(f(points)) ** 2, axis=1)
    depth = 1.0 - np.linalg.norm(points, axis=1)
    denominators = {}
    for alpha in alphas:
        if alpha < 0.0:
            raise DegenerateInputError(f"alpha must be non-negative, got {alpha}")
        denominators[alpha] = float(np.dot(weights, depth**alpha * f2))
    return numerator, denominators


def weighted_ratio(f: TestField, alpha: float, grid=None) -> float:
    """∫_{B₁}|F|² / ∫_{B₁}(1 − |x|)^α |f|²."""
    if not 0.0 <= alpha < 2.0:
        raise DegenerateInputError(f"alpha must lie in [0, 2), got {alpha}")
    numerator, denominators = _weighted_sums(f, (alpha,), grid or ball_grid())
    if denominators[alpha] <= 0.0:
        raise DegenerateInputError("weighted denominator vanishes")
    return numerator / denominators[alpha]


def weighted_ratio_sweep(fields, alphas=DEFAULT_ALPHAS, grid=None) -> list[WeightedRatio]:
    """Ratios for each field and α; α ≥ 2 is allowed here to expose the growth past the admissible range."""
    grid = grid or ball_grid()
    rows = []
    for f in fields:
        numerator, denominators = _weighted_sums(f, alphas, grid)
        for alpha in alphas:
            if denominators[alpha] <= 0.0:
                raise DegenerateInputError(f"{f.name}: weighted denominator vanishes")
            rows.append(WeightedRatio(f.name, alpha, f.concentration, numerator, denominators[alpha]))
        logger.debug("%s: numerator %.6g", f.name, numerator)
    return rows


def concentration_sweep(ks=DEFAULT_CONCENTRATIONS, alphas=DEFAULT_ALPHAS, grid=None) -> list[WeightedRatio]:
    return weighted_ratio_sweep([rotational_field(k) for k in ks], alphas, grid)


# ── trace estimate ────────────────────────────────────────────────────────


def trace_estimate_check(u: BumpField, resolution: int = 64) -> TraceCheck:
    """
    lhs = ∫|û₃(ξ′, 0)|²(1 + |ξ′|²)^{−1/2} dξ′ on the torus [−π, π]², against ‖u‖ and ‖div u‖ on the box.

    With c = fft2(trace)/N² the torus norm is (2π)²·Σ|c_ξ|²(1 + |ξ|²)^{−1/2}.
    """
    if resolution < 4:
        raise DegenerateInputError(f"resolution must be at least 4, got {resolution}")
    u.check_support()
    n = resolution
    axis = -BOX_HALF_WIDTH + 2.0 * BOX_HALF_WIDTH * np.arange(n) / n
    x1, x2 = np.meshgrid(axis, axis, indexing="ij")

    trace = u.normal_component(np.stack([x1, x2, np.zeros_like(x1)], axis=-1))
    coeffs = np.fft.fft2(trace) / n**2
    freq = np.fft.fftfreq(n, d=1.0 / n)
    xi2 = freq[:, None] ** 2 + freq[None, :] ** 2
    lhs = (2.0 * math.pi) ** 2 * float(np.sum(np.abs(coeffs) ** 2 / np.sqrt(1.0 + xi2)))

    x3, w3 = gauss_legendre(min(n, 512)).scaled(0.0, BOX_HEIGHT)
    cell = (2.0 * BOX_HALF_WIDTH / n) ** 2
    g1, g2, g3 = np.meshgrid(axis, axis, x3, indexing="ij")
    points = np.stack([g1, g2, g3], axis=-1)
    weights = cell * np.broadcast_to(w3, g3.shape)
    norm_u = math.sqrt(float(np.sum(weights * u.normal_component(points) ** 2)))
    norm_div = math.sqrt(float(np.sum(weights * u.divergence(points) ** 2)))
    return TraceCheck(u.name, n, lhs, norm_u, norm_div)


def trace_checks(corpus, resolution: int) -> list[TraceCheck]:
    checks = []
    for u in corpus:
        try:
            checks.append(trace_estimate_check(u, resolution))
        except SupportError:
            logger.warning("skipping %s: support leaves the periodic box", u.name)
    return checks


def _fit(checks: list[TraceCheck], resolution: int) -> TraceFit:
    if not checks:
        raise DegenerateInputError("no admissible field in the trace corpus")
    worst = max(checks, key=lambda c: c.ratio)
    return TraceFit(resolution, worst.ratio, worst.field)


def trace_constant_fit(corpus, resolutions=(32, 64)) -> list[TraceFit]:
    """Largest lhs/(‖u‖(‖u‖ + ‖div u‖)) over the corpus, per grid resolution."""
    return [_fit(trace_checks(corpus, n), n) for n in resolutions]


# ── tables ────────────────────────────────────────────────────────────────

CURL_SAMPLE_RADIUS: float = 0.8


def random_ball_points(rng: np.random.Generator, n: int, radius: float = CURL_SAMPLE_RADIUS) -> np.ndarray:
    directions = rng.normal(size=(n, 3))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    return directions * (radius * rng.random(n) ** (1.0 / 3.0))[:, None]


def estimate_tables(
    alphas=DEFAULT_ALPHAS,
    concentrations=DEFAULT_CONCENTRATIONS,
    resolutions=(32, 64),
    curl_points: int = 8,
    seed: int = 0,
    anticurl: bool = True,
    trace: bool = True,
) -> EstimatesReport:
    report = EstimatesReport()
    if anticurl:
        points = random_ball_points(np.random.default_rng(seed), curl_points)
        for f in anticurl_corpus():
            report.curl_residuals[f.name] = curl_residual(f, points)
        report.ratios = concentration_sweep(concentrations, alphas)
    if trace:
        corpus = trace_corpus()
        for n in resolutions:
            checks = trace_checks(corpus, n)
            report.trace_checks.extend(checks)
            report.trace_fits.append(_fit(checks, n))
    logger.info("estimates: %d ratios, %d trace checks", len(report.ratios), len(report.trace_checks))
    return report

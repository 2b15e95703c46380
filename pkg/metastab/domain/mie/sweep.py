"""Loss sweeps δ ↓ 0: norms, balances and the limiting-absorption / resonance flags."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from metastab.core.config import get_settings
from metastab.core.errors import DegenerateInputError
from metastab.domain.mie.engine import energy_identity_check, silver_muller_residual, squared_norms, truncated_modes
from metastab.domain.mie.models import (
    LAP_TOLERANCE,
    RESONANCE_GROWTH,
    RESONANCE_WINDOW,
    LayeredSphereProblem,
    SweepReport,
    SweepRow,
)

logger = logging.getLogger(__name__)

FAR_FIELD_FACTOR: float = 20.0


def sweep_row(problem: LayeredSphereProblem) -> SweepRow:
    """One δ: norms over B_{2R}∖V, D and the collar V = {|r − R| < τ}, plus residual checks."""
    big_r, tau = problem.radius, problem.collar_width
    outer = 2.0 * big_r
    solutions, n_used, truncated = truncated_modes(problem, outer)

    def total(r1: float, r2: float) -> float:
        return math.fsum(squared_norms(problem, solutions, r1, r2))

    inner = total(0.0, big_r - tau)
    collar_in = total(big_r - tau, big_r)
    collar_out = total(big_r, big_r + tau)
    shell = total(big_r + tau, outer)

    far = FAR_FIELD_FACTOR * max(big_r, problem.source_radius or 0.0)
    ball = math.sqrt(math.fsum((inner, collar_in, collar_out, shell)))
    row = SweepRow(
        delta=problem.delta,
        norm_exterior_annulus=math.sqrt(inner + shell),
        norm_interior=math.sqrt(inner + collar_in),
        norm_collar=math.sqrt(collar_in + collar_out),
        energy_residual=energy_identity_check(problem, solutions),
        silver_muller_residual=silver_muller_residual(problem, solutions, far),
        min_mode_denominator=min(sol.normalized_denominator for sol in solutions),
        n_modes_used=len(solutions),
        truncation_warning=truncated,
        stability_envelope=problem.delta * ball / problem.source_norm,
    )
    logger.info("delta %.3e: collar norm %.6g, %d modes (n <= %d)", problem.delta, row.norm_collar, len(solutions), n_used)
    return row


def _lap_convergent(rows: list[SweepRow]) -> bool:
    if len(rows) < 3:
        return False
    tail = [row.norm_exterior_annulus for row in rows[-3:]]
    return max(tail) - min(tail) <= LAP_TOLERANCE * max(tail)


def _resonant(rows: list[SweepRow]) -> bool:
    low, high = RESONANCE_WINDOW
    window = [row.norm_collar for row in rows if low * (1 - 1e-9) <= row.delta <= high * (1 + 1e-9)]
    if len(window) < 2:
        return False
    monotone = all(b >= a for a, b in zip(window[:-1], window[1:]))
    return monotone and window[-1] >= RESONANCE_GROWTH * window[0]


def blowup_exponent(rows: list[SweepRow]) -> float | None:
    """p in ‖(E, H)‖_{L²(V)} ≈ C·δ^{−p}, by least squares in log-log."""
    points = [(math.log(row.delta), math.log(row.norm_collar)) for row in rows if row.norm_collar > 0.0]
    if len(points) < 2:
        return None
    data = np.array(points)
    return float(-np.polyfit(data[:, 0], data[:, 1], 1)[0])


def delta_sweep(problem: LayeredSphereProblem, deltas: list[float]) -> SweepReport:
    if not deltas:
        raise DegenerateInputError("empty delta list")
    if any(d <= 0.0 for d in deltas):
        raise DegenerateInputError("delta values must be positive")
    if any(b >= a for a, b in zip(deltas[:-1], deltas[1:])):
        raise DegenerateInputError("delta values must be strictly descending")

    with ThreadPoolExecutor(max_workers=get_settings().threads) as pool:
        rows = list(pool.map(sweep_row, [problem.with_delta(d) for d in deltas]))

    report = SweepReport(
        rows=rows,
        lap_convergent=_lap_convergent(rows),
        resonant=_resonant(rows),
        blowup_exponent=blowup_exponent(rows),
        envelope_max=max(row.stability_envelope for row in rows),
        source_norm=problem.source_norm,
        parameters={
            "omega": problem.omega,
            "radius": problem.radius,
            "eps_minus": str(problem.eps_minus),
            "mu_minus": str(problem.mu_minus),
            "collar_width": problem.collar_width,
            "source": type(problem.source).__name__,
        },
    )
    if any(row.truncation_warning for row in rows):
        logger.warning("mode truncation cap reached for at least one delta")
    return report

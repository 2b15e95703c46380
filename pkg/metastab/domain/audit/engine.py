"""Hypothesis audits for the transmission-problem stability theorems."""

import logging
from collections import defaultdict
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from metastab.core.config import get_settings
from metastab.core.errors import CollarError, MaterialStructureError, NonConvexSurfaceError, NonEllipticMaterialError
from metastab.domain.algebra.engine import eig_sym3, min_eig_margin
from metastab.domain.audit.models import (
    AuditReport,
    BetaRow,
    ComponentResult,
    MaterialSpec,
    SampleRecord,
    Theorem,
    Verdict,
)
from metastab.domain.complementing.engine import check_complementing
from metastab.domain.complementing.models import CauchyPair
from metastab.domain.geometry.engine import collar_samples, convex_reflection, pushforward_matrix, reflected_material_ordering
from metastab.domain.geometry.models import CollarSide, DiffeoMap, Orientation
from metastab.domain.geometry.surfaces import Surface

logger = logging.getLogger(__name__)

BETA_GRID: tuple[float, ...] = tuple(round(-0.05 * k, 2) for k in range(1, 20))
SOURCE_SUPPORT_OBLIGATION = "source support must avoid the collar O and its reflected image"
ONE_SIDED_OFFSET: float = 1e-9


def _tuple(x) -> tuple[float, float, float]:
    return tuple(float(v) for v in x)


def _sides(materials: MaterialSpec, surface: Surface, p: np.ndarray):
    """(ε⁺, μ⁺, −ε⁻, −μ⁻) evaluated on the two sides of Γ at p."""
    eta = ONE_SIDED_OFFSET * surface.characteristic_length
    nu = surface.normal(p)
    outside, inside = p + eta * nu, p - eta * nu
    return (
        materials.eps_plus(outside),
        materials.mu_plus(outside),
        -materials.eps_minus(inside),
        -materials.mu_minus(inside),
    )


def _check_ellipticity(materials: MaterialSpec, surface: Surface, p: np.ndarray) -> None:
    floor = get_settings().ellipticity_floor
    names = ("eps_plus", "mu_plus", "-eps_minus", "-mu_minus")
    for name, tensor in zip(names, _sides(materials, surface, p)):
        lam_min = eig_sym3(tensor).values[2]
        if lam_min < floor:
            raise NonEllipticMaterialError(name, p, lam_min)


def _interface_points(surface: Surface, n_samples: int | None, points: Iterable | None) -> np.ndarray:
    if points is not None:
        return np.array([surface.project(np.asarray(x, dtype=float))[0] for x in points])
    return surface.sample(n_samples or get_settings().surface_samples)


def _parallel_map(fn: Callable, items) -> list:
    with ThreadPoolExecutor(max_workers=get_settings().threads) as pool:
        return list(pool.map(fn, items))


def audit_thm1(
    materials: MaterialSpec,
    surface: Surface,
    n_samples: int | None = None,
    points: Iterable | None = None,
    assumptions: dict[str, bool] | None = None,
) -> AuditReport:
    """Complementing conditions for (ε⁺, −ε⁻, ν) and (μ⁺, −μ⁻, ν) at sampled Γ points."""
    samples = _interface_points(surface, n_samples, points)

    def evaluate(item):
        index, p = item
        _check_ellipticity(materials, surface, p)
        eps_plus, mu_plus, eps_minus, mu_minus = _sides(materials, surface, p)
        nu = surface.normal(p)
        v_eps = check_complementing(CauchyPair(eps_plus, eps_minus, nu))
        v_mu = check_complementing(CauchyPair(mu_plus, mu_minus, nu))
        record = SampleRecord(index, _tuple(p), materials.component(p), v_eps.margin, v_mu.margin)
        return record, v_eps, v_mu

    results = _parallel_map(evaluate, enumerate(samples))
    records = [r for r, _, _ in results]
    applies = all(v_eps.satisfied and v_mu.satisfied for _, v_eps, v_mu in results)

    worst = min(range(len(results)), key=lambda i: (min(records[i].eps_margin, records[i].mu_margin), i))
    _, v_eps, v_mu = results[worst]
    failing = v_eps if not v_eps.satisfied else v_mu
    witness = _tuple(failing.witness) if failing.witness is not None else None
    min_margin = min(records[worst].eps_margin, records[worst].mu_margin)
    logger.info("thm1 audit: %d samples, min margin %.6g", len(records), min_margin)
    return AuditReport(
        theorem=Theorem.THM1,
        verdict=Verdict.APPLIES if applies else Verdict.FAILS,
        n_samples=len(records),
        min_margin=min_margin,
        worst_point=records[worst].location,
        witness=None if applies else witness,
        records=records,
        assumptions={"c1_up_to_boundary": False, **(assumptions or {})},
    )


def audit_cor_adn(materials: MaterialSpec, surface: Surface, n_samples: int | None = None) -> AuditReport:
    """Per component: ε⁺ ≥ −ε⁻ + cI or −ε⁻ ≥ ε⁺ + cI, and the same for μ."""
    samples = _interface_points(surface, n_samples, None)

    def evaluate(item):
        index, p = item
        _check_ellipticity(materials, surface, p)
        eps_plus, mu_plus, eps_minus, mu_minus = _sides(materials, surface, p)
        return (
            index,
            materials.component(p),
            min_eig_margin(eps_plus, eps_minus),
            min_eig_margin(eps_minus, eps_plus),
            min_eig_margin(mu_plus, mu_minus),
            min_eig_margin(mu_minus, mu_plus),
        )

    rows = _parallel_map(evaluate, enumerate(samples))
    grouped: dict[str, list[tuple]] = defaultdict(list)
    for row in rows:
        grouped[row[1]].append(row)

    components = []
    for label in sorted(grouped):
        group = np.array([r[2:] for r in grouped[label]])
        mins = group.min(axis=0)
        components.append(
            ComponentResult(
                label=label,
                n_samples=len(group),
                c_eps=float(max(mins[0], mins[1])),
                c_mu=float(max(mins[2], mins[3])),
                eps_orientation="plus_above" if mins[0] >= mins[1] else "minus_above",
                mu_orientation="plus_above" if mins[2] >= mins[3] else "minus_above",
            )
        )

    records = [SampleRecord(i, _tuple(samples[i]), label, max(a, b), max(c, d)) for i, label, a, b, c, d in rows]
    worst = min(range(len(records)), key=lambda i: (min(records[i].eps_margin, records[i].mu_margin), i))
    return AuditReport(
        theorem=Theorem.COR_ADN,
        verdict=Verdict.APPLIES if all(c.certified for c in components) else Verdict.FAILS,
        n_samples=len(records),
        min_margin=min(min(c.c_eps, c.c_mu) for c in components),
        worst_point=records[worst].location,
        records=records,
        components=components,
    )


def _fitted_exponent(surface: Surface, reflection: DiffeoMap, a_minus, a_plus, samples: np.ndarray, orientation: Orientation) -> float | None:
    """Least-squares slope of log λ_min against log d over samples with a positive gap."""
    logs = []
    for x in samples:
        hat = pushforward_matrix(reflection, a_minus, x)
        gap = min_eig_margin(hat, a_plus(x)) if orientation == Orientation.HAT_ABOVE else min_eig_margin(a_plus(x), hat)
        d = abs(surface.signed_distance(x))
        if gap > 0.0 and d > 0.0:
            logs.append((np.log(d), np.log(gap)))
    if len(logs) < 2 or len({round(u, 12) for u, _ in logs}) < 2:
        return None
    data = np.array(logs)
    return float(np.polyfit(data[:, 0], data[:, 1], 1)[0])


def audit_thm2(
    materials: MaterialSpec,
    surface: Surface,
    reflection: DiffeoMap,
    tau: float,
    alpha1: float,
    alpha2: float,
    n_surface: int = 256,
    n_depth: int = 4,
    assumptions: dict[str, bool] | None = None,
) -> AuditReport:
    """Reflected orderings F_*ε⁻ vs ε⁺ (weight d^α1) and F_*μ⁻ vs μ⁺ (weight d^α2) on D_{−τ}."""
    samples = collar_samples(surface, tau, CollarSide.EXTERIOR, n_surface, n_depth)
    slack = 1e-8 * surface.characteristic_length
    for x_prime in samples[:: max(1, len(samples) // 16)]:
        t = surface.signed_distance(reflection.inverse(x_prime))
        if not -slack <= t <= tau + slack:
            raise CollarError(f"reflection does not map D_tau onto D_-tau near {x_prime.tolist()}")

    grouped: dict[str, list[np.ndarray]] = defaultdict(list)
    for x_prime in samples:
        grouped[materials.component(surface.project(x_prime)[0])].append(x_prime)

    components = []
    for label in sorted(grouped):
        points = np.array(grouped[label])
        fit_eps = reflected_material_ordering(surface, reflection, materials.eps_minus, materials.eps_plus, alpha1, points)
        fit_mu = reflected_material_ordering(surface, reflection, materials.mu_minus, materials.mu_plus, alpha2, points)
        components.append(
            ComponentResult(
                label=label,
                n_samples=len(points),
                c_eps=fit_eps.c_fit,
                c_mu=fit_mu.c_fit,
                eps_orientation=fit_eps.orientation.value,
                mu_orientation=fit_mu.orientation.value,
                fitted_alpha_eps=_fitted_exponent(surface, reflection, materials.eps_minus, materials.eps_plus, points, fit_eps.orientation),
                fitted_alpha_mu=_fitted_exponent(surface, reflection, materials.mu_minus, materials.mu_plus, points, fit_mu.orientation),
            )
        )

    worst_component = min(components, key=lambda c: min(c.c_eps, c.c_mu))
    obligations = [SOURCE_SUPPORT_OBLIGATION] if alpha1 + alpha2 > 0.0 else []
    return AuditReport(
        theorem=Theorem.THM2,
        verdict=Verdict.APPLIES if all(c.certified for c in components) else Verdict.FAILS,
        n_samples=len(samples),
        min_margin=min(worst_component.c_eps, worst_component.c_mu),
        components=components,
        assumptions={"c2_interface": False, **(assumptions or {})},
        obligations=obligations,
        parameters={"tau": tau, "alpha1": alpha1, "alpha2": alpha2},
    )


def _require_isotropic_pm(materials: MaterialSpec, surface: Surface, n_samples: int) -> None:
    by_component: dict[str, tuple[float, float]] = {}
    for p in surface.sample(n_samples):
        eps_plus, mu_plus, eps_minus, mu_minus = _sides(materials, surface, p)
        for name, plus, minus in (("eps", eps_plus, eps_minus), ("mu", mu_plus, mu_minus)):
            if not plus.is_isotropic() or not minus.is_isotropic():
                raise MaterialStructureError(f"{name} is not isotropic near {p.tolist()}")
            if abs(plus.xx - minus.xx) > 1e-12 * abs(plus.xx):
                raise MaterialStructureError(f"{name}_minus is not the negative of {name}_plus near {p.tolist()}")
        label = materials.component(p)
        values = (eps_plus.xx, mu_plus.xx)
        if by_component.setdefault(label, values) != values:
            raise MaterialStructureError(f"materials are not constant on component {label}")


def audit_cor_isotropic3(
    materials: MaterialSpec,
    surface: Surface,
    beta: float,
    tau: float,
    betas: Iterable[float] | None = None,
    curvature_signs: tuple[int, ...] = (1, -1),
    n_surface: int = 128,
    n_depth: int = 4,
    assumptions: dict[str, bool] | None = None,
) -> AuditReport:
    """
    Convex-reflection certificate for ±(eI, mI) materials across a strictly convex Γ.

    Every (β, curvature sign) pair is delegated to audit_thm2 with α1 = α2 = 1; the best
    certified row is reported. Inconclusive when every pair was rejected by the collar checks.
    """
    if not surface.is_strictly_convex():
        raise NonConvexSurfaceError(f"{surface!r} is not strictly convex")
    _require_isotropic_pm(materials, surface, n_surface)

    grid = sorted(set(BETA_GRID if betas is None else betas) | {beta})
    rows: list[BetaRow] = []
    reports: dict[tuple[float, int], AuditReport] = {}
    for sign in curvature_signs:
        for b in grid:
            try:
                reflection = convex_reflection(surface, b, tau, sign)
                report = audit_thm2(materials, surface, reflection, tau, 1.0, 1.0, n_surface, n_depth, assumptions)
            except CollarError as exc:
                logger.info("beta %.3f sign %+d skipped: %s", b, sign, exc)
                rows.append(BetaRow(b, sign, float("nan"), float("nan"), False))
                continue
            gamma_eps = min(c.c_eps for c in report.components)
            gamma_mu = min(c.c_mu for c in report.components)
            rows.append(BetaRow(b, sign, gamma_eps, gamma_mu, report.verdict == Verdict.APPLIES))
            reports[(b, sign)] = report

    certified = [r for r in rows if r.certified]
    if certified:
        best = max(certified, key=lambda r: r.gamma)
        base = reports[(best.beta, best.curvature_sign)]
        verdict = Verdict.APPLIES
    else:
        finite = [r for r in rows if not np.isnan(r.gamma)]
        best = max(finite, key=lambda r: r.gamma) if finite else None
        base = reports.get((best.beta, best.curvature_sign)) if best else None
        # no (β, sign) pair produced a valid collar: nothing was sampled
        verdict = Verdict.FAILS if best else Verdict.INCONCLUSIVE

    return AuditReport(
        theorem=Theorem.COR_ISOTROPIC3,
        verdict=verdict,
        n_samples=base.n_samples if base else 0,
        min_margin=best.gamma if best else float("nan"),
        components=base.components if base else [],
        beta_table=rows,
        best_beta=best.beta if best and verdict == Verdict.APPLIES else None,
        best_gamma=best.gamma if best and verdict == Verdict.APPLIES else None,
        assumptions={"c3_interface": False, **(assumptions or {})},
        obligations=[SOURCE_SUPPORT_OBLIGATION],
        parameters={"beta": beta, "tau": tau, "alpha1": 1.0, "alpha2": 1.0},
    )


def largest_certified_tau(
    materials: MaterialSpec,
    surface: Surface,
    reflection_builder: Callable[[float], DiffeoMap],
    alpha1: float,
    alpha2: float,
    taus: Iterable[float],
    n_surface: int = 128,
    n_depth: int = 4,
) -> float | None:
    """Largest τ in the grid whose sampled thm2 certificate holds, or None."""
    for tau in sorted(taus, reverse=True):
        try:
            report = audit_thm2(materials, surface, reflection_builder(tau), tau, alpha1, alpha2, n_surface, n_depth)
        except CollarError:
            continue
        if report.verdict == Verdict.APPLIES:
            return tau
    return None

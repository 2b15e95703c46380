import cmath

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from metastab.core.errors import DegenerateInputError, IdentityDegenerateError
from metastab.domain.algebra.engine import finite_difference_curl
from metastab.domain.mie.engine import (
    energy_balance,
    field_at,
    l2_norm,
    mode_set,
    silver_muller_residual,
    solve_mode,
    squared_norms,
    truncated_modes,
)
from metastab.domain.mie.models import LayeredSphereProblem, PlaneWave, Polarization, ShellCurrent, SweepRow
from metastab.domain.mie.schemas import SweepReportRead
from metastab.domain.mie.sweep import _lap_convergent, _resonant, blowup_exponent, delta_sweep
from metastab.domain.specfun.quadrature import gauss_legendre

UNIT = np.array([0.36, 0.48, 0.8])


def shell_problem(polarization="TE", eps=-2.0, mu=-2.0, delta=0.1, n=1, m=0) -> LayeredSphereProblem:
    source = ShellCurrent(radius=1.5, n=n, m=m, polarization=polarization)
    return LayeredSphereProblem(omega=1.0, radius=1.0, eps_minus=eps, mu_minus=mu, delta=delta, source=source)


def tangential(v: np.ndarray, u: np.ndarray) -> np.ndarray:
    return v - (v @ u) * u


def synthetic_rows(deltas, collar, exterior=None) -> list[SweepRow]:
    exterior = exterior or [1.0] * len(deltas)
    return [SweepRow(d, ext, 1.0, c, 0.0, 0.0, 1.0, 1, False, d) for d, c, ext in zip(deltas, collar, exterior)]


# ── problem validation ────────────────────────────────────────────────────

class TestProblem:
    def test_lossy_wavenumber_in_upper_half_plane(self):
        problem = shell_problem(delta=0.01)
        # ε_c μ_c = (−2 + 0.01i)²: the root with Im ≥ 0 is −2 + 0.01i
        assert problem.k_c() == pytest.approx(-2.0 + 0.01j)
        assert problem.k_c(-1) == pytest.approx(2.0 - 0.01j)

    def test_source_inside_sphere(self):
        with pytest.raises(DegenerateInputError):
            LayeredSphereProblem(source=ShellCurrent(radius=0.5))

    def test_negative_loss(self):
        with pytest.raises(DegenerateInputError):
            LayeredSphereProblem(delta=-1e-3)

    def test_plane_wave_polarization_must_be_transverse(self):
        with pytest.raises(DegenerateInputError):
            PlaneWave(direction=(0.0, 0.0, 1.0), polarization=(0.0, 0.6, 0.8))

    def test_invalid_mode(self):
        with pytest.raises(DegenerateInputError):
            ShellCurrent(radius=2.0, n=1, m=2)

    def test_source_norm(self):
        # current sheet: amplitude · R_s
        assert shell_problem().source_norm == pytest.approx(1.5)


# ── mode coefficients ─────────────────────────────────────────────────────

class TestModeCoefficients:
    @pytest.mark.parametrize("polarization", ["TE", "TM"])
    def test_no_contrast_is_transparent(self, polarization):
        sol = solve_mode(shell_problem(polarization, eps=1.0, mu=1.0, delta=0.0), 1, polarization)
        assert abs(sol.outgoing) <= 1e-14 * abs(sol.inner_regular)
        assert sol.interior == pytest.approx(sol.inner_regular, rel=1e-12)

    def test_no_contrast_plane_wave(self):
        problem = LayeredSphereProblem(eps_minus=1.0, mu_minus=1.0, source=PlaneWave())
        for sol in mode_set(problem, 4):
            assert sol.interior == pytest.approx(sol.inner_regular, rel=1e-12)
            assert abs(sol.outgoing) <= 1e-13 * abs(sol.inner_regular)

    def test_unexcited_modes_vanish(self):
        sol = solve_mode(shell_problem(), 2, "TE")
        assert (sol.interior, sol.outgoing) == (0j, 0j)

    @pytest.mark.parametrize("polarization", ["TE", "TM"])
    def test_branch_invariance(self, polarization):
        problem = shell_problem(polarization)
        plus = solve_mode(problem, 1, polarization, branch=1)
        minus = solve_mode(problem, 1, polarization, branch=-1)
        assert minus.outgoing == pytest.approx(plus.outgoing, rel=1e-10)
        x = np.array([0.2, -0.3, 0.4])
        e_plus, h_plus = field_at(problem, [plus], x)
        e_minus, h_minus = field_at(problem, [minus], x)
        np.testing.assert_allclose(e_minus, e_plus, rtol=1e-10, atol=1e-14)
        np.testing.assert_allclose(h_minus, h_plus, rtol=1e-10, atol=1e-14)

    def test_order_must_be_positive(self):
        with pytest.raises(DegenerateInputError):
            solve_mode(shell_problem(), 0, Polarization.TE)


# ── fields ────────────────────────────────────────────────────────────────

class TestFields:
    def test_plane_wave_reconstruction(self):
        # no contrast: the series rebuilds E = x̂e^{iz}, H = ŷe^{iz}
        problem = LayeredSphereProblem(eps_minus=1.0, mu_minus=1.0, source=PlaneWave())
        solutions = mode_set(problem, 25)
        for x in (np.array([0.3, -0.4, 0.8]), np.array([1.2, 0.5, 0.3])):
            e, h = field_at(problem, solutions, x)
            phase = cmath.exp(1j * x[2])
            np.testing.assert_allclose(e, [phase, 0.0, 0.0], atol=1e-9)
            np.testing.assert_allclose(h, [0.0, phase, 0.0], atol=1e-9)

    @pytest.mark.parametrize("polarization", ["TE", "TM"])
    def test_tangential_continuity_at_interface(self, polarization):
        problem = shell_problem(polarization)
        solutions = mode_set(problem, 1)
        e_in, h_in = field_at(problem, solutions, (1.0 - 1e-7) * UNIT)
        e_out, h_out = field_at(problem, solutions, (1.0 + 1e-7) * UNIT)
        scale = np.linalg.norm(e_out) + np.linalg.norm(h_out)
        assert np.linalg.norm(tangential(e_in, UNIT) - tangential(e_out, UNIT)) <= 1e-5 * scale
        assert np.linalg.norm(tangential(h_in, UNIT) - tangential(h_out, UNIT)) <= 1e-5 * scale

    @pytest.mark.parametrize("polarization", ["TE", "TM"])
    @pytest.mark.parametrize("x", [(0.2, -0.3, 0.4), (0.6, 0.8, 0.5), (1.0, 1.2, 1.3)])
    def test_faraday_law(self, polarization, x):
        # ∇ × E = iωμH with μ = μ_c inside D and 1 outside
        problem = shell_problem(polarization)
        solutions = mode_set(problem, 1)
        x = np.array(x)
        e_of = lambda y: field_at(problem, solutions, y)[0]
        _, h = field_at(problem, solutions, x)
        mu = problem.mu_c if np.linalg.norm(x) < problem.radius else 1.0
        residual = finite_difference_curl(e_of, x) - 1j * problem.omega * mu * h
        assert np.linalg.norm(residual) <= 1e-6 * np.linalg.norm(h)

    @pytest.mark.parametrize("rotvec", [(0.0, 0.5 * np.pi, 0.0), (0.3, -0.7, 1.1)])
    def test_plane_wave_rotation_covariance(self, rotvec):
        # rotating direction and polarization by R maps E(x) to R·E(R⁻¹x)
        rotation = Rotation.from_rotvec(rotvec).as_matrix()
        base = LayeredSphereProblem(eps_minus=-2.0, mu_minus=-2.0, delta=0.1, source=PlaneWave())
        turned = LayeredSphereProblem(
            eps_minus=-2.0,
            mu_minus=-2.0,
            delta=0.1,
            source=PlaneWave(tuple(rotation @ [0.0, 0.0, 1.0]), tuple(rotation @ [1.0, 0.0, 0.0])),
        )
        base_modes, turned_modes = mode_set(base, 8), mode_set(turned, 8)
        for x in (np.array([0.2, -0.3, 0.4]), np.array([0.9, 0.5, -0.6]), np.array([1.4, -0.2, 0.7])):
            e, h = field_at(base, base_modes, x)
            e_rot, h_rot = field_at(turned, turned_modes, rotation @ x)
            np.testing.assert_allclose(e_rot, rotation @ e, atol=1e-10)
            np.testing.assert_allclose(h_rot, rotation @ h, atol=1e-10)
            assert np.linalg.norm(e_rot) == pytest.approx(np.linalg.norm(e), rel=1e-10)

    def test_source_sphere_rejected(self):
        problem = shell_problem()
        with pytest.raises(DegenerateInputError):
            field_at(problem, mode_set(problem, 1), 1.5 * UNIT)

    def test_silver_muller_decays(self):
        problem = shell_problem()
        solutions = mode_set(problem, 1)
        near = silver_muller_residual(problem, solutions, 20.0, 16)
        far = silver_muller_residual(problem, solutions, 40.0, 16)
        assert far < 0.75 * near


# ── norms and energy ──────────────────────────────────────────────────────

class TestNorms:
    def test_l2_norm_matches_cubature(self):
        problem = shell_problem("TE")
        solutions = mode_set(problem, 1)
        r_nodes, r_weights = gauss_legendre(12).scaled(0.2, 0.8)
        c_nodes, c_weights = gauss_legendre(16).nodes, gauss_legendre(16).weights
        phis = np.linspace(0.0, 2.0 * np.pi, 8, endpoint=False)
        total = 0.0
        for r, wr in zip(r_nodes, r_weights):
            for c, wc in zip(c_nodes, c_weights):
                s = np.sqrt(1.0 - c * c)
                for phi in phis:
                    e, h = field_at(problem, solutions, r * np.array([s * np.cos(phi), s * np.sin(phi), c]))
                    density = np.sum(np.abs(e) ** 2) + np.sum(np.abs(h) ** 2)
                    total += wr * wc * (2.0 * np.pi / len(phis)) * r * r * density
        assert l2_norm(problem, solutions, 0.2, 0.8) ** 2 == pytest.approx(total, rel=1e-6)

    def test_annuli_add_up(self):
        problem = shell_problem("TM")
        solutions = mode_set(problem, 1)
        whole = squared_norms(problem, solutions, 0.0, 2.0)
        parts = squared_norms(problem, solutions, 0.0, 1.0) + squared_norms(problem, solutions, 1.0, 2.0)
        np.testing.assert_allclose(whole, parts, rtol=1e-10)

    def test_invalid_annulus(self):
        problem = shell_problem()
        with pytest.raises(DegenerateInputError):
            squared_norms(problem, mode_set(problem, 1), 1.0, 0.5)

    @pytest.mark.parametrize("polarization", ["TE", "TM"])
    @pytest.mark.parametrize("delta", [1e-1, 1e-3])
    def test_energy_identity(self, polarization, delta):
        problem = shell_problem(polarization, delta=delta)
        balance = energy_balance(problem, mode_set(problem, 1))
        assert balance.source_power > 0.0
        assert balance.flux > 0.0
        assert balance.residual < 1e-8

    def test_energy_identity_plane_wave(self):
        problem = LayeredSphereProblem(delta=0.05, source=PlaneWave())
        solutions, _, truncated = truncated_modes(problem, 4.0)
        assert not truncated
        balance = energy_balance(problem, solutions, outer_radius=3.0)
        # no source: the absorbed power equals the net inward flux
        assert balance.dissipation == pytest.approx(-balance.flux, rel=1e-6)

    def test_identity_degenerate_without_loss(self):
        problem = shell_problem(delta=0.0)
        with pytest.raises(IdentityDegenerateError):
            energy_balance(problem, mode_set(problem, 1))


# ── sweeps ────────────────────────────────────────────────────────────────

class TestSweep:
    def test_non_resonant_sweep(self):
        report = delta_sweep(shell_problem(), [1e-3, 1e-4, 1e-5])
        assert report.deltas == [1e-3, 1e-4, 1e-5]
        assert report.lap_convergent
        assert not report.resonant
        assert abs(report.blowup_exponent) < 0.05
        assert all(row.energy_residual < 1e-8 for row in report.rows)
        assert all(not row.truncation_warning for row in report.rows)

    def test_stability_envelope_vanishes_with_delta(self):
        report = delta_sweep(shell_problem(), [1e-2, 1e-3, 1e-4, 1e-5])
        envelopes = [row.stability_envelope for row in report.rows]
        # bounded ‖(E, H)‖ on B_2R: δ·‖u‖/‖J‖ shrinks by ~10 per decade
        assert all(b < 0.2 * a for a, b in zip(envelopes[:-1], envelopes[1:]))
        per_delta = [e / row.delta for e, row in zip(envelopes, report.rows)]
        assert max(per_delta) <= 2.0 * min(per_delta)
        assert report.envelope_max == envelopes[0]

    def test_plane_wave_on_unit_contrast_sphere(self):
        # ε = μ = −1 on the unit sphere at ω = 1: no mode denominator vanishes at δ = 0
        problem = LayeredSphereProblem(
            omega=1.0,
            radius=1.0,
            eps_minus=-1.0,
            mu_minus=-1.0,
            delta=1e-2,
            source=PlaneWave((0.0, 0.0, 1.0), (1.0, 0.0, 0.0)),
        )
        report = delta_sweep(problem, [1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
        assert not report.resonant
        assert report.lap_convergent
        assert abs(report.blowup_exponent) < 0.05
        assert report.parameters["source"] == "PlaneWave"

    def test_report_read_model(self):
        read = SweepReportRead.model_validate(delta_sweep(shell_problem(), [1e-2, 1e-3]))
        assert len(read.rows) == 2
        assert read.parameters["source"] == "ShellCurrent"

    @pytest.mark.parametrize("deltas", [[], [1e-2, 1e-2], [1e-3, 1e-2], [0.0]])
    def test_invalid_delta_lists(self, deltas):
        with pytest.raises(DegenerateInputError):
            delta_sweep(shell_problem(), deltas)

    def test_resonance_flag(self):
        deltas = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
        # ‖·‖_V ∝ δ^{−1}
        growing = synthetic_rows(deltas, [1.0 / d for d in deltas])
        assert _resonant(growing)
        assert blowup_exponent(growing) == pytest.approx(1.0)
        assert not _resonant(synthetic_rows(deltas, [1.0, 1.1, 1.2, 1.3, 1.4]))

    def test_lap_flag(self):
        deltas = [1e-2, 1e-3, 1e-4]
        assert _lap_convergent(synthetic_rows(deltas, [1.0] * 3, exterior=[2.0, 2.001, 2.0015]))
        assert not _lap_convergent(synthetic_rows(deltas, [1.0] * 3, exterior=[2.0, 3.0, 4.0]))
        assert not _lap_convergent(synthetic_rows(deltas[:2], [1.0] * 2))

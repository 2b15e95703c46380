import math

import numpy as np
import pytest

from metastab.core.errors import DegenerateInputError, SupportError
from metastab.domain.estimates.corpus import (
    anticurl_corpus,
    constant_field,
    linear_field,
    polynomial_curl_field,
    rotational_field,
    trace_corpus,
)
from metastab.domain.estimates.engine import (
    anti_curl,
    anti_curl_many,
    ball_grid,
    concentration_sweep,
    curl_residual,
    estimate_tables,
    random_ball_points,
    trace_checks,
    trace_constant_fit,
    trace_estimate_check,
    weighted_ratio,
    weighted_ratio_sweep,
)
from metastab.domain.estimates.models import BumpField, TestField
from metastab.domain.estimates.schemas import EstimatesReportRead

X = np.array([0.3, -0.2, 0.5])


@pytest.fixture(scope="module")
def grid():
    return ball_grid()


# ── anti-curl ─────────────────────────────────────────────────────────────

class TestAntiCurl:
    def test_constant_field_closed_form(self):
        # F = −(x × e₃)/2 = (−x₂/2, x₁/2, 0)
        np.testing.assert_allclose(anti_curl(constant_field(), X), [0.1, 0.15, 0.0], atol=1e-15)

    def test_linear_field_closed_form(self):
        # F = −x₁(x × e₃)/3 = (−x₁x₂/3, x₁²/3, 0)
        np.testing.assert_allclose(anti_curl(linear_field(), X), [0.02, 0.03, 0.0], atol=1e-15)

    def test_vectorized_matches_pointwise(self, rng):
        points = random_ball_points(rng, 5)
        f = rotational_field(4.0)
        many = anti_curl_many(f, points)
        for x, value in zip(points, many):
            np.testing.assert_allclose(anti_curl(f, x), value, atol=1e-14)

    def test_linearity(self):
        f, g = polynomial_curl_field(), rotational_field(4.0)
        combined = TestField("combined", lambda x: 2.0 * f(x) - 0.5 * g(x))
        expected = 2.0 * anti_curl(f, X) - 0.5 * anti_curl(g, X)
        np.testing.assert_allclose(anti_curl(combined, X), expected, atol=1e-13)

    @pytest.mark.parametrize("field", anticurl_corpus(), ids=lambda f: f.name)
    def test_curl_recovers_field(self, field):
        points = random_ball_points(np.random.default_rng(5), 4)
        assert curl_residual(field, points) < 1e-6

    def test_outside_ball(self):
        with pytest.raises(DegenerateInputError):
            anti_curl(constant_field(), (0.6, 0.8, 0.0))

    def test_random_points_inside_radius(self, rng):
        points = random_ball_points(rng, 200, 0.8)
        assert np.linalg.norm(points, axis=1).max() <= 0.8


# ── weighted ratios ───────────────────────────────────────────────────────

class TestWeightedRatio:
    def test_constant_field_unweighted(self, grid):
        # ∫|F|² = ∫(x₁² + x₂²)/4 = 2π/15 and ∫|e₃|² = 4π/3
        assert weighted_ratio(constant_field(), 0.0, grid) == pytest.approx(0.1, rel=1e-12)

    def test_weight_only_shrinks_denominator(self, grid):
        ratios = [weighted_ratio(rotational_field(4.0), alpha, grid) for alpha in (0.0, 0.5, 1.0, 1.5, 1.9)]
        assert all(a < b for a, b in zip(ratios[:-1], ratios[1:]))

    @pytest.mark.parametrize("alpha", [-0.5, 2.0, 3.0])
    def test_alpha_range(self, alpha, grid):
        with pytest.raises(DegenerateInputError):
            weighted_ratio(constant_field(), alpha, grid)

    def test_sweep_rows(self, grid):
        rows = weighted_ratio_sweep([constant_field(), linear_field()], (0.0, 1.0), grid)
        assert [(r.field, r.alpha) for r in rows] == [
            ("constant_e3", 0.0),
            ("constant_e3", 1.0),
            ("linear_x1_e3", 0.0),
            ("linear_x1_e3", 1.0),
        ]
        assert rows[0].ratio == pytest.approx(0.1, rel=1e-12)

    def test_concentration_behaviour(self, grid):
        # ratio ~ k^{α−2}: bounded in k for α < 2, growing past it
        rows = concentration_sweep((8.0, 32.0), (0.0, 1.0, 1.5, 2.5), grid)
        ratio = {(r.concentration, r.alpha): r.ratio for r in rows}
        for alpha in (0.0, 1.0, 1.5):
            assert ratio[(32.0, alpha)] <= ratio[(8.0, alpha)]
        assert ratio[(32.0, 2.5)] > ratio[(8.0, 2.5)]


# ── trace estimate ────────────────────────────────────────────────────────

class TestTraceEstimate:
    def test_refinement_is_stable(self):
        u = BumpField("bump", (0.0, 0.0, 0.0), 1.5)
        coarse, fine = trace_estimate_check(u, 32), trace_estimate_check(u, 64)
        assert coarse.ratio == pytest.approx(fine.ratio, rel=0.01)
        assert fine.lhs > 0.0

    def test_zero_trace(self):
        # support x₃ ∈ [0.5, 2.5] misses the plane x₃ = 0
        check = trace_estimate_check(BumpField("lifted", (0.0, 0.0, 1.5), 1.0), 32)
        assert check.lhs == 0.0
        assert check.norm_u > 0.0
        assert check.ratio == 0.0

    def test_grid_shift_invariance(self):
        # shifted() moves the bump but not the cos(kx₁) modulation, so k = 0 here
        u = BumpField("bump", (0.0, 0.0, 0.0), 1.0)
        step = 2.0 * math.pi / 64
        base = trace_estimate_check(u, 64)
        moved = trace_estimate_check(u.shifted(4 * step, -3 * step), 64)
        assert moved.lhs == pytest.approx(base.lhs, rel=1e-10)
        assert moved.norm_u == pytest.approx(base.norm_u, rel=1e-10)

    def test_divergence_is_normal_derivative(self):
        u = BumpField("bump", (0.1, 0.0, 0.2), 1.0, 1.0, 3.0)
        x = np.array([[0.3, 0.2, 0.4]])
        h = 1e-5
        fd = (u.normal_component(x + [0.0, 0.0, h]) - u.normal_component(x - [0.0, 0.0, h])) / (2.0 * h)
        np.testing.assert_allclose(u.divergence(x), fd, rtol=1e-7)

    def test_support_outside_box(self):
        u = BumpField("edge", (3.0, 0.0, 0.0), 1.0)
        with pytest.raises(SupportError):
            trace_estimate_check(u, 32)
        assert trace_checks([u], 32) == []

    def test_resolution_floor(self):
        with pytest.raises(DegenerateInputError):
            trace_estimate_check(BumpField("bump", (0.0, 0.0, 0.0), 1.0), 2)

    def test_constant_fit(self):
        fits = trace_constant_fit(trace_corpus(), (16, 32))
        assert [f.resolution for f in fits] == [16, 32]
        names = {u.name for u in trace_corpus()}
        for fit in fits:
            assert fit.worst_field in names
            assert 0.0 < fit.constant < math.inf

    def test_constant_fit_needs_admissible_fields(self):
        with pytest.raises(DegenerateInputError):
            trace_constant_fit([BumpField("edge", (3.0, 0.0, 0.0), 1.0)], (16,))


# ── tables ────────────────────────────────────────────────────────────────

class TestEstimateTables:
    def test_small_table(self):
        report = estimate_tables((0.0, 1.0), (1.0, 4.0), resolutions=(16,), curl_points=2, seed=3)
        assert len(report.ratios) == 4
        assert set(report.curl_residuals) == {f.name for f in anticurl_corpus()}
        assert max(report.curl_residuals.values()) < 1e-6
        assert len(report.trace_checks) == len(trace_corpus())
        assert len(report.trace_fits) == 1

    def test_sections_can_be_disabled(self):
        report = estimate_tables(resolutions=(16,), anticurl=False)
        assert report.ratios == [] and report.curl_residuals == {}
        assert len(report.trace_fits) == 1

    def test_report_read_model(self):
        read = EstimatesReportRead.model_validate(estimate_tables((0.0,), (2.0,), trace=False, curl_points=1))
        assert read.ratios[0].ratio > 0.0
        assert read.trace_fits == []

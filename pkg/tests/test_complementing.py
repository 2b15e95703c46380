import math

import numpy as np
import pytest

from metastab.core.errors import DegenerateInputError
from metastab.domain.algebra.engine import tangent_frame
from metastab.domain.algebra.models import SymMatrix3
from metastab.domain.complementing.engine import (
    cauchy_form,
    check_complementing,
    mode_oracle,
    random_spd,
    random_unit,
    restriction_matrix,
    run_agreement,
    tangent_scan,
)
from metastab.domain.complementing.models import CauchyPair, CauchyStatus
from metastab.domain.complementing.schemas import AgreementRead, CauchyVerdictRead

E3 = np.array([0.0, 0.0, 1.0])
FAILING_A2 = SymMatrix3.diag(4.0, 0.25, 1.0)


# ── cauchy_form ───────────────────────────────────────────────────────────

class TestCauchyForm:
    def test_identity(self):
        # ⟨e,e⟩⟨ξ,ξ⟩ − ⟨e,ξ⟩² = 1·1 − 0
        assert cauchy_form(SymMatrix3.identity(), E3, (1.0, 0.0, 0.0)) == pytest.approx(1.0)

    def test_scales_quadratically(self):
        a = random_spd(np.random.default_rng(3))
        xi = (0.6, 0.8, 0.0)
        assert cauchy_form(a * 3.0, E3, xi) == pytest.approx(9.0 * cauchy_form(a, E3, xi))

    def test_restriction_matrix_reproduces_form(self, rng):
        a = random_spd(rng)
        e = random_unit(rng)
        frame = tangent_frame(e)
        m = restriction_matrix(a, frame).to_array()
        for theta in np.linspace(0.0, math.pi, 7):
            u = np.array([math.cos(theta), math.sin(theta)])
            assert u @ m @ u == pytest.approx(cauchy_form(a, e, frame.lift(*u)), rel=1e-9)


# ── check_complementing ───────────────────────────────────────────────────

class TestCheckComplementing:
    def test_ordered_pair_satisfied(self):
        verdict = check_complementing(CauchyPair(SymMatrix3.identity(), SymMatrix3.scalar(2.0), E3))
        assert verdict.status == CauchyStatus.SATISFIED
        # Q = 4I − I = 3I, scale = √2 + 4√2, margin = 9/50
        assert verdict.margin == pytest.approx(0.18)
        assert verdict.witness is None

    def test_constructed_failure_and_witness(self):
        pair = CauchyPair(SymMatrix3.identity(), FAILING_A2, E3)
        verdict = check_complementing(pair)
        assert verdict.status == CauchyStatus.VIOLATED
        # Q = diag(3, −3/4), det Q = −9/4
        assert verdict.det_q == pytest.approx(-2.25)
        w = verdict.witness
        assert abs(w[0] * 2.0 - w[1]) < 1e-12
        assert w[2] == pytest.approx(0.0, abs=1e-15)
        q1 = cauchy_form(pair.a1, E3, w)
        q2 = cauchy_form(pair.a2, E3, w)
        assert abs(q2 - q1) <= 1e-9

    def test_witness_is_oracle_mode(self):
        pair = CauchyPair(SymMatrix3.identity(), FAILING_A2, E3)
        result = mode_oracle(pair, check_complementing(pair).witness)
        assert result.mode_exists

    def test_equal_tensors_violated(self, rng):
        a = random_spd(rng)
        assert check_complementing(CauchyPair(a, a, random_unit(rng))).status == CauchyStatus.VIOLATED

    @pytest.mark.parametrize("trial", range(50))
    def test_dominating_pair_always_satisfied(self, trial):
        rng = np.random.default_rng(1000 + trial)
        a1 = random_spd(rng, 0.5, 2.0)
        b = 0.3 * rng.standard_normal((3, 3))
        c = math.exp(rng.uniform(math.log(1e-3), math.log(10.0)))
        a2 = SymMatrix3.from_array(a1.to_array() + b @ b.T + c * np.eye(3))
        assert check_complementing(CauchyPair(a1, a2, random_unit(rng))).satisfied

    def test_frame_rotation_invariant(self, rng):
        pair = CauchyPair(random_spd(rng), random_spd(rng), random_unit(rng))
        frame = tangent_frame(pair.e)
        base = check_complementing(pair, frame)
        rotated = check_complementing(pair, frame.rotated(0.7))
        assert rotated.status == base.status
        assert rotated.det_q == pytest.approx(base.det_q, rel=1e-9, abs=1e-12)

    def test_symmetric_in_arguments(self, rng):
        a1, a2, e = random_spd(rng), random_spd(rng), random_unit(rng)
        assert check_complementing(CauchyPair(a1, a2, e)).status == check_complementing(CauchyPair(a2, a1, e)).status

    def test_non_positive_definite_rejected(self):
        with pytest.raises(DegenerateInputError):
            CauchyPair(SymMatrix3.identity(), SymMatrix3.diag(1.0, -1.0, 1.0), E3)

    def test_zero_normal_rejected(self):
        with pytest.raises(DegenerateInputError):
            CauchyPair(SymMatrix3.identity(), SymMatrix3.identity(), (0.0, 0.0, 0.0))


# ── mode oracle ───────────────────────────────────────────────────────────

class TestModeOracle:
    def test_no_mode_for_scaled_pair(self):
        result = mode_oracle(CauchyPair(SymMatrix3.identity(), SymMatrix3.scalar(2.0), E3), (1.0, 0.0, 0.0))
        # s1 = 1, s2 = 2
        assert not result.mode_exists
        assert (result.s1, result.s2) == pytest.approx((1.0, 2.0))

    def test_decay_rates_have_negative_real_part(self, rng):
        pair = CauchyPair(random_spd(rng), random_spd(rng), E3)
        result = mode_oracle(pair, (0.0, 1.0, 0.0))
        assert all(rate.real < 0.0 for rate in result.decay_rates)

    def test_non_tangent_xi_rejected(self):
        with pytest.raises(DegenerateInputError):
            mode_oracle(CauchyPair(SymMatrix3.identity(), FAILING_A2, E3), (0.0, 0.6, 0.8))


# ── tangent scan and agreement harness ────────────────────────────────────

class TestTangentScan:
    def test_finds_constructed_mode(self):
        scan = tangent_scan(CauchyPair(SymMatrix3.identity(), FAILING_A2, E3))
        assert scan.mode_found
        assert abs(abs(scan.best_xi[1]) - 2.0 * abs(scan.best_xi[0])) < 1e-6

    def test_no_mode_for_ordered_pair(self):
        scan = tangent_scan(CauchyPair(SymMatrix3.identity(), SymMatrix3.scalar(2.0), E3))
        assert not scan.mode_found

    def test_agreement_small_batch(self):
        summary = run_agreement(300, seed=7)
        assert summary.disagreements == []
        assert summary.rate == 1.0
        assert 0 < summary.violated < 300

    def test_agreement_is_seed_deterministic(self):
        first = run_agreement(50, seed=11)
        second = run_agreement(50, seed=11)
        assert (first.violated, first.agreements) == (second.violated, second.agreements)

    @pytest.mark.slow
    def test_agreement_ten_thousand(self, benchmark):
        summary = benchmark.pedantic(run_agreement, args=(10_000, 0), rounds=1, iterations=1)
        assert summary.rate == 1.0


# ── schemas ───────────────────────────────────────────────────────────────

class TestSchemas:
    def test_verdict_read_from_attributes(self):
        verdict = check_complementing(CauchyPair(SymMatrix3.identity(), FAILING_A2, E3))
        read = CauchyVerdictRead.model_validate(verdict)
        assert read.status == CauchyStatus.VIOLATED
        assert len(read.witness) == 3

    def test_agreement_read(self):
        read = AgreementRead.model_validate(run_agreement(5, seed=1))
        assert read.trials == 5

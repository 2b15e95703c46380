import cmath
import math

import numpy as np
import pytest
from scipy import special

from metastab.core.errors import SpecialFunctionError
from metastab.domain.specfun.engine import (
    bessel_eval,
    riccati_psi,
    riccati_xi,
    sph_bessel_j,
    sph_bessel_y,
    sph_hankel1,
    spherical_jn_all,
    spherical_yn_all,
)
from metastab.domain.specfun.models import MAX_BESSEL_ORDER
from metastab.domain.specfun.quadrature import composite_rule, gauss_legendre

ARGS = [0.3, 1.7, 10.0, 2.0 + 1.0j, 0.5 - 1.5j]
ORDERS = [0, 1, 2, 5, 10]


# ── closed forms ──────────────────────────────────────────────────────────

class TestClosedForms:
    def test_j0_j1_at_one(self):
        assert sph_bessel_j(0, 1.0)[0] == pytest.approx(math.sin(1.0), rel=1e-14)
        # j1(1) = sin 1 − cos 1
        assert sph_bessel_j(1, 1.0)[0] == pytest.approx(math.sin(1.0) - math.cos(1.0), rel=1e-13)

    def test_y0_at_one(self):
        assert sph_bessel_y(0, 1.0)[0] == pytest.approx(-math.cos(1.0), rel=1e-14)

    def test_h0_at_one(self):
        # h0(1) = sin 1 − i cos 1 = −i e^{i}
        assert sph_hankel1(0, 1.0)[0] == pytest.approx(-1j * cmath.exp(1j), rel=1e-14)

    def test_origin(self):
        j, dj = spherical_jn_all(3, 0.0)
        np.testing.assert_allclose(j, [1.0, 0.0, 0.0, 0.0])
        # j1′(0) = 1/3
        assert dj[1] == pytest.approx(1.0 / 3.0)

    def test_bessel_eval_bundle(self):
        ev = bessel_eval(2, 1.3)
        h, dh = sph_hankel1(2, 1.3)
        assert ev.h1 == pytest.approx(h)
        assert ev.dh1 == pytest.approx(dh)


# ── scipy oracle ──────────────────────────────────────────────────────────

class TestAgainstScipy:
    @pytest.mark.parametrize("z", ARGS)
    @pytest.mark.parametrize("n", ORDERS)
    def test_j_and_derivative(self, n, z):
        j, dj = sph_bessel_j(n, z)
        assert j == pytest.approx(complex(special.spherical_jn(n, z)), rel=1e-9)
        assert dj == pytest.approx(complex(special.spherical_jn(n, z, derivative=True)), rel=1e-9)

    @pytest.mark.parametrize("z", ARGS)
    @pytest.mark.parametrize("n", ORDERS)
    def test_y_and_derivative(self, n, z):
        y, dy = sph_bessel_y(n, z)
        assert y == pytest.approx(complex(special.spherical_yn(n, z)), rel=1e-9)
        assert dy == pytest.approx(complex(special.spherical_yn(n, z, derivative=True)), rel=1e-9)

    def test_small_argument_series(self):
        j, _ = spherical_jn_all(4, 0.01 + 0.02j)
        expected = [complex(special.spherical_jn(n, 0.01 + 0.02j)) for n in range(5)]
        np.testing.assert_allclose(j, expected, rtol=1e-10)

    def test_large_real_argument(self):
        j, _ = spherical_jn_all(30, 80.0)
        np.testing.assert_allclose(j.real, special.spherical_jn(np.arange(31), 80.0), rtol=1e-9, atol=1e-15)


# ── identities ────────────────────────────────────────────────────────────

class TestIdentities:
    @pytest.mark.parametrize("z", [0.7, 3.0 + 0.5j, 5.0 - 2.0j, 12.0 + 1.0j])
    def test_wronskian(self, z):
        # j_n y_n′ − j_n′ y_n = 1/z²
        j, dj = spherical_jn_all(8, z)
        y, dy = spherical_yn_all(8, z)
        np.testing.assert_allclose(z * z * (j * dy - dj * y), np.ones(9), rtol=0, atol=1e-8)

    @pytest.mark.parametrize("z", [1.3, 4.0 - 1.0j])
    def test_three_term_recurrence(self, z):
        j, _ = spherical_jn_all(10, z)
        n = np.arange(1, 10)
        np.testing.assert_allclose(j[:-2] + j[2:], (2 * n + 1) / z * j[1:-1], rtol=1e-11)

    @pytest.mark.parametrize("n", [0, 1, 4, 7])
    def test_parity(self, n):
        z = 2.3 + 0.4j
        assert sph_bessel_j(n, -z)[0] == pytest.approx((-1) ** n * sph_bessel_j(n, z)[0], rel=1e-12)
        assert sph_bessel_y(n, -z)[0] == pytest.approx((-1) ** (n + 1) * sph_bessel_y(n, z)[0], rel=1e-12)

    def test_riccati_functions(self):
        z = 1.9 + 0.3j
        psi, dpsi = riccati_psi(3, z)
        xi, _ = riccati_xi(3, z)
        j, dj = spherical_jn_all(3, z)
        np.testing.assert_allclose(psi, z * j)
        np.testing.assert_allclose(dpsi, j + z * dj)
        assert xi[0] == pytest.approx(-1j * cmath.exp(1j * z))


class TestErrors:
    def test_negative_order(self):
        with pytest.raises(SpecialFunctionError):
            sph_bessel_j(-1, 1.0)

    def test_order_too_large(self):
        with pytest.raises(SpecialFunctionError):
            sph_bessel_j(MAX_BESSEL_ORDER + 1, 1.0)

    def test_non_finite_argument(self):
        with pytest.raises(SpecialFunctionError):
            sph_bessel_j(0, complex(math.nan, 0.0))

    def test_y_singular_at_origin(self):
        with pytest.raises(SpecialFunctionError):
            sph_bessel_y(0, 0.0)


# ── Gauss–Legendre ────────────────────────────────────────────────────────

class TestGaussLegendre:
    @pytest.mark.parametrize("order", [1, 2, 5, 16, 64])
    def test_matches_numpy(self, order):
        rule = gauss_legendre(order)
        nodes, weights = np.polynomial.legendre.leggauss(order)
        np.testing.assert_allclose(rule.nodes, nodes, atol=1e-14)
        np.testing.assert_allclose(rule.weights, weights, atol=1e-14)

    @pytest.mark.parametrize("order", [3, 8])
    def test_polynomial_exactness(self, order):
        rule = gauss_legendre(order)
        for k in range(2 * order):
            # ∫ x^k over [−1, 1] is 2/(k+1) for even k and 0 for odd k
            expected = 2.0 / (k + 1) if k % 2 == 0 else 0.0
            assert rule.integrate(lambda x: x**k) == pytest.approx(expected, abs=1e-14)

    def test_scaled_interval(self):
        # ∫_1^3 x² dx = 26/3
        assert gauss_legendre(4).integrate(lambda x: x * x, 1.0, 3.0) == pytest.approx(26.0 / 3.0)

    def test_rule_is_read_only(self):
        with pytest.raises(ValueError):
            gauss_legendre(4).nodes[0] = 0.0

    @pytest.mark.parametrize("order", [0, 513])
    def test_order_range(self, order):
        with pytest.raises(SpecialFunctionError):
            gauss_legendre(order)

    def test_composite_rule(self):
        x, w = composite_rule([0.0, 1.0, 1.0, 3.0], 3)
        # the empty panel [1, 1] is skipped; ∫_0^3 x² dx = 9
        assert len(x) == 6
        assert float(w @ x**2) == pytest.approx(9.0)

    def test_composite_rule_empty(self):
        x, w = composite_rule([1.0, 1.0], 3)
        assert x.size == 0 and w.size == 0

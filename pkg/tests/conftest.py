import numpy as np
import pytest

from metastab.core.config import get_settings
from metastab.domain.algebra.models import SymMatrix3
from metastab.domain.audit.models import MaterialSpec
from metastab.domain.geometry.surfaces import Implicit, Sphere


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch, tmp_path):
    """Each test sees settings built from its own environment, writing under tmp_path."""
    monkeypatch.setenv("METASTAB_OUTPUT_DIR", str(tmp_path / "runs"))
    monkeypatch.setenv("METASTAB_THREADS", "2")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture()
def unit_sphere():
    return Sphere()


@pytest.fixture()
def pm_identity():
    """ε⁺ = μ⁺ = I outside, ε⁻ = μ⁻ = −I inside: the critical contrast."""
    eye = SymMatrix3.identity()
    return MaterialSpec(eye, eye, -eye, -eye)


@pytest.fixture()
def ordered_contrast():
    """ε⁺ = μ⁺ = I, ε⁻ = μ⁻ = −2I: −ε⁻ dominates ε⁺ by I."""
    eye = SymMatrix3.identity()
    return MaterialSpec(eye, eye, SymMatrix3.scalar(-2.0), SymMatrix3.scalar(-2.0))


@pytest.fixture()
def run_dir(tmp_path):
    return tmp_path / "run"


@pytest.fixture()
def peanut():
    """Star-shaped surface r = 1 + 0.2(3cos²θ − 1); the meridian curvature is negative at the equator."""

    def phi(x):
        r = float(np.linalg.norm(x))
        c = x[2] / max(r, 1e-300)
        return r * r - (1.0 + 0.2 * (3.0 * c * c - 1.0)) ** 2

    return Implicit(phi, ((-2.0, -2.0, -2.0), (2.0, 2.0, 2.0)), name="peanut")

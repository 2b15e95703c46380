"""Test-field corpora for the anti-curl and trace checks."""

import numpy as np

from metastab.domain.estimates.models import BumpField, TestField


def constant_field() -> TestField:
    return TestField("constant_e3", lambda x: np.broadcast_to(np.array([0.0, 0.0, 1.0]), x.shape).copy())


def linear_field() -> TestField:
    return TestField("linear_x1_e3", lambda x: np.stack([np.zeros(len(x)), np.zeros(len(x)), x[:, 0]], axis=1))


def polynomial_curl_field() -> TestField:
    """∇ × (x₂²x₃, x₁x₃², x₁²x₂) = (x₁² − 2x₁x₃, x₂² − 2x₁x₂, x₃² − 2x₂x₃)."""

    def values(x):
        x1, x2, x3 = x[:, 0], x[:, 1], x[:, 2]
        return np.stack([x1 * x1 - 2 * x1 * x3, x2 * x2 - 2 * x1 * x2, x3 * x3 - 2 * x2 * x3], axis=1)

    return TestField("curl_cubic", values)


def rotational_field(k: float, axis=(0.0, 0.0, 1.0)) -> TestField:
    """f_k = e^{−k(1−|x|)}·(a × x); divergence-free, concentrating at |x| = 1 as k grows."""
    a = np.asarray(axis, dtype=float)

    def values(x):
        r = np.linalg.norm(x, axis=1)
        return np.exp(-k * (1.0 - r))[:, None] * np.cross(a, x)

    return TestField(f"rotational_k{k:g}", values, concentration=k)


def anticurl_corpus() -> list[TestField]:
    return [constant_field(), linear_field(), polynomial_curl_field()] + [rotational_field(k) for k in (1.0, 4.0, 16.0)]


def oscillatory_family(frequencies=(1, 2, 3, 4, 6, 8, 12, 16)) -> list[BumpField]:
    return [BumpField(f"oscillatory_k{k}", (0.0, 0.0, 0.0), 1.5, 1.0, float(k)) for k in frequencies]


def trace_corpus() -> list[BumpField]:
    """Twenty compactly supported bumps: twelve plain ones plus the oscillatory family."""
    plain = []
    centers = ((0.0, 0.0, 0.0), (0.5, -0.5, 0.0), (-1.0, 0.5, 0.2), (0.8, 0.8, -0.3))
    for i, center in enumerate(centers):
        for radius, amplitude in ((1.0, 1.0), (1.5, 2.0), (2.0, 0.5)):
            plain.append(BumpField(f"bump_{i}_r{radius:g}", center, radius, amplitude))
    return plain + oscillatory_family()

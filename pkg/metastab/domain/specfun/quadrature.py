"""Gauss–Legendre rules by Newton iteration on the three-term Legendre recurrence."""

from functools import lru_cache

import numpy as np

from metastab.core.errors import SpecialFunctionError
from metastab.domain.specfun.models import MAX_QUADRATURE_ORDER, QuadratureRule

NEWTON_TOL: float = 1e-15
NEWTON_MAX_ITER: int = 100


def _legendre(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P_n(x) and P_n′(x) by the recurrence (k+1)P_{k+1} = (2k+1)xP_k − kP_{k−1}."""
    p_prev, p = np.ones_like(x), x.copy()
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> QuadratureRule:
    if not 1 <= order <= MAX_QUADRATURE_ORDER:
        raise SpecialFunctionError(f"quadrature order must lie in [1, {MAX_QUADRATURE_ORDER}], got {order}")
    if order == 1:
        nodes, weights = np.array([0.0]), np.array([2.0])
    else:
        k = np.arange(order)
        x = np.cos(np.pi * (k + 0.75) / (order + 0.5))
        for _ in range(NEWTON_MAX_ITER):
            p, dp = _legendre(order, x)
            step = p / dp
            x = x - step
            if np.max(np.abs(step)) <= NEWTON_TOL:
                break
        _, dp = _legendre(order, x)
        order_idx = np.argsort(x)
        nodes = x[order_idx]
        weights = (2.0 / ((1.0 - x * x) * dp * dp))[order_idx]
        # enforce exact symmetry of the rule
        nodes = 0.5 * (nodes - nodes[::-1])
        weights = 0.5 * (weights + weights[::-1])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(order, nodes, weights)


def composite_rule(breaks, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Concatenated Gauss–Legendre panels over consecutive break points."""
    rule = gauss_legendre(order)
    xs, ws = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b > a:
            x, w = rule.scaled(float(a), float(b))
            xs.append(x)
            ws.append(w)
    if not xs:
        return np.empty(0), np.empty(0)
    return np.concatenate(xs), np.concatenate(ws)

"""Exact complementing-condition criterion and the independent half-space mode oracle."""

import logging
import math

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from metastab.core.errors import DegenerateInputError
from metastab.domain.algebra.engine import eig_sym2, tangent_frame
from metastab.domain.algebra.models import SymMatrix2, SymMatrix3, TangentFrame
from metastab.domain.complementing.models import (
    DET_TOL,
    ORACLE_TOL,
    TANGENT_TOL,
    AgreementSummary,
    CauchyPair,
    CauchyStatus,
    CauchyVerdict,
    ModeOracleResult,
    ModeScan,
)

logger = logging.getLogger(__name__)

SCAN_DIRECTIONS: int = 720
# grid gaps below this fraction of s1 + s2 get a local refinement
REFINE_GAP: float = 1e-3


def cauchy_form(a: SymMatrix3, e, xi) -> float:
    """q_A(e, ξ) = ⟨Ae,e⟩⟨Aξ,ξ⟩ − ⟨Ae,ξ⟩²."""
    m = a.to_array()
    e = np.asarray(e, dtype=float)
    xi = np.asarray(xi, dtype=float)
    ae = m @ e
    return float((ae @ e) * (xi @ m @ xi) - (ae @ xi) ** 2)


def restriction_matrix(a: SymMatrix3, frame: TangentFrame) -> SymMatrix2:
    """
    Matrix of ξ ↦ q_A(e, ξ) on e⊥ in the frame basis.

    M_A = ⟨Ae,e⟩·G − g gᵀ,  G_ij = ⟨A t_i, t_j⟩,  g_i = ⟨Ae, t_i⟩
    """
    m = a.to_array()
    ae = m @ frame.e
    aee = float(ae @ frame.e)
    t = np.column_stack([frame.t1, frame.t2])
    g = t.T @ ae
    gram = t.T @ m @ t
    return SymMatrix2.from_array(aee * gram - np.outer(g, g))


def _witness(q: SymMatrix2, frame: TangentFrame) -> np.ndarray:
    eig = eig_sym2(q)
    lam1, lam2 = eig.lam1, eig.lam2
    if lam1 == 0.0 and lam2 == 0.0:
        return frame.t1.copy()
    if lam1 >= 0.0 >= lam2:
        w = math.sqrt(lam1) * eig.v2 + math.sqrt(-lam2) * eig.v1
    else:
        # near-degenerate definite Q: the eigen-direction closest to null
        w = eig.v2 if abs(lam2) < abs(lam1) else eig.v1
    w = w / np.linalg.norm(w)
    return frame.lift(w[0], w[1])


def check_complementing(pair: CauchyPair, frame: TangentFrame | None = None) -> CauchyVerdict:
    """
    Decide q_{A2}(e,ξ) ≠ q_{A1}(e,ξ) for every nonzero tangent ξ.

    Q = M_{A2} − M_{A1} is definite iff det Q > 0; tiny positive determinants count as Violated.
    """
    frame = frame or tangent_frame(pair.e)
    m1 = restriction_matrix(pair.a1, frame)
    m2 = restriction_matrix(pair.a2, frame)
    q = m2 - m1
    scale = m1.norm() + m2.norm()
    det_q = q.det()
    margin = det_q / scale**2
    if det_q > DET_TOL * scale**2:
        return CauchyVerdict(CauchyStatus.SATISFIED, margin, det_q, scale)
    return CauchyVerdict(CauchyStatus.VIOLATED, margin, det_q, scale, _witness(q, frame))


def mode_oracle(pair: CauchyPair, xi, tol: float = ORACLE_TOL) -> ModeOracleResult:
    """
    Bounded half-space modes e^{i⟨y,ξ⟩} v_j(t) of div(A_j ∇u_j) = 0.

    a v″ + 2ib v′ − c v = 0 has the decaying root λ = (−ib − s)/a with s = √(ac − b²);
    the two sides glue into a nontrivial solution iff s1 = s2.
    """
    xi = np.asarray(xi, dtype=float)
    if abs(float(xi @ pair.e)) > TANGENT_TOL or abs(float(np.linalg.norm(xi)) - 1.0) > TANGENT_TOL:
        raise DegenerateInputError(f"xi = {xi.tolist()} is not a unit tangent to e")

    roots = []
    rates = []
    for a_mat in (pair.a1, pair.a2):
        m = a_mat.to_array()
        a = float(pair.e @ m @ pair.e)
        b = float(pair.e @ m @ xi)
        c = float(xi @ m @ xi)
        disc = a * c - b * b
        if disc <= 0.0:
            raise DegenerateInputError(f"non-elliptic pair: ac - b^2 = {disc:.3e}")
        s = math.sqrt(disc)
        roots.append(s)
        rates.append(complex(-s, -b) / a)
    s1, s2 = roots
    return ModeOracleResult(abs(s1 - s2) <= tol * (s1 + s2), (rates[0], rates[1]), s1, s2)


class _GapFunction:
    """θ ↦ s1(θ) − s2(θ) for ξ(θ) = cos θ t1 + sin θ t2, from plain coefficients."""

    def __init__(self, pair: CauchyPair, frame: TangentFrame) -> None:
        self._frame = frame
        self._coeffs = []
        for a_mat in (pair.a1, pair.a2):
            m = a_mat.to_array()
            me = m @ frame.e
            self._coeffs.append(
                (
                    float(frame.e @ me),
                    float(frame.t1 @ me),
                    float(frame.t2 @ me),
                    float(frame.t1 @ m @ frame.t1),
                    float(frame.t1 @ m @ frame.t2),
                    float(frame.t2 @ m @ frame.t2),
                )
            )

    def _s(self, coeff, c, s):
        a, b1, b2, g11, g12, g22 = coeff
        b = c * b1 + s * b2
        cc = c * c * g11 + 2.0 * c * s * g12 + s * s * g22
        return np.sqrt(np.maximum(a * cc - b * b, 0.0))

    def grid(self, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        c, s = np.cos(theta), np.sin(theta)
        s1 = self._s(self._coeffs[0], c, s)
        s2 = self._s(self._coeffs[1], c, s)
        return s1 - s2, s1 + s2

    def __call__(self, theta: float) -> float:
        c, s = math.cos(theta), math.sin(theta)
        return float(self._s(self._coeffs[0], c, s) - self._s(self._coeffs[1], c, s))

    def xi(self, theta: float) -> np.ndarray:
        return self._frame.lift(math.cos(theta), math.sin(theta))


def tangent_scan(pair: CauchyPair, n_directions: int = SCAN_DIRECTIONS, tol: float = ORACLE_TOL) -> ModeScan:
    """
    Search the tangent circle for a bounded mode using only mode_oracle semantics.

    Sign changes of s1 − s2 between grid directions are bracketed with brentq; otherwise the
    smallest grid gap is refined locally. Candidates are confirmed by mode_oracle.
    """
    frame = tangent_frame(pair.e)
    gap = _GapFunction(pair, frame)
    step = math.pi / n_directions
    theta = np.arange(n_directions) * step
    f, total = gap.grid(theta)

    def confirm(th: float) -> ModeScan:
        xi = gap.xi(th)
        result = mode_oracle(pair, xi, tol)
        return ModeScan(result.mode_exists, n_directions, xi, abs(result.s1 - result.s2) / (result.s1 + result.s2))

    hit = np.flatnonzero(np.abs(f) <= tol * total)
    if hit.size:
        return confirm(float(theta[hit[0]]))

    # f has period π, so the last cell wraps to θ = π
    f_next = np.append(f[1:], f[0])
    change = np.flatnonzero(np.sign(f) != np.sign(f_next))
    if change.size:
        k = int(change[0])
        root = brentq(gap, theta[k], theta[k] + step, xtol=1e-15, rtol=4.5e-16)
        return confirm(root)

    rel = np.abs(f) / total
    k = int(np.argmin(rel))
    if rel[k] > REFINE_GAP:
        return ModeScan(False, n_directions, gap.xi(float(theta[k])), float(rel[k]))

    sign = math.copysign(1.0, f[k])
    lo, hi = theta[k] - step, theta[k] + step
    res = minimize_scalar(lambda th: sign * gap(th), bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    if sign * gap(res.x) < 0.0:
        a, b = sorted((float(theta[k]), float(res.x)))
        root = brentq(gap, a, b, xtol=1e-15, rtol=4.5e-16)
        return confirm(root)
    return confirm(float(res.x))


def random_spd(rng: np.random.Generator, low: float = 0.1, high: float = 10.0) -> SymMatrix3:
    """Random symmetric positive definite matrix with log-uniform spectrum in [low, high]."""
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    lam = np.exp(rng.uniform(math.log(low), math.log(high), size=3))
    return SymMatrix3.from_array(q @ np.diag(lam) @ q.T)


def random_unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def run_agreement(n_trials: int, seed: int, n_directions: int = SCAN_DIRECTIONS) -> AgreementSummary:
    """Compare check_complementing with tangent_scan on seeded random triples."""
    rng = np.random.default_rng(seed)
    summary = AgreementSummary(trials=n_trials)
    for i in range(n_trials):
        pair = CauchyPair(random_spd(rng), random_spd(rng), random_unit(rng))
        verdict = check_complementing(pair)
        scan = tangent_scan(pair, n_directions)
        violated = verdict.status == CauchyStatus.VIOLATED
        summary.violated += violated
        if violated == scan.mode_found:
            summary.agreements += 1
        else:
            summary.disagreements.append(i)
            logger.warning("trial %d: criterion %s, scan gap %.3e", i, verdict.status.value, scan.best_gap)
    return summary

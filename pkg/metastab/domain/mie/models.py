from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from metastab.core.errors import DegenerateInputError


class Polarization(str, enum.Enum):
    TE = "TE"
    TM = "TM"


class RadialRegion(str, enum.Enum):
    INTERIOR = "interior"  # r < R
    MIDDLE = "middle"  # R < r < R_s
    EXTERIOR = "exterior"  # r > R_s


# Resonance threshold on the normalized denominator at δ = 0
RESONANCE_TOL: float = 1e-13
DEFAULT_COLLAR: float = 0.1
LAP_TOLERANCE: float = 0.01
RESONANCE_GROWTH: float = 10.0
RESONANCE_WINDOW: tuple[float, float] = (1e-6, 1e-2)


@dataclass(frozen=True)
class PlaneWave:
    direction: tuple[float, float, float] = (0.0, 0.0, 1.0)
    polarization: tuple[float, float, float] = (1.0, 0.0, 0.0)
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        d = np.asarray(self.direction, dtype=float)
        p = np.asarray(self.polarization, dtype=float)
        if np.linalg.norm(d) == 0.0 or np.linalg.norm(p) == 0.0:
            raise DegenerateInputError("plane-wave direction and polarization must be nonzero")
        d, p = d / np.linalg.norm(d), p / np.linalg.norm(p)
        if abs(float(d @ p)) > 1e-10:
            raise DegenerateInputError("plane-wave polarization must be orthogonal to its direction")
        object.__setattr__(self, "direction", tuple(float(v) for v in d))
        object.__setattr__(self, "polarization", tuple(float(v) for v in p))

    def frame(self) -> np.ndarray:
        """Rows (x′, y′, z′) of the local frame: polarization, direction × polarization, direction."""
        p = np.asarray(self.polarization)
        d = np.asarray(self.direction)
        return np.array([p, np.cross(d, p), d])


@dataclass(frozen=True)
class ShellCurrent:
    """Surface current K = amplitude·Ĉ_n^m (TE) or amplitude·B̂_n^m (TM) on r = radius."""

    radius: float
    n: int = 1
    m: int = 0
    polarization: Polarization = Polarization.TE
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 1 or abs(self.m) > self.n:
            raise DegenerateInputError(f"invalid mode (n, m) = ({self.n}, {self.m})")
        object.__setattr__(self, "polarization", Polarization(self.polarization))


@dataclass(frozen=True)
class LayeredSphereProblem:
    omega: float = 1.0
    radius: float = 1.0
    eps_minus: complex = -2.0
    mu_minus: complex = -2.0
    delta: float = 0.0
    source: PlaneWave | ShellCurrent = field(default_factory=lambda: ShellCurrent(radius=1.5))
    collar_width: float = DEFAULT_COLLAR

    def __post_init__(self) -> None:
        if self.omega <= 0.0 or self.radius <= 0.0:
            raise DegenerateInputError("omega and radius must be positive")
        if self.delta < 0.0:
            raise DegenerateInputError(f"loss delta must be non-negative, got {self.delta}")
        if isinstance(self.source, ShellCurrent) and self.source.radius <= self.radius:
            raise DegenerateInputError(f"source radius {self.source.radius} must exceed the sphere radius {self.radius}")
        if not 0.0 < self.collar_width < self.radius:
            raise DegenerateInputError(f"collar width must lie in (0, R), got {self.collar_width}")

    @property
    def eps_c(self) -> complex:
        return complex(self.eps_minus) + 1j * self.delta

    @property
    def mu_c(self) -> complex:
        return complex(self.mu_minus) + 1j * self.delta

    @property
    def k0(self) -> float:
        return self.omega

    def k_c(self, branch: int = 1) -> complex:
        """ω√(ε_c μ_c), principal root flipped to Im ≥ 0."""
        k = self.omega * cmath.sqrt(self.eps_c * self.mu_c)
        if k.imag < 0.0:
            k = -k
        return branch * k

    @property
    def source_radius(self) -> float | None:
        return self.source.radius if isinstance(self.source, ShellCurrent) else None

    @property
    def sign_changing(self) -> bool:
        return self.eps_c.real < 0.0 or self.mu_c.real < 0.0

    @property
    def no_contrast(self) -> bool:
        return self.eps_c == 1.0 and self.mu_c == 1.0

    @property
    def source_norm(self) -> float:
        """‖J‖: surface L² norm amplitude·R_s of a current sheet, the amplitude of a plane wave."""
        if isinstance(self.source, ShellCurrent):
            return abs(self.source.amplitude) * self.source.radius
        return abs(self.source.amplitude)

    def region(self, r: float) -> RadialRegion:
        if r < self.radius:
            return RadialRegion.INTERIOR
        r_s = self.source_radius
        if r_s is None or r < r_s:
            return RadialRegion.MIDDLE
        return RadialRegion.EXTERIOR

    def with_delta(self, delta: float) -> LayeredSphereProblem:
        return replace(self, delta=delta)


@dataclass(frozen=True)
class ModeSolution:
    """
    Radial coefficients of one (n, m, polarization) mode.

    The field in each region is α·F[j_n] + β·F[h¹_n] with (α, β) from coefficients().
    """

    n: int
    m: int
    polarization: Polarization
    k_c: complex
    interior: complex  # a
    inner_regular: complex  # b0
    outgoing: complex  # c
    outer_regular: complex
    outer_outgoing: complex
    denominator: complex
    normalized_denominator: float
    source_radius: float | None = None

    def coefficients(self, region: RadialRegion) -> tuple[complex, complex]:
        if region == RadialRegion.INTERIOR:
            return self.interior, 0.0j
        if region == RadialRegion.MIDDLE:
            return self.inner_regular, self.outgoing
        return self.outer_regular, self.outer_outgoing

    @property
    def scale(self) -> float:
        return max(abs(self.interior), abs(self.inner_regular), abs(self.outgoing), abs(self.outer_outgoing), 1e-300)


@dataclass
class SweepRow:
    delta: float
    norm_exterior_annulus: float
    norm_interior: float
    norm_collar: float
    energy_residual: float
    silver_muller_residual: float
    min_mode_denominator: float
    n_modes_used: int
    truncation_warning: bool
    stability_envelope: float


SWEEP_COLUMNS: tuple[str, ...] = (
    "delta",
    "norm_exterior_annulus",
    "norm_interior",
    "norm_collar",
    "energy_residual",
    "silver_muller_residual",
    "min_mode_denominator",
    "n_modes_used",
    "truncation_warning",
    "stability_envelope",
)


@dataclass
class SweepReport:
    rows: list[SweepRow]
    lap_convergent: bool
    resonant: bool
    blowup_exponent: float | None
    envelope_max: float
    source_norm: float
    parameters: dict[str, float | str] = field(default_factory=dict)

    @property
    def deltas(self) -> list[float]:
        return [row.delta for row in self.rows]


def modal_gain(n: int) -> float:
    return math.sqrt(n * (n + 1))

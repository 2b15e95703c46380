from __future__ import annotations

import enum
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from metastab.core.errors import MaterialError
from metastab.domain.algebra.models import SymMatrix3


class Verdict(str, enum.Enum):
    APPLIES = "Applies"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"


class Theorem(str, enum.Enum):
    THM1 = "thm1"
    COR_ADN = "corADN"
    THM2 = "thm2"
    COR_ISOTROPIC3 = "corisotropic3"


DEFAULT_COMPONENT: str = "gamma"


class MaterialField(ABC):
    """Symmetric-matrix-valued coefficient field with optional region labels."""

    @abstractmethod
    def __call__(self, x: np.ndarray) -> SymMatrix3: ...

    def label(self, x: np.ndarray) -> str:
        return ""

    @property
    def is_constant(self) -> bool:
        return False


@dataclass(frozen=True)
class ConstantMaterial(MaterialField):
    value: SymMatrix3

    def __call__(self, x):
        return self.value

    @property
    def is_constant(self) -> bool:
        return True


@dataclass(frozen=True)
class LabeledRegion:
    """Half-space {x : normal·x ≥ offset} carrying a constant tensor."""

    label: str
    normal: tuple[float, float, float]
    offset: float
    value: SymMatrix3

    def contains(self, x: np.ndarray) -> bool:
        return float(np.dot(self.normal, x)) >= self.offset


@dataclass(frozen=True)
class PiecewiseMaterial(MaterialField):
    regions: tuple[LabeledRegion, ...]
    default: SymMatrix3
    default_label: str = "rest"

    def _region(self, x) -> LabeledRegion | None:
        return next((r for r in self.regions if r.contains(np.asarray(x))), None)

    def __call__(self, x):
        region = self._region(x)
        return self.default if region is None else region.value

    def label(self, x):
        region = self._region(x)
        return self.default_label if region is None else region.label


class GridMaterial(MaterialField):
    """Trilinear interpolation of a sampled tensor grid, values shaped (nx, ny, nz, 3, 3)."""

    def __init__(self, axes: tuple[np.ndarray, np.ndarray, np.ndarray], values: np.ndarray) -> None:
        values = np.asarray(values, dtype=float)
        if values.shape[-2:] != (3, 3):
            raise MaterialError(f"grid values must end in (3, 3), got {values.shape}")
        self._interp = RegularGridInterpolator(tuple(np.asarray(a, dtype=float) for a in axes), values.reshape(*values.shape[:3], 9))

    def __call__(self, x):
        try:
            flat = self._interp(np.asarray(x, dtype=float)[None, :])[0]
        except ValueError as exc:
            raise MaterialError(f"point {np.asarray(x).tolist()} is outside the material grid") from exc
        m = flat.reshape(3, 3)
        return SymMatrix3.from_array(0.5 * (m + m.T))


def as_material(value: SymMatrix3 | MaterialField) -> MaterialField:
    return ConstantMaterial(value) if isinstance(value, SymMatrix3) else value


@dataclass(frozen=True)
class MaterialSpec:
    eps_plus: MaterialField
    mu_plus: MaterialField
    eps_minus: MaterialField
    mu_minus: MaterialField
    delta: float = 0.0

    def __post_init__(self) -> None:
        for name in ("eps_plus", "mu_plus", "eps_minus", "mu_minus"):
            object.__setattr__(self, name, as_material(getattr(self, name)))
        if self.delta < 0.0:
            raise MaterialError(f"loss delta must be non-negative, got {self.delta}")

    def fields(self) -> dict[str, MaterialField]:
        return {"eps_plus": self.eps_plus, "mu_plus": self.mu_plus, "eps_minus": self.eps_minus, "mu_minus": self.mu_minus}

    def component(self, x: np.ndarray) -> str:
        labels = sorted({f.label(x) for f in self.fields().values()} - {""})
        return "/".join(labels) if labels else DEFAULT_COMPONENT


@dataclass
class SampleRecord:
    index: int
    location: tuple[float, float, float]
    component: str
    eps_margin: float
    mu_margin: float


@dataclass
class ComponentResult:
    label: str
    n_samples: int
    c_eps: float
    c_mu: float
    eps_orientation: str = ""
    mu_orientation: str = ""
    fitted_alpha_eps: float | None = None
    fitted_alpha_mu: float | None = None

    @property
    def certified(self) -> bool:
        return self.c_eps > 0.0 and self.c_mu > 0.0


@dataclass
class BetaRow:
    beta: float
    curvature_sign: int
    gamma_eps: float
    gamma_mu: float
    certified: bool

    @property
    def gamma(self) -> float:
        return min(self.gamma_eps, self.gamma_mu)


@dataclass
class AuditReport:
    theorem: Theorem
    verdict: Verdict
    n_samples: int
    min_margin: float
    worst_point: tuple[float, float, float] | None = None
    witness: tuple[float, float, float] | None = None
    records: list[SampleRecord] = field(default_factory=list)
    components: list[ComponentResult] = field(default_factory=list)
    beta_table: list[BetaRow] = field(default_factory=list)
    best_beta: float | None = None
    best_gamma: float | None = None
    assumptions: dict[str, bool] = field(default_factory=dict)
    obligations: list[str] = field(default_factory=list)
    parameters: dict[str, float] = field(default_factory=dict)

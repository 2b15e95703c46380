from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from metastab.core.errors import DegenerateInputError
from metastab.domain.algebra.engine import eig_sym3
from metastab.domain.algebra.models import SymMatrix3


class CauchyStatus(str, enum.Enum):
    SATISFIED = "Satisfied"
    VIOLATED = "Violated"


# Satisfied iff det Q > DET_TOL · scale²
DET_TOL: float = 1e-12
ORACLE_TOL: float = 1e-9
TANGENT_TOL: float = 1e-10


@dataclass(frozen=True)
class CauchyPair:
    a1: SymMatrix3
    a2: SymMatrix3
    e: np.ndarray

    def __post_init__(self) -> None:
        e = np.asarray(self.e, dtype=float)
        n = float(np.linalg.norm(e))
        if n < 1e-300:
            raise DegenerateInputError("direction e must be nonzero")
        object.__setattr__(self, "e", e / n)
        for name, a in (("A1", self.a1), ("A2", self.a2)):
            lam_min = eig_sym3(a).values[2]
            if lam_min <= 0.0:
                raise DegenerateInputError(f"{name} is not positive definite (lambda_min = {lam_min:.3e})")


@dataclass(frozen=True)
class CauchyVerdict:
    status: CauchyStatus
    margin: float
    det_q: float
    scale: float
    witness: np.ndarray | None = None

    @property
    def satisfied(self) -> bool:
        return self.status == CauchyStatus.SATISFIED


@dataclass(frozen=True)
class ModeOracleResult:
    mode_exists: bool
    decay_rates: tuple[complex, complex]
    s1: float
    s2: float


@dataclass(frozen=True)
class ModeScan:
    mode_found: bool
    directions: int
    best_xi: np.ndarray
    best_gap: float


@dataclass
class AgreementSummary:
    trials: int
    agreements: int = 0
    violated: int = 0
    disagreements: list[int] = field(default_factory=list)

    @property
    def rate(self) -> float:
        return self.agreements / self.trials if self.trials else 1.0

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SymMatrix3:
    """Symmetric 3x3 matrix stored as its upper triangle."""

    xx: float
    xy: float
    xz: float
    yy: float
    yz: float
    zz: float
    elliptic: bool = False

    def __post_init__(self) -> None:
        if self.elliptic:
            lam_min = float(np.linalg.eigvalsh(self.to_array())[0])
            if not lam_min > 0.0:
                raise ValueError(f"matrix flagged elliptic is not positive definite (lambda_min = {lam_min:.3e})")

    @classmethod
    def from_array(cls, a, *, tol: float = 1e-12, elliptic: bool = False) -> SymMatrix3:
        a = np.asarray(a, dtype=float)
        if a.shape != (3, 3):
            raise ValueError(f"expected a 3x3 array, got shape {a.shape}")
        scale = max(1.0, float(np.max(np.abs(a))))
        if np.max(np.abs(a - a.T)) > tol * scale:
            raise ValueError("matrix is not symmetric")
        s = 0.5 * (a + a.T)
        return cls(s[0, 0], s[0, 1], s[0, 2], s[1, 1], s[1, 2], s[2, 2], elliptic)

    @classmethod
    def scalar(cls, c: float) -> SymMatrix3:
        return cls(c, 0.0, 0.0, c, 0.0, c)

    @classmethod
    def identity(cls) -> SymMatrix3:
        return cls.scalar(1.0)

    @classmethod
    def diag(cls, a: float, b: float, c: float) -> SymMatrix3:
        return cls(a, 0.0, 0.0, b, 0.0, c)

    def to_array(self) -> np.ndarray:
        return np.array(
            [
                [self.xx, self.xy, self.xz],
                [self.xy, self.yy, self.yz],
                [self.xz, self.yz, self.zz],
            ]
        )

    def apply(self, v) -> np.ndarray:
        return self.to_array() @ np.asarray(v)

    def quad(self, u, v=None):
        """Bilinear form u^T M v (v defaults to u)."""
        u = np.asarray(u)
        v = u if v is None else np.asarray(v)
        return u @ self.to_array() @ v

    def trace(self) -> float:
        return self.xx + self.yy + self.zz

    def norm(self) -> float:
        return float(np.linalg.norm(self.to_array()))

    def is_isotropic(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, abs(self.xx))
        off = max(abs(self.xy), abs(self.xz), abs(self.yz))
        spread = max(abs(self.yy - self.xx), abs(self.zz - self.xx))
        return off <= tol * scale and spread <= tol * scale

    def __add__(self, other: SymMatrix3) -> SymMatrix3:
        return SymMatrix3.from_array(self.to_array() + other.to_array())

    def __sub__(self, other: SymMatrix3) -> SymMatrix3:
        return SymMatrix3.from_array(self.to_array() - other.to_array())

    def __neg__(self) -> SymMatrix3:
        return SymMatrix3(-self.xx, -self.xy, -self.xz, -self.yy, -self.yz, -self.zz)

    def __mul__(self, c: float) -> SymMatrix3:
        return SymMatrix3(c * self.xx, c * self.xy, c * self.xz, c * self.yy, c * self.yz, c * self.zz)

    __rmul__ = __mul__


@dataclass(frozen=True)
class SymMatrix2:
    a: float
    b: float
    c: float

    @classmethod
    def from_array(cls, m) -> SymMatrix2:
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], 0.5 * (m[0, 1] + m[1, 0]), m[1, 1])

    def to_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.b, self.c]])

    def det(self) -> float:
        return self.a * self.c - self.b * self.b

    def trace(self) -> float:
        return self.a + self.c

    def norm(self) -> float:
        return float(np.sqrt(self.a**2 + 2.0 * self.b**2 + self.c**2))

    def __sub__(self, other: SymMatrix2) -> SymMatrix2:
        return SymMatrix2(self.a - other.a, self.b - other.b, self.c - other.c)


@dataclass(frozen=True)
class TangentFrame:
    e: np.ndarray
    t1: np.ndarray
    t2: np.ndarray

    def lift(self, u: float, v: float) -> np.ndarray:
        return u * self.t1 + v * self.t2

    def rotated(self, angle: float) -> TangentFrame:
        c, s = np.cos(angle), np.sin(angle)
        return TangentFrame(self.e, c * self.t1 + s * self.t2, -s * self.t1 + c * self.t2)


@dataclass(frozen=True)
class Eigen2:
    lam1: float
    lam2: float
    v1: np.ndarray
    v2: np.ndarray


@dataclass(frozen=True)
class Eigen3:
    values: tuple[float, float, float]
    vectors: np.ndarray  # columns, matching values (descending)

"""
Run configurations for every subcommand, validated before any computation.

Tensors accept a scalar shorthand: 2 or "2" is 2I, "I", "-I", "2.5I", "diag(4, 0.25, 1)",
nine comma-separated row-major entries, or a 3x3 nested list.
"""

import re
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import AfterValidator, BaseModel, ConfigDict, Field, TypeAdapter

from metastab.domain.algebra.models import SymMatrix3
from metastab.domain.audit.models import LabeledRegion, MaterialSpec, PiecewiseMaterial, Theorem
from metastab.domain.estimates.models import DEFAULT_ALPHAS, DEFAULT_CONCENTRATIONS
from metastab.domain.geometry.surfaces import Ellipsoid, Implicit, Sphere, Surface
from metastab.domain.mie.models import LayeredSphereProblem, PlaneWave, Polarization, ShellCurrent

SCHEMA_VERSION: int = 1

_MULTIPLE_OF_I = re.compile(r"^(?P<coef>[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)?(?P<sign>[+-])?I$")
_DIAG = re.compile(r"^diag\((?P<body>[^)]*)\)$")


def parse_tensor(value: Union[float, str, list]) -> SymMatrix3:
    if isinstance(value, (int, float)):
        return SymMatrix3.scalar(float(value))
    if isinstance(value, list):
        return SymMatrix3.from_array(value)

    text = value.replace(" ", "")
    match = _MULTIPLE_OF_I.match(text)
    if match:
        if match["sign"] and match["coef"]:
            raise ValueError(f"cannot parse tensor {value!r}")
        if match["coef"]:
            return SymMatrix3.scalar(float(match["coef"]))
        return SymMatrix3.scalar(-1.0 if match["sign"] == "-" else 1.0)
    match = _DIAG.match(text)
    if match:
        entries = parse_vector(match["body"])
        return SymMatrix3.diag(*entries)
    parts = [p for p in re.split(r"[,;]", text) if p]
    if len(parts) == 1:
        return SymMatrix3.scalar(float(parts[0]))
    if len(parts) == 9:
        return SymMatrix3.from_array([[float(v) for v in parts[3 * i : 3 * i + 3]] for i in range(3)])
    raise ValueError(f"cannot parse tensor {value!r}")


def parse_vector(value: str) -> tuple[float, float, float]:
    parts = [p for p in value.replace(" ", "").split(",") if p]
    if len(parts) != 3:
        raise ValueError(f"expected three comma-separated numbers, got {value!r}")
    return tuple(float(p) for p in parts)


def _validate_tensor(value):
    parse_tensor(value)
    return value


TensorInput = Annotated[Union[float, str, list[list[float]]], AfterValidator(_validate_tensor)]
Vector3 = tuple[float, float, float]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ── surfaces and materials ────────────────────────────────────────────────


class SphereConfig(_Strict):
    kind: Literal["sphere"] = "sphere"
    center: Vector3 = (0.0, 0.0, 0.0)
    radius: float = Field(default=1.0, gt=0)

    def build(self) -> Surface:
        return Sphere(self.center, self.radius)


class EllipsoidConfig(_Strict):
    kind: Literal["ellipsoid"]
    center: Vector3 = (0.0, 0.0, 0.0)
    semi_axes: Vector3

    def build(self) -> Surface:
        return Ellipsoid(self.center, self.semi_axes)


class AxisymmetricConfig(_Strict):
    """Star-shaped surface r(θ) = radius·(1 + p2·(3cos²θ − 1)) about center, θ measured from the z axis."""

    kind: Literal["axisymmetric"]
    center: Vector3 = (0.0, 0.0, 0.0)
    radius: float = Field(default=1.0, gt=0)
    # r(θ) > 0 needs −1/2 < p2 < 1
    p2: float = Field(default=0.0, gt=-0.5, lt=1.0)

    def build(self) -> Surface:
        center = np.asarray(self.center, dtype=float)
        radius, p2 = self.radius, self.p2

        def phi(x: np.ndarray) -> float:
            y = np.asarray(x, dtype=float) - center
            r = float(np.linalg.norm(y))
            c = y[2] / max(r, 1e-300)
            return r * r - (radius * (1.0 + p2 * (3.0 * c * c - 1.0))) ** 2

        half = 1.5 * radius * max(1.0 + 2.0 * p2, 1.0 - p2)
        bbox = (tuple(center - half), tuple(center + half))
        return Implicit(phi, bbox, name=f"axisymmetric(p2={p2:g})")


SurfaceConfig = Annotated[Union[SphereConfig, EllipsoidConfig, AxisymmetricConfig], Field(discriminator="kind")]

_MATERIAL_NAMES = ("eps_plus", "mu_plus", "eps_minus", "mu_minus")


class RegionConfig(_Strict):
    """Half-space {normal·x ≥ offset} overriding the default tensors."""

    label: str
    normal: Vector3
    offset: float = 0.0
    eps_plus: TensorInput
    mu_plus: TensorInput
    eps_minus: TensorInput
    mu_minus: TensorInput


class MaterialConfig(_Strict):
    eps_plus: TensorInput = "I"
    mu_plus: TensorInput = "I"
    eps_minus: TensorInput = "-2I"
    mu_minus: TensorInput = "-2I"
    delta: float = Field(default=0.0, ge=0)
    regions: list[RegionConfig] = []

    def build(self) -> MaterialSpec:
        fields = {}
        for name in _MATERIAL_NAMES:
            default = parse_tensor(getattr(self, name))
            if not self.regions:
                fields[name] = default
                continue
            regions = tuple(LabeledRegion(r.label, r.normal, r.offset, parse_tensor(getattr(r, name))) for r in self.regions)
            fields[name] = PiecewiseMaterial(regions, default)
        return MaterialSpec(delta=self.delta, **fields)


# ── Mie sources ───────────────────────────────────────────────────────────


class ShellSourceConfig(_Strict):
    kind: Literal["shell"] = "shell"
    radius: float = Field(default=1.5, gt=0)
    n: int = Field(default=1, ge=1)
    m: int = 0
    polarization: Polarization = Polarization.TE
    amplitude: float = 1.0

    def build(self) -> ShellCurrent:
        return ShellCurrent(self.radius, self.n, self.m, self.polarization, self.amplitude)


class PlaneWaveSourceConfig(_Strict):
    kind: Literal["plane_wave"]
    direction: Vector3 = (0.0, 0.0, 1.0)
    polarization: Vector3 = (1.0, 0.0, 0.0)
    amplitude: float = 1.0

    def build(self) -> PlaneWave:
        return PlaneWave(self.direction, self.polarization, self.amplitude)


SourceConfig = Annotated[Union[ShellSourceConfig, PlaneWaveSourceConfig], Field(discriminator="kind")]


# ── subcommands ───────────────────────────────────────────────────────────


class _RunBase(_Strict):
    schema_version: Literal[1] = SCHEMA_VERSION
    seed: int = 0


class CheckComplementingConfig(_RunBase):
    command: Literal["check-complementing"] = "check-complementing"
    a1: TensorInput = "I"
    a2: TensorInput = "2I"
    e: Vector3 = (0.0, 0.0, 1.0)
    random: Optional[int] = Field(default=None, ge=1)
    directions: int = Field(default=720, ge=8)


class AuditConfig(_RunBase):
    command: Literal["audit"] = "audit"
    theorem: Theorem = Theorem.THM1
    materials: MaterialConfig = MaterialConfig()
    surface: SurfaceConfig = SphereConfig()
    n_samples: Optional[int] = Field(default=None, ge=1)
    n_depth: int = Field(default=4, ge=1)
    reflection: Literal["normal", "convex"] = "normal"
    alpha1: float = Field(default=0.0, ge=0)
    alpha2: float = Field(default=0.0, ge=0)
    beta: float = Field(default=-0.5, gt=-1, lt=0)
    curvature_sign: Literal[1, -1] = 1
    tau: float = Field(default=0.1, gt=0)
    betas: Optional[list[float]] = None
    taus: Optional[list[float]] = None
    assumptions: dict[str, bool] = {}


class MieSweepConfig(_RunBase):
    command: Literal["mie-sweep"] = "mie-sweep"
    omega: float = Field(default=1.0, gt=0)
    radius: float = Field(default=1.0, gt=0)
    eps_minus: float = -2.0
    mu_minus: float = -2.0
    collar_width: float = Field(default=0.1, gt=0)
    source: SourceConfig = ShellSourceConfig()
    deltas: list[float] = Field(default=[1e-2, 1e-3, 1e-4, 1e-5, 1e-6], min_length=1)

    def build_problem(self) -> LayeredSphereProblem:
        return LayeredSphereProblem(
            omega=self.omega,
            radius=self.radius,
            eps_minus=self.eps_minus,
            mu_minus=self.mu_minus,
            delta=self.deltas[0],
            source=self.source.build(),
            collar_width=self.collar_width,
        )


class EstimatesConfig(_RunBase):
    command: Literal["estimates"] = "estimates"
    alphas: list[float] = list(DEFAULT_ALPHAS)
    concentrations: list[float] = list(DEFAULT_CONCENTRATIONS)
    resolutions: list[int] = [32, 64]
    curl_points: int = Field(default=8, ge=1)
    anticurl: bool = True
    trace: bool = True


RunConfig = Annotated[
    Union[CheckComplementingConfig, AuditConfig, MieSweepConfig, EstimatesConfig],
    Field(discriminator="command"),
]
RUN_CONFIG_ADAPTER: TypeAdapter = TypeAdapter(RunConfig)


def validate_run_config(data: dict) -> Union[CheckComplementingConfig, AuditConfig, MieSweepConfig, EstimatesConfig]:
    return RUN_CONFIG_ADAPTER.validate_python(data)


def is_yaml(path: Path) -> bool:
    return path.suffix.lower() in (".yaml", ".yml")

from typing import Optional

from pydantic import BaseModel

from metastab.domain.audit.models import Theorem, Verdict


class SampleRecordRead(BaseModel):
    index: int
    location: tuple[float, float, float]
    component: str
    eps_margin: float
    mu_margin: float

    model_config = {"from_attributes": True}


class ComponentResultRead(BaseModel):
    label: str
    n_samples: int
    c_eps: float
    c_mu: float
    eps_orientation: str = ""
    mu_orientation: str = ""
    fitted_alpha_eps: Optional[float] = None
    fitted_alpha_mu: Optional[float] = None
    certified: bool

    model_config = {"from_attributes": True}


class BetaRowRead(BaseModel):
    beta: float
    curvature_sign: int
    gamma_eps: float
    gamma_mu: float
    certified: bool

    model_config = {"from_attributes": True}


class AuditReportRead(BaseModel):
    theorem: Theorem
    verdict: Verdict
    n_samples: int
    min_margin: float
    worst_point: Optional[tuple[float, float, float]] = None
    witness: Optional[tuple[float, float, float]] = None
    records: list[SampleRecordRead] = []
    components: list[ComponentResultRead] = []
    beta_table: list[BetaRowRead] = []
    best_beta: Optional[float] = None
    best_gamma: Optional[float] = None
    assumptions: dict[str, bool] = {}
    obligations: list[str] = []
    parameters: dict[str, float] = {}

    model_config = {"from_attributes": True}

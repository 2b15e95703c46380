from typing import Optional

from pydantic import BaseModel

from metastab.core.schemas import FloatList
from metastab.domain.complementing.models import CauchyStatus


class CauchyVerdictRead(BaseModel):
    status: CauchyStatus
    margin: float
    det_q: float
    scale: float
    witness: Optional[FloatList] = None

    model_config = {"from_attributes": True}


class AgreementRead(BaseModel):
    trials: int
    agreements: int
    violated: int
    disagreements: list[int]
    rate: float

    model_config = {"from_attributes": True}

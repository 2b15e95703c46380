from typing import Optional, Union

from pydantic import BaseModel


class SweepRowRead(BaseModel):
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

    model_config = {"from_attributes": True}


class SweepReportRead(BaseModel):
    rows: list[SweepRowRead]
    lap_convergent: bool
    resonant: bool
    blowup_exponent: Optional[float] = None
    envelope_max: float
    source_norm: float
    parameters: dict[str, Union[float, str]] = {}

    model_config = {"from_attributes": True}

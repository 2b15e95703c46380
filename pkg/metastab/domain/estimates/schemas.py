from pydantic import BaseModel


class WeightedRatioRead(BaseModel):
    field: str
    alpha: float
    concentration: float
    numerator: float
    denominator: float
    ratio: float

    model_config = {"from_attributes": True}


class TraceCheckRead(BaseModel):
    field: str
    resolution: int
    lhs: float
    norm_u: float
    norm_div: float
    rhs_product: float
    ratio: float

    model_config = {"from_attributes": True}


class TraceFitRead(BaseModel):
    resolution: int
    constant: float
    worst_field: str

    model_config = {"from_attributes": True}


class EstimatesReportRead(BaseModel):
    ratios: list[WeightedRatioRead] = []
    curl_residuals: dict[str, float] = {}
    trace_checks: list[TraceCheckRead] = []
    trace_fits: list[TraceFitRead] = []

    model_config = {"from_attributes": True}

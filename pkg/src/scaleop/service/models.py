"""Request/response schemas for the certification service.

The grid/radial function payloads are exactly the on-disk JSON schema, so
a file can be posted as-is.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator

from ..field import MAX_PRIME_POWER_Q, MAX_PRIME_Q, prime_factors

SUITE_NAMES = (
    "l2identity", "linfty", "osc", "general_necessity", "general_sufficiency",
    "radial_endpoint", "radial_necessity", "contradiction", "sphere_sizes",
    "fourier", "radial_fastpath", "homogeneous", "distance",
)

FAMILY_NAMES = ("delta", "subspace", "sphere0", "sphere1", "exponential", "radial", "random")


def validate_q(q: int) -> int:
    if q < 3 or q % 2 == 0:
        raise ValueError(f"q={q} must be an odd prime power >= 3")
    facs = prime_factors(q)
    if len(facs) != 1:
        raise ValueError(f"q={q} is not a prime power")
    p = facs[0]
    alpha = 0
    n = q
    while n > 1:
        n //= p
        alpha += 1
    cap = MAX_PRIME_Q if alpha == 1 else MAX_PRIME_POWER_Q
    if q > cap:
        raise ValueError(f"q={q} exceeds the supported cap {cap}")
    return q


class FieldOverrideMixin(BaseModel):
    """Optional custom field construction, applied to a single q."""

    alpha: Optional[int] = Field(default=None, ge=1)
    modulus: Optional[list[int]] = None


class VerifyRequest(FieldOverrideMixin):
    suites: Optional[list[str]] = None
    qs: Optional[list[int]] = None
    ds: Optional[list[int]] = None
    seed: int = 0
    osc_n: Optional[int] = None
    threads: int = Field(default=1, ge=1)

    @field_validator("suites")
    @classmethod
    def _suites_known(cls, v):
        if v is not None:
            for s in v:
                if s not in SUITE_NAMES:
                    raise ValueError(f"unknown suite {s!r}")
        return v

    @field_validator("qs")
    @classmethod
    def _qs_valid(cls, v):
        if v is not None:
            for q in v:
                validate_q(q)
        return v

    @field_validator("ds")
    @classmethod
    def _ds_valid(cls, v):
        if v is not None:
            for d in v:
                if d < 2:
                    raise ValueError(f"d={d} must be >= 2")
        return v


class CheckModel(BaseModel):
    criterion: int
    name: str
    passed: bool
    measured: object = None
    expected: object = None
    tolerance: object = None
    q: Optional[int] = None
    d: Optional[int] = None
    detail: str = ""

    model_config = {"arbitrary_types_allowed": True}


class VerifyResponse(BaseModel):
    passed: bool
    seed: int
    checks: list[CheckModel]


class ScanRequest(FieldOverrideMixin):
    d: int = Field(default=2, ge=2)
    qs: list[int] = Field(default=[3, 5, 7, 9, 11, 13])
    grid: int = Field(default=9, ge=2)
    families: list[str] = Field(default=list(FAMILY_NAMES[:-1]))
    trials: int = Field(default=0, ge=0)
    seed: int = 0
    threads: int = Field(default=1, ge=1)
    fit: bool = False

    @field_validator("qs")
    @classmethod
    def _qs_valid(cls, v):
        if not v:
            raise ValueError("qs must be nonempty")
        for q in v:
            validate_q(q)
        return v

    @field_validator("families")
    @classmethod
    def _families_known(cls, v):
        for f in v:
            if f not in FAMILY_NAMES:
                raise ValueError(f"unknown family {f!r}")
        return v


class ScanRow(BaseModel):
    d: int
    q: int
    p_inv: float
    s_inv: float
    family: str
    lower: float
    upper: Optional[float] = None
    in_general: bool
    in_radial: bool
    flags: str = ""


class GrowthFitModel(BaseModel):
    family: str
    x: float
    y: float
    qs: list[int]
    slope: float
    predicted: Optional[float] = None
    residual: float


class ScanResponse(BaseModel):
    seed: int
    rows: list[ScanRow]
    fits: Optional[list[GrowthFitModel]] = None


class GridFunctionModel(BaseModel):
    q: int
    alpha: int = 1
    modulus: Optional[list[int]] = None
    dim: int = Field(ge=1)
    values: list[tuple[float, float]]


class RadialFunctionModel(BaseModel):
    q: int
    alpha: int = 1
    modulus: Optional[list[int]] = None
    dim: int = Field(ge=1)
    radial: list[tuple[float, float]]


class NormRequest(BaseModel):
    p: float | str = 2
    s: float | str = 2
    function: Optional[GridFunctionModel] = None
    radial: Optional[RadialFunctionModel] = None


class NormResponse(BaseModel):
    input_norm: float
    output_norm: float
    ratio: float
    p: str
    s: str
    radial_fast_path: bool


class RegionRequest(BaseModel):
    kind: Literal["general", "radial"] = "general"
    d: Optional[int] = None


class HalfspaceModel(BaseModel):
    # a_x * x + a_y * y <= b, coefficients as exact fraction strings
    a_x: str
    a_y: str
    b: str


class RegionResponse(BaseModel):
    kind: str
    d: Optional[int]
    vertices: list[tuple[str, str]]
    vertices_float: list[tuple[float, float]]
    halfspaces: list[HalfspaceModel]


class DistanceRequest(FieldOverrideMixin):
    q: int = 11
    d: int = Field(default=2, ge=2)
    size: int = Field(ge=1)
    trials: int = Field(default=20, ge=1)
    seed: int = 0

    @field_validator("q")
    @classmethod
    def _q_valid(cls, v):
        return validate_q(v)


class DistanceTrial(BaseModel):
    trial: int
    distinct_distances: int


class DistanceResponse(BaseModel):
    q: int
    d: int
    size: int
    threshold: float
    above_threshold: bool
    all_full: bool
    seed: int
    trials: list[DistanceTrial]

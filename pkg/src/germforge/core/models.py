"""
Data models for germforge input documents and report rows using Pydantic
"""

from pathlib import Path
from typing import Annotated, List, Optional, Tuple, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator

from .validators import (
    DEFAULT_DEPTH,
    DEFAULT_ORDER,
    DEFAULT_SAMPLES,
    MIN_PIPELINE_ORDER,
    SUPPORTED_FORMATS,
)


def _scalar_text(value):
    if isinstance(value, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(value, int):
        return str(value)
    return value


ScalarText = Annotated[str, BeforeValidator(_scalar_text)]
Term = Tuple[Tuple[int, int, int], ScalarText]


class GermDocument(BaseModel):
    """Coefficients of f - id, one term list per component"""
    N: int = Field(..., ge=1, description="Certified total degree of f - id")
    divisor: Tuple[int, int, int] = Field((0, 0, 0), description="Exponents of the marked divisor monomial")
    coords: Tuple[List[Term], List[Term], List[Term]] = Field(
        ..., description="Per component: [[i, j, k], \"scalar\"] pairs"
    )

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "N": 6,
                "divisor": [0, 0, 2],
                "coords": [[[[1, 0, 2], "1"]], [[[0, 1, 2], "-1"]], [[[0, 0, 4], "1"]]],
            }
        },
    )


class InstanceDocument(BaseModel):
    """Higher-order parts P, Q, R of the example family"""
    N: int = Field(DEFAULT_ORDER, ge=MIN_PIPELINE_ORDER, description="Truncation order")
    P: Union[str, List[Term]] = Field(default_factory=list)
    Q: Union[str, List[Term]] = Field(default_factory=list)
    R: Union[str, List[Term]] = Field(default_factory=list)

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "N": 12,
                "P": "2*y**4",
                "Q": "3*y**4",
                "R": "y**4 + 2*z**4 + i*y**2*z**2 - i*x**2*y**2",
            }
        },
    )


class CommandConfig(BaseModel):
    """Validated command-line parameters"""
    subcommand: str
    input: Optional[Path] = None
    order: int = Field(DEFAULT_ORDER, ge=1)
    depth: int = Field(DEFAULT_DEPTH, ge=1)
    samples: int = Field(DEFAULT_SAMPLES, ge=1)
    curve_depth: Optional[int] = Field(None, ge=1)
    format: str = "json"
    out: Optional[Path] = None
    tilde: bool = False

    @model_validator(mode="after")
    def _check(self):
        if self.format not in SUPPORTED_FORMATS:
            raise ValueError(f"unsupported format {self.format}")
        if self.format == "dot" and self.subcommand != "resolve":
            raise ValueError("dot output is only available for resolve")
        if self.subcommand in ("resolve", "theorem_a", "theorem_b") and self.order < MIN_PIPELINE_ORDER:
            raise ValueError(f"order must be at least {MIN_PIPELINE_ORDER} for the example pipelines")
        return self


class SiteRow(BaseModel):
    """One singular point of a modification tree"""
    site: str
    chart: str
    divisor: str
    certified_degree: int
    kind: str = Field(..., serialization_alias="class")
    eigenvalues: str
    quality: str


class DirectionRow(BaseModel):
    """One resolved direction"""
    direction: str
    multiplier: str
    degenerate: bool
    exceptional: bool
    multiplicity: Optional[str] = None


class ParabolicRow(BaseModel):
    """One attracting direction of a Ramis-Sibuya reduction"""
    site: str = ""
    index: int
    omega: str
    signs_x: str
    signs_y: str
    s: int
    dimension: int


class TheoremBRow(BaseModel):
    """Summary of one Theorem B site"""
    site: str
    kind: str = Field(..., serialization_alias="class")
    status: str
    r: Optional[int] = None
    count: int = 0
    dimensions: str = ""

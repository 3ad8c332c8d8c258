"""Pydantic models for the check plugin system and CLI configuration.

CheckResult: standardized envelope every check returns
CheckManifest: validates check metadata from manifest.json
CheckParams: base class for each check's parameter model
RunConfig: one CLI invocation, validated before any work starts
"""

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

from models import OutputFormat


class CheckResult(BaseModel):
    """Standardized envelope every check returns."""

    status: Literal["ok", "violation", "error"]
    check: str  # check name, e.g. "quadrature"
    summary: str
    data: dict[str, Any] = {}

    def to_string(self) -> str:
        if self.status == "ok":
            return f"[{self.check}] {self.summary}"
        return f"[{self.check} {self.status.upper()}] {self.summary}"


class CheckManifest(BaseModel):
    """Validates each check's manifest.json."""

    name: str
    description: str
    version: str
    tags: list[str] = []
    input_schema: dict[str, Any] = {}


class CheckParams(BaseModel):
    """Parameters shared by every check; subclasses add their own."""

    model_config = ConfigDict(extra="forbid")

    tolerance: float | None = Field(default=None, gt=0)


class RunConfig(BaseModel):
    command: Literal["bound", "check", "theta"]
    dims: list[int] = []
    K: int = Field(default=25, ge=0)
    nodes: int = Field(default=400, ge=1)
    tolerance: float = Field(default=1e-9, gt=0)
    output: OutputFormat = OutputFormat.JSON
    seed: int = 0

    @field_validator("dims")
    @classmethod
    def _dims_in_range(cls, dims: list[int]) -> list[int]:
        for n in dims:
            if not 1 <= n <= 36:
                raise ValueError(f"dimension {n} outside 1..36")
        return dims

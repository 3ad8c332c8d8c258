from enum import Enum
from fractions import Fraction

from pydantic import BaseModel, ConfigDict, Field, field_serializer


class BoundSource(str, Enum):
    BESSEL_CLOSED_FORM = "bessel-closed-form"
    GENERIC_F = "generic-f"


class FhatProvenance(str, Enum):
    CLOSED_FORM = "closed-form"
    RADIAL_FT = "radial_ft"


class SilpVerdict(str, Enum):
    CERTIFIED = "certified-nonnegative-on-grid"
    VIOLATION = "violation-found"
    INCONCLUSIVE = "inconclusive"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"


class TransformResult(BaseModel):
    """Value of a radial Fourier transform at one radius."""

    model_config = ConfigDict(frozen=True)

    radius: float
    value: float
    est_error: float = Field(ge=0)
    # error bound rests on a fitted decay envelope
    heuristic: bool = False


class QuadratureEstimate(BaseModel):
    """Truncated quadrature/Dini sum with the estimated size of the dropped tail."""

    model_config = ConfigDict(frozen=True)

    value: float
    tail_estimate: float = Field(ge=0)
    terms: int
    heuristic: bool = False


class BoundResult(BaseModel):
    n: int = Field(ge=1)
    density_bound: float
    center_density_bound: float
    source: BoundSource
    # density = center density * conversion_factor (volume of the unit ball)
    conversion_factor: float
    j_value: float | None = None
    fhat0: float | None = None
    fhat0_provenance: FhatProvenance | None = None
    certificate: str | None = None
    center_density_interval: tuple[float, float] | None = None
    heuristic: bool = False


class SilpReport(BaseModel):
    alpha: float
    y_grid: list[float]
    j_max: int
    coeffs: list[list[float]]  # coeffs[i][j] = a_j(y_grid[i])
    min_coeff: float
    verdict: SilpVerdict
    tolerance: float
    unconverged_cells: list[float] = []  # y values whose coefficients did not converge


class ClosureSweepReport(BaseModel):
    """silp_check over products of random measure pairs."""

    alpha: float
    pairs: int
    min_coeffs: list[float]  # one per pair
    min_coeff: float
    verdict: SilpVerdict
    tolerance: float


class DualFeasibilityReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    c: float = Field(gt=0)
    min_norm: Fraction
    margin: float
    test_set: list[str]
    slacks: dict[str, float] = {}
    slack_errors: dict[str, float] = {}  # omitted dual tail per test function
    support_condition_holds: bool = True

    @field_serializer("min_norm")
    def _ser_min_norm(self, value: Fraction) -> str:
        return f"{value.numerator}/{value.denominator}"


class WeakDualityReport(BaseModel):
    """f(0) >= sum over the lattice = dual sum / covolume >= c * fhat(0)."""

    f0: float
    lattice_sum: float
    dual_sum: float
    c_fhat0: float
    holds: bool
    truncation_error: float = 0.0


class CenterDensity(BaseModel):
    algebraic: float
    algebraic_exact: str | None = None  # "p/q" when the value is rational
    limit: float
    limit_error: float


class ExtremalityReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    min_norm: int | None  # None when every computed coefficient past k=0 is zero
    negative_coeffs: list[tuple[int, Fraction]]
    checked_up_to: int

    @field_serializer("negative_coeffs")
    def _ser_negatives(self, value: list[tuple[int, Fraction]]) -> list[tuple[int, str]]:
        return [(k, f"{c.numerator}/{c.denominator}") for k, c in value]

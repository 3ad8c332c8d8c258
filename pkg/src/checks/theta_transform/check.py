import math
import sys
from pathlib import Path

from pydantic import Field

_src = Path(__file__).resolve().parents[2]
if str(_src) not in sys.path:
    sys.path.insert(0, str(_src))

import config
from lattices import resolve_lattice, theta_transform_check
from schemas import CheckParams, CheckResult

CHECK_NAME = "theta-transform"


class Params(CheckParams):
    lattice: str = "e8"
    y: list[float] = Field(default=[1.0, math.pi, 5.0], min_length=1)


def run(params: Params) -> CheckResult:
    tol = params.tolerance or config.default_tolerance()
    L = resolve_lattice(params.lattice)
    residuals = {f"{y:.15g}": theta_transform_check(L, y) for y in params.y}
    worst = max(residuals.values())
    return CheckResult(
        status="ok" if worst < tol else "violation",
        check=CHECK_NAME,
        summary=f"{L.name}: max residual {worst:.3g} over {len(residuals)} values of y",
        data={"lattice": L.name, "residuals": residuals, "tolerance": tol},
    )

"""Theta-coefficient positivity: every shell sum must be >= -tolerance."""

import sys
from pathlib import Path

from pydantic import Field

_src = Path(__file__).resolve().parents[2]
if str(_src) not in sys.path:
    sys.path.insert(0, str(_src))

import config
from lattices import laguerre_positivity_check, resolve_lattice
from schemas import CheckParams, CheckResult

CHECK_NAME = "thetacoeff"


class Params(CheckParams):
    lattice: str = "e8"
    kmax: int = Field(default=15, ge=0)
    y: list[float] = Field(default=[0.5, 1.0, 2.0], min_length=1)


def run(params: Params) -> CheckResult:
    tol = params.tolerance or config.default_tolerance()
    L = resolve_lattice(params.lattice)
    sums = {f"{y:g}": laguerre_positivity_check(L, params.kmax, y) for y in params.y}
    worst_y, worst_row = min(sums.items(), key=lambda item: min(item[1]))
    worst = min(worst_row)
    return CheckResult(
        status="ok" if worst >= -tol else "violation",
        check=CHECK_NAME,
        summary=f"{L.name}: min shell sum {worst:.3g} (y={worst_y}, k={worst_row.index(worst)})",
        data={"lattice": L.name, "kmax": params.kmax, "sums": sums, "min": worst, "tolerance": tol},
    )

import sys
from pathlib import Path

from pydantic import Field

_src = Path(__file__).resolve().parents[2]
if str(_src) not in sys.path:
    sys.path.insert(0, str(_src))

import config
from lattices import poisson_check, resolve_lattice
from radial import gaussian_fn
from schemas import CheckParams, CheckResult

CHECK_NAME = "poisson"


class Params(CheckParams):
    lattice: str = "z1"
    v: list[str] = []  # shift in basis coordinates, "p/q" strings; empty means 0
    s: list[float] = Field(default=[1.0], min_length=1)  # Gaussian scales exp(-pi s r^2)


def run(params: Params) -> CheckResult:
    tol = params.tolerance or config.default_tolerance()
    L = resolve_lattice(params.lattice)
    v = params.v or None
    residuals = {f"{s:g}": poisson_check(L, gaussian_fn(L.n, s), v) for s in params.s}
    worst = max(residuals.values())
    return CheckResult(
        status="ok" if worst < tol else "violation",
        check=CHECK_NAME,
        summary=f"{L.name} v={params.v or 0}: max residual {worst:.3g}",
        data={"lattice": L.name, "v": params.v, "residuals": residuals, "tolerance": tol},
    )

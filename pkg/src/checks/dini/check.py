"""Dini interpolation check against the transform of the autocorrelation family."""

import sys
from pathlib import Path
from typing import Literal

from pydantic import Field

_src = Path(__file__).resolve().parents[2]
if str(_src) not in sys.path:
    sys.path.insert(0, str(_src))

import config
from lpquad import dini_interpolate, dini_samples
from radial import autocorr_fn, radial_ft
from schemas import CheckParams, CheckResult

CHECK_NAME = "dini"


class Params(CheckParams):
    dim: int = Field(default=3, ge=1, le=36)
    r: float = Field(default=2.0, gt=0)
    nodes: int = Field(default=400, ge=1)
    power: Literal[1, 2] = 2
    u: list[float] = [0.0, 0.25, 0.5, 0.75]


def _reference(f, t: float) -> float:
    if f.transform is not None:
        return float(f.transform(t))
    if t == 0:
        return f.fhat0
    return radial_ft(f, t).value


def run(params: Params) -> CheckResult:
    tol = params.tolerance or 1e3 * config.default_tolerance()
    n, r = params.dim, params.r
    f = autocorr_fn(n, r, params.power)
    samples = dini_samples(f, r, params.nodes)
    rows = []
    for u in params.u:
        estimate = dini_interpolate(n, r, samples, u, f=f, tol=tol)
        reference = _reference(f, r * u)
        rows.append(
            {
                "u": u,
                "value": estimate.value,
                "reference": reference,
                "residual": abs(estimate.value - reference),
                "tail_estimate": estimate.tail_estimate,
            }
        )
    worst = max(row["residual"] for row in rows)
    return CheckResult(
        status="ok" if worst < tol else "violation",
        check=CHECK_NAME,
        summary=f"{f.name}: max Dini residual {worst:.3g} over {len(rows)} points, M={params.nodes}",
        data={"n": n, "r": r, "M": params.nodes, "rows": rows, "tolerance": tol},
    )

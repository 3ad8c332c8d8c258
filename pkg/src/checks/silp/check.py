"""SILP grid certification.

The levensh family is the optimal Bessel function pulled back to squared
radius; its alpha is fixed by the dimension. product-closure certifies the
products of random measure pairs drawn from a seeded generator.
"""

import sys
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import Field

_src = Path(__file__).resolve().parents[2]
if str(_src) not in sys.path:
    sys.path.insert(0, str(_src))

import config
import silp
from models import SilpVerdict
from schemas import CheckParams, CheckResult
from specfun import Order

CHECK_NAME = "silp"


class Params(CheckParams):
    function: Literal["exp", "kernel", "linear-cutoff", "damped-linear", "levensh", "product-closure"] = "exp"
    alpha: float = Field(default=0.0, ge=-0.5)
    dim: int = Field(default=8, ge=2, le=36)  # levensh only
    jmax: int = Field(default=silp.DEFAULT_J_MAX, ge=0)
    y: list[float] = Field(default=list(silp.DEFAULT_Y_GRID), min_length=1)
    pairs: int = Field(default=20, ge=1)  # product-closure only
    seed: int = 0


_STATUS = {
    SilpVerdict.CERTIFIED: "ok",
    SilpVerdict.VIOLATION: "violation",
    SilpVerdict.INCONCLUSIVE: "error",
}


def run(params: Params) -> CheckResult:
    tol = params.tolerance or config.default_tolerance()
    if params.function == "product-closure":
        return _run_closure(params, tol)
    if params.function == "levensh":
        alpha = Order.for_dimension(params.dim)
        f = silp.levensh_pullback(params.dim)
    else:
        alpha = Order.of(params.alpha)
        f = silp.FAMILIES[params.function](alpha)
    report = silp.silp_check(f, alpha, params.y, params.jmax, tol=tol)
    return CheckResult(
        status=_STATUS[report.verdict],
        check=CHECK_NAME,
        summary=f"{f.name} alpha={alpha}: {report.verdict.value} (min coefficient {report.min_coeff:.3g})",
        data=report.model_dump(mode="json"),
    )


def _run_closure(params: Params, tol: float) -> CheckResult:
    alpha = Order.of(params.alpha)
    rng = np.random.default_rng(params.seed)
    report = silp.product_closure_sweep(alpha, params.pairs, rng, params.y, params.jmax, tol=tol)
    return CheckResult(
        status=_STATUS[report.verdict],
        check=CHECK_NAME,
        summary=(
            f"{params.pairs} random measure products alpha={alpha} (seed {params.seed}): "
            f"{report.verdict.value} (min coefficient {report.min_coeff:.3g})"
        ),
        data=report.model_dump(mode="json"),
    )

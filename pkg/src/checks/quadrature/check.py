"""Quadrature identity check.

For the ball autocorrelation the reference fhat(0) is closed form; for the
levensh function the rule radius is fixed to j/pi and the reference comes
from the numeric radial transform.
"""

import math
import sys
from pathlib import Path
from typing import Literal

from pydantic import Field

_src = Path(__file__).resolve().parents[2]
if str(_src) not in sys.path:
    sys.path.insert(0, str(_src))

import config
from lpquad import bgf_apply, bgf_rule, choose_node_count
from radial import autocorr_fn, levensh_fn, radial_ft
from schemas import CheckParams, CheckResult
from specfun import Order, bessel_root

CHECK_NAME = "quadrature"


class Params(CheckParams):
    dim: int = Field(default=3, ge=1, le=36)
    r: float = Field(default=2.0, gt=0)
    nodes: int | None = Field(default=None, ge=1)  # chosen from the tail estimate when unset
    function: Literal["autocorr", "levensh"] = "autocorr"
    power: Literal[1, 2] = 1
    band: float | None = Field(default=None, gt=0)  # band limit of the test function, <= r


def run(params: Params) -> CheckResult:
    tol = params.tolerance or config.default_tolerance()
    n = params.dim
    if params.function == "levensh":
        f = levensh_fn(n)
        r = bessel_root(Order(n), 1) / math.pi
        reference = radial_ft(f, 0.0).value
    else:
        r = params.r
        f = autocorr_fn(n, params.band or r, params.power)
        reference = f.fhat0
    tail_tol = max(tol, 1e-6)
    M = params.nodes or choose_node_count(n, r, f, target=tol)
    estimate = bgf_apply(bgf_rule(n, r, M), f, tol=tail_tol)
    residual = abs(estimate.value - reference) / abs(reference)
    status = "ok" if residual < tol else "violation"
    return CheckResult(
        status=status,
        check=CHECK_NAME,
        summary=f"{f.name}: relative residual {residual:.3g} with M={M}",
        data={
            "n": n,
            "r": r,
            "M": M,
            "value": estimate.value,
            "reference": reference,
            "residual": residual,
            "tail_estimate": estimate.tail_estimate,
            "heuristic": estimate.heuristic,
            "tolerance": tol,
        },
    )

import sys
from pathlib import Path

from pydantic import Field

_src = Path(__file__).resolve().parents[2]
if str(_src) not in sys.path:
    sys.path.insert(0, str(_src))

import config
from lattices import dual_feasibility, min_norm, resolve_lattice, weak_duality_check
from radial import autocorr_fn, gaussian_fn, transformed
from schemas import CheckParams, CheckResult

CHECK_NAME = "dual-feasibility"


class Params(CheckParams):
    lattice: str = "e8"
    s: list[float] = Field(default=[0.5, 1.0, 2.0], min_length=1)


def run(params: Params) -> CheckResult:
    tol = params.tolerance or config.default_tolerance()
    L = resolve_lattice(params.lattice)
    L = L.scaled(1 / min_norm(L))
    report = dual_feasibility(L, [gaussian_fn(L.n, s) for s in params.s], tol=tol)
    # supported in the unit ball with transform autocorr >= 0, normalized to f(0) = 1
    base = autocorr_fn(L.n, 1.0, power=2)
    weak = weak_duality_check(L, transformed(base.scaled(1 / base.fhat0)), tol=max(tol, 1e-7))
    ok = report.margin >= -tol and weak.holds
    return CheckResult(
        status="ok" if ok else "violation",
        check=CHECK_NAME,
        summary=f"{L.name}: margin {report.margin:.3g}, weak duality {'holds' if weak.holds else 'fails'}",
        data={"feasibility": report.model_dump(mode="json"), "weak_duality": weak.model_dump(mode="json")},
    )

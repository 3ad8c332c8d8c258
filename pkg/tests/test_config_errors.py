import pytest
from pydantic import ValidationError

import config
from errors import AccuracyError, DegenerateBoundError, DomainError, LpSphereError, PreconditionError, ResourceError
from models import OutputFormat
from schemas import CheckParams, CheckResult, RunConfig


def test_default_tolerance():
    assert config.default_tolerance() == 1e-9


def test_tolerance_override(set_tolerance):
    set_tolerance(" 1e-6 ")
    assert config.default_tolerance() == 1e-6


@pytest.mark.parametrize("raw", ["", "tight", "0", "-1e-9", "nan"])
def test_invalid_tolerance_rejected(set_tolerance, raw):
    set_tolerance(raw)
    with pytest.raises(ValueError, match="LP_SPHERE_TOL"):
        config.default_tolerance()


def test_error_hierarchy():
    assert issubclass(DomainError, ValueError)
    assert issubclass(PreconditionError, ValueError)
    assert issubclass(AccuracyError, ArithmeticError)
    assert issubclass(ResourceError, RuntimeError)
    for cls in (DomainError, PreconditionError, AccuracyError, ResourceError, DegenerateBoundError):
        assert issubclass(cls, LpSphereError)


def test_precondition_error_names_hypothesis():
    e = PreconditionError("f(x) <= 0 for |x| >= 1", "f(1.5) = 0.2")
    assert e.hypothesis == "f(x) <= 0 for |x| >= 1"
    assert str(e) == "hypothesis failed: f(x) <= 0 for |x| >= 1 (f(1.5) = 0.2)"
    assert str(PreconditionError("n >= 1")) == "hypothesis failed: n >= 1"


def test_failures_carry_partial_results():
    e = AccuracyError("tail too heavy", partial=1.25, est_error=1e-3)
    assert (e.partial, e.est_error) == (1.25, 1e-3)
    assert ResourceError("budget", completed_up_to=12).completed_up_to == 12
    assert AccuracyError("no partial").partial is None


def test_run_config_validation():
    run = RunConfig(command="bound", dims=[1, 36], output="csv")
    assert run.output == OutputFormat.CSV
    with pytest.raises(ValidationError):
        RunConfig(command="bound", dims=[37])
    with pytest.raises(ValidationError):
        RunConfig(command="plot")
    with pytest.raises(ValidationError):
        RunConfig(command="theta", K=-1)


def test_check_params_forbid_unknown_keys():
    with pytest.raises(ValidationError):
        CheckParams(tolerence=1e-6)
    with pytest.raises(ValidationError):
        CheckParams(tolerance=0)


def test_check_result_text():
    ok = CheckResult(status="ok", check="poisson", summary="fine")
    bad = CheckResult(status="violation", check="poisson", summary="residual 1e-3")
    assert ok.to_string() == "[poisson] fine"
    assert bad.to_string() == "[poisson VIOLATION] residual 1e-3"

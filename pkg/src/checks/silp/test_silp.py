"""Tests for the SILP check."""

import pytest

from conftest import load_check


@pytest.fixture
def silp_check():
    return load_check("silp")


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_exp_certified(silp_check, alpha):
    result = silp_check.run(silp_check.Params(function="exp", alpha=alpha))
    assert result.status == "ok"
    assert result.data["verdict"] == "certified-nonnegative-on-grid"


def test_damped_linear_violates(silp_check):
    result = silp_check.run(silp_check.Params(function="damped-linear", alpha=1.0, y=[0.5, 1.0]))
    assert result.status == "violation"
    assert result.data["min_coeff"] < 0


def test_report_carries_full_matrix(silp_check):
    result = silp_check.run(silp_check.Params(function="kernel", alpha=0.5, jmax=5, y=[1.0, 2.0]))
    assert len(result.data["coeffs"]) == 2
    assert all(len(row) == 6 for row in result.data["coeffs"])


def test_alpha_must_be_half_integer(silp_check):
    with pytest.raises(ValueError):
        silp_check.run(silp_check.Params(function="exp", alpha=0.3))


def test_linear_cutoff_violates(silp_check):
    result = silp_check.run(silp_check.Params(function="linear-cutoff"))
    assert result.status == "violation"


def test_product_closure_is_seeded(silp_check):
    params = silp_check.Params(function="product-closure", alpha=0.5, pairs=3, jmax=5, y=[1.0], seed=9)
    first, second = silp_check.run(params), silp_check.run(params)
    assert first.status == "ok"
    assert first.data == second.data
    assert len(first.data["min_coeffs"]) == 3
    assert "seed 9" in first.summary

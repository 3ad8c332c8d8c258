"""Tests for the Poisson summation check."""

import pytest

from conftest import load_check


@pytest.fixture
def poisson():
    return load_check("poisson")


@pytest.mark.parametrize("v", [[], ["1/2"]])
def test_z1(poisson, v):
    result = poisson.run(poisson.Params(lattice="z1", v=v, s=[0.5, 1.0]))
    assert result.status == "ok", result.summary


def test_e8_at_zero(poisson):
    result = poisson.run(poisson.Params(lattice="e8"))
    assert result.status == "ok"
    assert max(result.data["residuals"].values()) < 1e-9


def test_unknown_lattice(poisson):
    with pytest.raises(ValueError):
        poisson.run(poisson.Params(lattice="a5"))

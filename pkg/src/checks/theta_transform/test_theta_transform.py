"""Tests for the theta transformation check."""

import pytest

from conftest import load_check


@pytest.fixture
def theta_transform():
    return load_check("theta_transform")


@pytest.mark.parametrize("name", ["z1", "z2", "d4", "e8"])
def test_builtin_lattices(theta_transform, name):
    result = theta_transform.run(theta_transform.Params(lattice=name))
    assert result.status == "ok", result.summary
    assert len(result.data["residuals"]) == 3

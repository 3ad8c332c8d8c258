import pytest

import config
import lattices


@pytest.fixture(autouse=True)
def default_tolerance_env(monkeypatch):
    """Every test starts from the built-in tolerance, whatever the shell exports."""
    monkeypatch.delenv("LP_SPHERE_TOL", raising=False)
    yield


@pytest.fixture
def set_tolerance(monkeypatch):
    def _set(value: str) -> None:
        monkeypatch.setenv("LP_SPHERE_TOL", value)

    return _set


@pytest.fixture
def z1():
    return lattices.builtin("z1")


@pytest.fixture
def z2():
    return lattices.builtin("z2")


@pytest.fixture
def d4():
    return lattices.builtin("d4")


@pytest.fixture
def e8():
    return lattices.builtin("e8")


@pytest.fixture
def tol():
    return config.default_tolerance()

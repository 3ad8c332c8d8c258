import math

import numpy as np
import pytest

import config
from errors import DegenerateBoundError, DomainError, PreconditionError
from lpquad import bessel_bound
from models import SilpVerdict
from silp import (
    FAMILIES,
    HalfLineFunction,
    cesaro_mean,
    cesaro_weights,
    damped_linear_fn,
    exp_coefficient,
    exp_fn,
    generating_function_residual,
    integrate_moment,
    kernel_fn,
    laguerre_coeff,
    levensh_pullback,
    linear_cutoff_fn,
    multiply,
    product_closure_sweep,
    random_measure,
    silp_bound,
    silp_check,
    silp_from_measure,
)


def kernel_coefficient(alpha: float, j: int, s: float) -> float:
    """Coefficients of omega_kernel(alpha, s x): s^j e^-s / Gamma(j + alpha + 1)."""
    return s**j * math.exp(-s) / math.gamma(j + alpha + 1)


# ---------------------------------------------------------------------------
# weighted quadrature


@pytest.mark.parametrize("alpha", [0, 0.5, 1.5, 3])
def test_moment_of_weight_is_gamma(alpha):
    total = integrate_moment(lambda x, w: w.sum(), alpha)
    assert total[0] == pytest.approx(math.gamma(alpha + 1), rel=1e-12)


def test_piecewise_rule_matches_plain_rule():
    plain = integrate_moment(lambda x, w: w @ np.cos(x), 1.0)
    pieces = integrate_moment(lambda x, w: w @ np.cos(x), 1.0, breakpoints=(1.0, 3.0))
    assert pieces[0] == pytest.approx(plain[0], abs=1e-12)
    # int cos(x) x e^-x dx = Re 1/(1 - i)^2 = 0
    assert abs(plain[0]) < 1e-12


# ---------------------------------------------------------------------------
# coefficients


@pytest.mark.parametrize("alpha", [0, 0.5, 3])
@pytest.mark.parametrize("y", [0.5, 1.0, 2.0])
def test_exp_coefficients_closed_form(alpha, y):
    f = exp_fn()
    for j in (0, 1, 5, 10):
        assert laguerre_coeff(f, alpha, j, y) == pytest.approx(exp_coefficient(alpha, j, y), rel=1e-9)


@pytest.mark.parametrize("alpha", [0, 0.5, 2])
@pytest.mark.parametrize("c, y", [(1.0, 1.0), (3.0, 2.0), (0.5, 0.25)])
def test_kernel_coefficients_closed_form(alpha, c, y):
    f = kernel_fn(alpha, c)
    for j in (0, 2, 6):
        assert laguerre_coeff(f, alpha, j, y) == pytest.approx(kernel_coefficient(alpha, j, c / y), rel=1e-8, abs=1e-12)


def test_measure_coefficients_are_linear_in_atoms():
    atoms = [(0.5, 2.0), (2.0, 1.0)]
    f = silp_from_measure(atoms, 1)
    y = 1.0
    for j in (0, 3):
        expected = sum(w * kernel_coefficient(1.0, j, s / y) for s, w in atoms)
        assert laguerre_coeff(f, 1, j, y) == pytest.approx(expected, rel=1e-8)


def test_damped_linear_has_negative_first_coefficient():
    # alpha = 1: a_0(y) = (1 - 1/y) / (1 + 1/y)^3
    y = 0.5
    expected = (1 - 1 / y) / (1 + 1 / y) ** 3
    assert laguerre_coeff(damped_linear_fn(), 1, 0, y) == pytest.approx(expected, rel=1e-10)
    assert expected == pytest.approx(-1 / 27)


def test_linear_cutoff_coefficient_uses_breakpoints():
    # alpha = 0, y = 1: int_0^2 (1 - x) e^-x dx = 2 e^-2
    assert laguerre_coeff(linear_cutoff_fn(), 0, 0, 1.0) == pytest.approx(2 * math.exp(-2), rel=1e-10)


def test_scaled_and_product_functions():
    f = exp_fn().scaled(2.0)
    assert f(1.0) == pytest.approx(math.exp(-2))
    assert f.decay_rate == 2.0
    square = multiply(exp_fn(), exp_fn())
    for j in (0, 4):
        assert laguerre_coeff(square, 0.5, j, 1.0) == pytest.approx(exp_coefficient(0.5, j, 0.5), rel=1e-9)


@pytest.mark.parametrize("make", [exp_fn, linear_cutoff_fn, lambda: kernel_fn(0.5, 2.0)])
@pytest.mark.parametrize("c", [0.5, 3.0])
def test_coefficients_are_scale_covariant(make, c):
    f = make()
    for j in (0, 3, 7):
        scaled = laguerre_coeff(f.scaled(c), 0.5, j, 2.0)
        assert scaled == pytest.approx(laguerre_coeff(f, 0.5, j, 2.0 / c), rel=1e-9, abs=1e-12)


def test_coefficient_arguments_validated():
    with pytest.raises(DomainError):
        laguerre_coeff(exp_fn(), 0, -1, 1.0)
    with pytest.raises(DomainError):
        laguerre_coeff(exp_fn(), 0, 0, 0.0)
    with pytest.raises(DomainError):
        exp_fn().scaled(-1.0)


# ---------------------------------------------------------------------------
# Cesaro means and the generating function


def test_cesaro_weights():
    assert np.allclose(cesaro_weights(5, 0), 1.0)
    w = cesaro_weights(4, 1)
    assert np.allclose(w, [1.0, 0.8, 0.6, 0.4, 0.2])


def test_cesaro_mean_converges_to_damped_function():
    f = exp_fn()
    y = 1.0
    x = np.linspace(0.0, 6.0, 25)
    target = np.exp(-x) * np.exp(-x * y / 2)

    def error(m):
        return float(np.max(np.abs(cesaro_mean(f, 0, y, x, m) - target)))

    e_small, e_large = error(25), error(200)
    assert e_large < e_small
    assert e_large < 2e-2


@pytest.mark.parametrize(
    "f",
    [exp_fn(), kernel_fn(0, 2.0), silp_from_measure([(0.5, 1.0), (3.0, 0.5)], 0)],
    ids=["exp", "kernel", "measure"],
)
def test_cesaro_sup_error_on_0_20_decreases(f):
    y = 1.0
    x = np.linspace(0.0, 20.0, 201)
    target = f(x) * np.exp(-x * y / 2)

    def error(m):
        return float(np.max(np.abs(cesaro_mean(f, 0, y, x, m) - target)))

    assert error(60) < error(15)


def test_cesaro_order_must_exceed_half_alpha_threshold():
    with pytest.raises(PreconditionError):
        cesaro_mean(exp_fn(), 1, 1.0, 0.5, 10, k=1.4)


@pytest.mark.parametrize("alpha", [0, 1.5])
@pytest.mark.parametrize("t", [-0.5, 0.3, 0.7])
def test_generating_function_identity(alpha, t):
    assert generating_function_residual(exp_fn(), alpha, 1.0, t, 80) < 1e-9


def test_generating_function_needs_t_inside_unit_disk():
    with pytest.raises(DomainError):
        generating_function_residual(exp_fn(), 0, 1.0, 1.0, 5)


# ---------------------------------------------------------------------------
# certification


def test_exp_is_certified():
    report = silp_check(exp_fn(), 0.5)
    assert report.verdict == SilpVerdict.CERTIFIED
    assert len(report.coeffs) == 5
    assert all(len(row) == 21 for row in report.coeffs)
    assert report.min_coeff > 0
    assert report.unconverged_cells == []


def test_kernel_is_certified():
    report = silp_check(kernel_fn(1, 2.0), 1, j_max=10)
    assert report.verdict == SilpVerdict.CERTIFIED


def test_measure_is_certified():
    f = silp_from_measure([(0.5, 1.0), (2.0, 0.25)], 1)
    report = silp_check(f, 1, j_max=10)
    assert report.verdict == SilpVerdict.CERTIFIED


def test_linear_cutoff_violation():
    report = silp_check(linear_cutoff_fn(), 0)
    assert report.verdict == SilpVerdict.VIOLATION
    assert report.min_coeff < 0


def test_damped_linear_violation():
    report = silp_check(damped_linear_fn(), 1, y_grid=(0.5, 2.0), j_max=5)
    assert report.verdict == SilpVerdict.VIOLATION
    assert report.min_coeff <= -1 / 27 + 1e-9


def test_unconverged_rows_make_clean_grid_inconclusive(monkeypatch):
    monkeypatch.setattr(config, "LAGUERRE_MAX_NODES", 32)
    report = silp_check(exp_fn(), 0, y_grid=(1.0,), j_max=4)
    assert report.verdict == SilpVerdict.INCONCLUSIVE
    assert report.unconverged_cells == [1.0]


def test_silp_check_needs_decay_metadata():
    f = HalfLineFunction("bare", lambda x: np.exp(-x), None)
    with pytest.raises(PreconditionError):
        silp_check(f, 0)


def test_measure_preconditions():
    with pytest.raises(PreconditionError):
        silp_from_measure([], 0)
    with pytest.raises(PreconditionError):
        silp_from_measure([(1.0, -1.0)], 0)
    with pytest.raises(PreconditionError):
        silp_from_measure([(0.0, 1.0)], 0)


def test_families_registry():
    assert set(FAMILIES) == {"exp", "kernel", "linear-cutoff", "damped-linear"}
    assert FAMILIES["kernel"](1.5).name.startswith("omega[3/2]")


# ---------------------------------------------------------------------------
# bound


def test_levensh_pullback_is_not_a_violation():
    report = silp_check(levensh_pullback(3), 0.5, y_grid=(1.0,), j_max=8)
    assert report.verdict != SilpVerdict.VIOLATION


@pytest.mark.parametrize("n", [2, 3])
def test_silp_bound_recovers_bessel_bound(n):
    f = levensh_pullback(n)
    assert f(0.0) == pytest.approx(1.0, rel=1e-15)
    bound = silp_bound(f, n, certify=False)
    assert bound == pytest.approx(bessel_bound(n).center_density_bound, rel=1e-6)


def test_silp_bound_preconditions():
    with pytest.raises(PreconditionError, match="n > 1"):
        silp_bound(levensh_pullback(1), 1)
    with pytest.raises(PreconditionError, match="x >= 1"):
        silp_bound(exp_fn(), 3)
    with pytest.raises(PreconditionError, match="SILP"):
        silp_bound(damped_linear_fn(), 3)
    with pytest.raises(DomainError):
        levensh_pullback(0)


def test_silp_bound_degenerate_integral():
    with pytest.raises(DegenerateBoundError):
        silp_bound(damped_linear_fn(), 3, certify=False)


# ---------------------------------------------------------------------------
# product closure


def test_random_measure_is_reproducible():
    f = random_measure(np.random.default_rng(3), 0)
    g = random_measure(np.random.default_rng(3), 0)
    x = np.linspace(0.0, 5.0, 11)
    assert np.array_equal(f(x), g(x))
    assert f(0.0) > 0


def test_products_of_random_measures_stay_nonnegative():
    report = product_closure_sweep(0.5, 20, np.random.default_rng(2024), y_grid=(0.5, 1.0, 2.0), j_max=8)
    assert report.pairs == 20
    assert len(report.min_coeffs) == 20
    assert report.min_coeff >= -1e-8
    assert report.verdict != SilpVerdict.VIOLATION


def test_closure_sweep_needs_a_pair():
    with pytest.raises(DomainError):
        product_closure_sweep(0, 0, np.random.default_rng(0))

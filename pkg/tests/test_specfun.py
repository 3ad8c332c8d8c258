"""Special functions against closed forms, scipy, and their defining identities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from errors import DomainError
from specfun import (
    Order,
    ball_ft,
    ball_volume,
    bessel_j,
    bessel_j_prime,
    bessel_j_scaled,
    bessel_root,
    bessel_roots,
    bessel_roots_upto,
    gamma,
    laguerre,
    laguerre_table,
    mcmahon,
    omega_kernel,
)

HALF_ORDERS = [k / 2 for k in range(-1, 41)]


# ---------------------------------------------------------------------------
# gamma


@pytest.mark.parametrize(
    "x, expected",
    [(0.5, math.sqrt(math.pi)), (1.0, 1.0), (5.0, 24.0), (4.5, 11.631728396567448)],
)
def test_gamma_values(x, expected):
    assert gamma(x) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_gamma_rejects_non_positive(x):
    with pytest.raises(DomainError):
        gamma(x)


# ---------------------------------------------------------------------------
# Bessel J


def test_bessel_j_half_order_closed_form():
    # J_{1/2}(x) = sqrt(2/(pi x)) sin x
    assert bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, abs=1e-14)


def test_bessel_j_zero_at_origin():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(3, 0.0) == 0.0


def test_bessel_j_vanishes_at_tabulated_root():
    assert abs(bessel_j(4, 7.5883424345038)) < 1e-12


@pytest.mark.parametrize("nu", HALF_ORDERS[1:])
def test_bessel_j_matches_scipy(nu):
    x = np.concatenate([np.linspace(0.0, 30.0, 301), np.geomspace(30.0, 1e4, 200)])
    assert np.max(np.abs(bessel_j(nu, x) - special.jv(nu, x))) < 1e-12


@pytest.mark.parametrize("nu", [0, 1, 2, 3, 0.5, 4.5, 12, 17.5])
def test_bessel_j_intermediate_range_is_accurate(nu):
    # between the ascending series and the Hankel expansion
    x = np.linspace(2.0, 20.0, 1801)
    assert np.max(np.abs(bessel_j(nu, x) - special.jv(nu, x))) < 1e-12


def test_bessel_j_keeps_scalar_and_array_shapes():
    assert isinstance(bessel_j(1, 2.0), float)
    assert bessel_j(1, np.ones((2, 3))).shape == (2, 3)


@pytest.mark.parametrize("nu", [k / 2 for k in range(1, 41)])
def test_bessel_recurrence_residual(nu):
    x = np.linspace(0.1, 100.0, 2000)
    lhs = bessel_j(nu - 1, x) + bessel_j(nu + 1, x)
    rhs = (2 * nu / x) * bessel_j(nu, x)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_bessel_j_rejects_negative_argument_and_bad_order():
    with pytest.raises(DomainError):
        bessel_j(1, -1.0)
    with pytest.raises(DomainError):
        bessel_j(0.25, 1.0)
    with pytest.raises(DomainError):
        bessel_j(-1, 1.0)


@pytest.mark.parametrize("nu", [-0.5, 0.0, 1.5, 4.0])
def test_bessel_j_scaled_limit_at_zero(nu):
    expected = 1 / (2**nu * math.gamma(nu + 1))
    assert bessel_j_scaled(nu, 0.0) == pytest.approx(expected, rel=1e-14)
    assert bessel_j_scaled(nu, 2.0) == pytest.approx(special.jv(nu, 2.0) / 2.0**nu, rel=1e-12)


def test_bessel_j_prime_matches_scipy():
    x = np.linspace(0.5, 40.0, 200)
    assert np.allclose(bessel_j_prime(2.5, x), special.jvp(2.5, x), atol=1e-10)


# ---------------------------------------------------------------------------
# zeros


@pytest.mark.parametrize(
    "nu, m, expected",
    [(0.5, 3, 3 * math.pi), (0, 1, 2.404825557695773), (4, 1, 7.588342434503804), (1, 1, 3.831705970207512)],
)
def test_bessel_root_values(nu, m, expected):
    assert bessel_root(nu, m) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.5, 10.0])
def test_roots_are_zeros_and_increasing(nu):
    roots = bessel_roots(nu, 200)
    assert np.all(np.diff(roots) > 0)
    assert np.max(np.abs(bessel_j(nu, roots))) < 1e-12
    assert roots[0] > nu


@pytest.mark.parametrize("nu", [0.0, 1.5, 4.0])
def test_roots_interlace(nu):
    inner = bessel_roots(nu, 100)
    outer = bessel_roots(nu + 1, 100)
    assert np.all(inner < outer)
    assert np.all(outer[:-1] < inner[1:])


def test_roots_approach_mcmahon():
    m = np.arange(400, 500)
    roots = bessel_roots(1.5, 500)[399:]
    assert np.max(np.abs(roots - mcmahon(1.5, m))) < 1e-9


@pytest.mark.parametrize("nu", [0.5, 1.0, 3.5])
def test_dini_root_identity(nu):
    # zeros of J_{nu+1} are zeros of x J_nu'(x) - nu J_nu(x)
    lam = bessel_roots(nu + 1, 10)
    h = 1e-6
    derivative = (bessel_j(nu, lam + h) - bessel_j(nu, lam - h)) / (2 * h)
    residual = lam * derivative - nu * bessel_j(nu, lam)
    assert np.all(np.abs(residual) < 1e-8 * lam)


def test_roots_upto_returns_exactly_the_roots_below_bound():
    roots = bessel_roots_upto(0, 50.0)
    assert roots[-1] <= 50.0 < bessel_root(0, len(roots) + 1)
    assert len(bessel_roots_upto(0, 0.0)) == 0


def test_root_index_must_be_positive():
    with pytest.raises(DomainError):
        bessel_root(0, 0)


# ---------------------------------------------------------------------------
# Laguerre


def test_laguerre_low_degree_closed_forms():
    x = np.linspace(0, 5, 11)
    a = 1.5
    assert np.allclose(laguerre(0, a, x), 1.0)
    assert np.allclose(laguerre(1, a, x), 1 + a - x)
    assert np.allclose(laguerre(2, a, x), ((a + 1) * (a + 2) - 2 * (a + 2) * x + x**2) / 2)


@pytest.mark.parametrize("alpha", [0, 0.5, 1, 3])
def test_laguerre_matches_scipy(alpha):
    x = np.linspace(0, 40, 81)
    table = laguerre_table(20, alpha, x)
    for k in (0, 5, 20):
        assert np.allclose(table[k], special.eval_genlaguerre(k, alpha, x), rtol=1e-10, atol=1e-8)


@pytest.mark.parametrize("alpha", [0, 0.5, 2])
def test_laguerre_orthogonality(alpha):
    def inner(j, k):
        value, _ = integrate.quad(
            lambda x: laguerre(j, alpha, x) * laguerre(k, alpha, x) * x**alpha * math.exp(-x), 0, math.inf, limit=200
        )
        return value

    assert abs(inner(2, 3)) < 1e-8
    norm = math.gamma(4 + alpha + 1) / math.factorial(4)
    assert inner(4, 4) == pytest.approx(norm, rel=1e-8)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("u, y", [(0.5, 0.5), (1.0, 1.0), (2.0, 3.0)])
def test_laguerre_derivative_identity(k, u, y):
    # d^k/du^k [u^(-a-1) e^(-y/u)] = k! (-1)^k u^(-a-1-k) e^(-y/u) L_k^a(y/u)
    a = 1.0
    h = 1e-3

    def g(t):
        return t ** (-a - 1) * math.exp(-y / t)

    stencil = sum((-1) ** i * math.comb(k, i) * g(u + (k / 2 - i) * h) for i in range(k + 1)) / h**k
    expected = math.factorial(k) * (-1) ** k * u ** (-a - 1 - k) * math.exp(-y / u) * laguerre(k, a, y / u)
    assert stencil == pytest.approx(expected, rel=1e-4, abs=1e-5)


@pytest.mark.parametrize("alpha", [0, 0.5, 1, 3])
def test_laguerre_scaling_limit_is_omega(alpha):
    # k^-a L_k^a(x/k) e^(-x/k) -> Omega_a(x), error shrinking in k
    x = np.linspace(0.0, 10.0, 101)
    limit = omega_kernel(alpha, x)

    def err(k):
        approx = k ** (-alpha) * laguerre_table(k, alpha, x / k)[k] * np.exp(-x / k)
        return np.max(np.abs(approx - limit))

    e100, e1000 = err(100), err(1000)
    assert e1000 < e100
    assert e1000 < 5e-2


def test_omega_kernel_continuity_at_zero():
    for alpha in (0, 0.5, 2):
        assert omega_kernel(alpha, 0.0) == pytest.approx(1 / math.gamma(alpha + 1), rel=1e-14)
        below = omega_kernel(alpha, 0.99e-4)
        above = omega_kernel(alpha, 1.01e-4)
        assert below == pytest.approx(above, rel=1e-5)


def test_omega_kernel_half_order_closed_form():
    # Omega_{1/2}(x) = x^(-1/4) J_{1/2}(2 sqrt x) = sin(2 sqrt x) / (sqrt(pi) sqrt x)
    x = np.array([0.5, 2.0, 10.0])
    expected = np.sin(2 * np.sqrt(x)) / (math.sqrt(math.pi) * np.sqrt(x))
    assert np.allclose(omega_kernel(0.5, x), expected, atol=1e-13)


# ---------------------------------------------------------------------------
# ball transform


@pytest.mark.parametrize("n", [1, 2, 3, 8])
def test_ball_ft_at_zero_is_volume(n):
    assert ball_ft(n, 0.7, 0.0) == pytest.approx(ball_volume(n, 0.7), rel=1e-13)


def test_ball_ft_one_dimensional_sinc():
    x = np.array([0.1, 0.3, 1.7])
    assert np.allclose(ball_ft(1, 1.0, x), np.sin(2 * np.pi * x) / (np.pi * x), atol=1e-13)


def test_ball_ft_rejects_non_positive_radius():
    with pytest.raises(DomainError):
        ball_ft(3, 0.0, 1.0)


def test_order_helpers():
    assert Order.for_dimension(3).nu == 0.5
    assert Order.of(1.5).twice_nu == 3
    assert str(Order(3)) == "3/2"


# ---------------------------------------------------------------------------
# property-based


@settings(max_examples=60, deadline=None, derandomize=True)
@given(twice_nu=st.integers(min_value=-1, max_value=40), x=st.floats(min_value=0.01, max_value=500.0))
def test_bessel_j_agrees_with_scipy_everywhere(twice_nu, x):
    nu = twice_nu / 2
    assert abs(bessel_j(nu, x) - special.jv(nu, x)) < 1e-12


@settings(max_examples=40, deadline=None, derandomize=True)
@given(n=st.integers(min_value=1, max_value=36), m=st.integers(min_value=1, max_value=300))
def test_root_is_sign_change(n, m):
    order = Order(n)
    root = bessel_root(order, m)
    assert abs(special.jv(order.nu, root)) < 1e-11

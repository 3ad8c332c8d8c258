"""Special-function kernel: Gamma, Bessel J of integer and half-integer order,
Bessel zeros, Laguerre polynomials and the two radial kernels built on them.

Orders are restricted to multiples of 1/2 (stored as 2*nu). Every function
accepts scalars or numpy arrays and returns the same shape; scalar input
gives a Python float back.
"""

import logging
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import special

from errors import DomainError

logger = logging.getLogger(__name__)

HANKEL_CUTOVER = 15.0  # Hankel expansion for J_0, J_1 above this
MILLER_CUTOVER = 2.0  # ascending series below, backward recurrence above
MILLER_PAD = 25
HANKEL_TERMS = 28
SCALED_SERIES_CUTOVER = 1.0
OMEGA_SERIES_CUTOVER = 1e-4
ROOT_SCAN_STEP = math.pi / 8
ROOT_SCAN_BLOCK = 4096


@dataclass(frozen=True, order=True)
class Order:
    """Order nu of a Bessel function or Laguerre weight, stored as 2*nu."""

    twice_nu: int

    def __post_init__(self):
        if self.twice_nu < -1:
            raise DomainError(f"order {Fraction(self.twice_nu, 2)} is below -1/2")

    @property
    def nu(self) -> float:
        return self.twice_nu / 2

    @property
    def is_half_integer(self) -> bool:
        return self.twice_nu % 2 != 0

    def shifted(self, k: int) -> "Order":
        return Order(self.twice_nu + 2 * k)

    @classmethod
    def of(cls, value: "Order | int | float | Fraction") -> "Order":
        if isinstance(value, Order):
            return value
        twice = Fraction(value) * 2
        if twice.denominator != 1:
            raise DomainError(f"order {value} is not a multiple of 1/2")
        return cls(int(twice))

    @classmethod
    def for_dimension(cls, n: int) -> "Order":
        """nu = n/2 - 1, the order attached to radial functions on R^n."""
        return cls(n - 2)

    def __str__(self) -> str:
        return str(Fraction(self.twice_nu, 2))


def _as_array(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _result(values: np.ndarray, scalar: bool):
    return float(values) if scalar else values


def gamma(x):
    """Gamma function; raises DomainError for x <= 0."""
    arr, scalar = _as_array(x)
    if np.any(arr <= 0) or np.any(np.isnan(arr)):
        raise DomainError("gamma is only supported for positive arguments")
    return _result(special.gamma(arr), scalar)


# ---------------------------------------------------------------------------
# Bessel J


def _series(nu: float, x: np.ndarray) -> np.ndarray:
    """Ascending series sum_k (-1)^k (x/2)^(2k+nu) / (k! Gamma(k+nu+1))."""
    half = x / 2
    h2 = half * half
    term = np.power(half, nu) / special.gamma(nu + 1)
    total = term.copy()
    for k in range(1, 400):
        term = term * (-h2 / (k * (k + nu)))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _hankel(nu: int, x: np.ndarray) -> np.ndarray:
    """Hankel asymptotic expansion for J_0 / J_1 at large x."""
    mu = 4.0 * nu * nu
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    coeff = 1.0
    inv = 1.0 / x
    power = np.ones_like(x)
    for k in range(HANKEL_TERMS):
        if k > 0:
            coeff *= (mu - (2 * k - 1) ** 2) / (k * 8.0)
            power = power * inv
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p = p + sign * coeff * power
        else:
            q = q + sign * coeff * power
    chi = x - (nu / 2 + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _upward(twice_nu: int, x: np.ndarray) -> np.ndarray:
    """Upward three-term recurrence from the base pair; stable for x >= nu."""
    if twice_nu % 2:
        amp = np.sqrt(2.0 / (math.pi * x))
        prev, cur, k = amp * np.cos(x), amp * np.sin(x), 0.5
    else:
        prev, cur, k = _hankel(0, x), _hankel(1, x), 1.0
    if twice_nu in (-1, 0):
        return prev
    nu = twice_nu / 2
    while k < nu:
        prev, cur = cur, (2 * k / x) * cur - prev
        k += 1
    return cur


def _miller(twice_nu: int, x: np.ndarray) -> np.ndarray:
    """Backward recurrence from far above max(nu, x), normalised by an exact identity.

    Integer orders use J_0 + 2 sum_k J_2k = 1; half-integer orders are fitted
    to the closed forms of J_{1/2} and J_{-1/2}.
    """
    nu = twice_nu / 2
    h = 0.5 if twice_nu % 2 else 0.0
    top = max(nu, float(np.max(x)))
    k = int(top + MILLER_PAD + 3 * math.sqrt(top))
    k_target = int(nu - h)
    k_low = -1 if h else 0
    f_next = np.zeros_like(x)
    f = np.full_like(x, 1e-30)
    want = np.zeros_like(x)
    norm = np.zeros_like(x)
    j_half = np.zeros_like(x)
    j_mhalf = np.zeros_like(x)
    while True:
        if k == k_target:
            want = f.copy()
        if h:
            if k == 0:
                j_half = f.copy()
            elif k == -1:
                j_mhalf = f.copy()
        elif k % 2 == 0:
            norm = norm + (f if k == 0 else 2 * f)
        if k == k_low:
            break
        f, f_next = (2 * (k + h) / x) * f - f_next, f
        k -= 1
        big = np.abs(f) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            f, f_next, want, norm, j_half = f * scale, f_next * scale, want * scale, norm * scale, j_half * scale
    if h:
        amp = np.sqrt(2.0 / (math.pi * x))
        fit = (amp * np.sin(x) * j_half + amp * np.cos(x) * j_mhalf) / (j_half**2 + j_mhalf**2)
        return want * fit
    return want / norm


def _bessel_j(twice_nu: int, x: np.ndarray) -> np.ndarray:
    nu = twice_nu / 2
    out = np.empty_like(x)
    if twice_nu % 2:
        recur = (x >= nu) & (x > 0)
    else:
        recur = x > max(HANKEL_CUTOVER, nu)
    if np.any(recur):
        out[recur] = _upward(twice_nu, x[recur])
    series = ~recur & (x < MILLER_CUTOVER)
    if np.any(series):
        out[series] = _series(nu, x[series])
    backward = ~recur & (x >= MILLER_CUTOVER)
    if np.any(backward):
        out[backward] = _miller(twice_nu, x[backward])
    return out


def bessel_j(order, x):
    """J_nu(x) for x >= 0 and nu a multiple of 1/2 with nu >= -1/2."""
    order = Order.of(order)
    arr, scalar = _as_array(x)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DomainError("bessel_j needs finite x >= 0")
    if order.twice_nu == -1 and np.any(arr == 0):
        raise DomainError("J_{-1/2} is unbounded at 0")
    return _result(_bessel_j(order.twice_nu, arr), scalar)


def bessel_j_scaled(order, x):
    """J_nu(x) / x^nu, continuous at 0 with value 1/(2^nu Gamma(nu+1))."""
    order = Order.of(order)
    nu = order.nu
    arr, scalar = _as_array(x)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DomainError("bessel_j_scaled needs finite x >= 0")
    out = np.empty_like(arr)
    small = arr < SCALED_SERIES_CUTOVER
    if np.any(small):
        h2 = (arr[small] / 2) ** 2
        term = np.full_like(h2, 1.0 / (2.0**nu * special.gamma(nu + 1)))
        total = term.copy()
        for k in range(1, 40):
            term = term * (-h2 / (k * (k + nu)))
            total = total + term
        out[small] = total
    big = ~small
    if np.any(big):
        out[big] = _bessel_j(order.twice_nu, arr[big]) / np.power(arr[big], nu)
    return _result(out, scalar)


def bessel_j_prime(order, x):
    """J_nu'(x) = (nu/x) J_nu(x) - J_{nu+1}(x), for x > 0."""
    order = Order.of(order)
    arr, scalar = _as_array(x)
    values = (order.nu / arr) * _bessel_j(order.twice_nu, arr) - _bessel_j(
        order.twice_nu + 2, arr
    )
    return _result(values, scalar)


# ---------------------------------------------------------------------------
# Bessel zeros


@dataclass(frozen=True)
class RootTable:
    """First len(roots) positive zeros of J_order, strictly increasing."""

    order: Order
    roots: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.roots)


_ROOT_TABLES: dict[int, RootTable] = {}
_ROOT_LOCK = threading.Lock()


def mcmahon(order, m) -> np.ndarray:
    """McMahon's large-m approximation of the m-th zero of J_nu."""
    nu = Order.of(order).nu
    m = np.asarray(m, dtype=float)
    beta = (m + nu / 2 - 0.25) * math.pi
    mu = 4 * nu * nu
    eight_beta = 8 * beta
    return (
        beta
        - (mu - 1) / eight_beta
        - 4 * (mu - 1) * (7 * mu - 31) / (3 * eight_beta**3)
    )


def _brackets(order: Order, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Sign-change intervals for the first ``count`` zeros.

    J_nu has no zeros in (0, nu] and consecutive zeros are more than a
    scan step apart, so each interval holds exactly one zero.
    """
    lo_list: list[np.ndarray] = []
    hi_list: list[np.ndarray] = []
    found = 0
    start = max(order.nu, 1e-3)
    prev_x = np.array([start])
    prev_f = _bessel_j(order.twice_nu, prev_x)
    while found < count:
        xs = prev_x[-1] + ROOT_SCAN_STEP * np.arange(1, ROOT_SCAN_BLOCK + 1)
        fs = _bessel_j(order.twice_nu, xs)
        grid_x = np.concatenate([prev_x[-1:], xs])
        grid_f = np.concatenate([prev_f[-1:], fs])
        change = np.nonzero(np.signbit(grid_f[:-1]) != np.signbit(grid_f[1:]))[0]
        lo_list.append(grid_x[change])
        hi_list.append(grid_x[change + 1])
        found += len(change)
        prev_x, prev_f = xs, fs
    lo = np.concatenate(lo_list)[:count]
    hi = np.concatenate(hi_list)[:count]
    return lo, hi


def _find_roots(order: Order, count: int) -> np.ndarray:
    lo, hi = _brackets(order, count)
    f_lo = _bessel_j(order.twice_nu, lo)
    guess = mcmahon(order, np.arange(1, count + 1))
    x = np.where((guess > lo) & (guess < hi), guess, (lo + hi) / 2)
    for _ in range(200):
        f = _bessel_j(order.twice_nu, x)
        fp = (order.nu / x) * f - _bessel_j(order.twice_nu + 2, x)
        same = np.signbit(f) == np.signbit(f_lo)
        lo = np.where(same, x, lo)
        hi = np.where(same, hi, x)
        f_lo = np.where(same, f, f_lo)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = x - f / fp
        inside = np.isfinite(newton) & (newton > lo) & (newton < hi)
        nxt = np.where(inside, newton, (lo + hi) / 2)
        nxt = np.where(f == 0, x, nxt)
        done = np.max(np.abs(nxt - x) / x) < 1e-15
        x = nxt
        if done:
            break
    else:
        logger.warning("Root refinement for J_%s stopped at the iteration cap", order)
    return x


def root_table(order, count: int) -> RootTable:
    """Cached zeros of J_order; tables only ever grow and entries never change."""
    order = Order.of(order)
    with _ROOT_LOCK:
        table = _ROOT_TABLES.get(order.twice_nu)
    if table is not None and len(table) >= count:
        return table
    size = max(count, 64, 2 * len(table) if table is not None else 0)
    roots = _find_roots(order, size)
    roots.setflags(write=False)
    new_table = RootTable(order=order, roots=roots)
    with _ROOT_LOCK:
        current = _ROOT_TABLES.get(order.twice_nu)
        if current is None or len(current) < size:
            _ROOT_TABLES[order.twice_nu] = new_table
            logger.debug("Root table J_%s extended to %d zeros", order, size)
        else:
            new_table = current
    return new_table


def bessel_roots(order, count: int) -> np.ndarray:
    """The first ``count`` positive zeros of J_order."""
    if count < 0:
        raise DomainError("count must be non-negative")
    if count == 0:
        return np.empty(0)
    return root_table(order, count).roots[:count]


def bessel_roots_upto(order, x_max: float) -> np.ndarray:
    """All positive zeros of J_order that are <= x_max."""
    order = Order.of(order)
    if x_max <= 0:
        return np.empty(0)
    count = max(16, int(x_max / math.pi + abs(order.nu) + 8))
    while True:
        roots = bessel_roots(order, count)
        if roots[-1] > x_max:
            return roots[roots <= x_max]
        count *= 2


def bessel_root(order, m: int) -> float:
    """The m-th positive zero of J_order (m >= 1)."""
    if m < 1:
        raise DomainError("root index m must be >= 1")
    return float(root_table(order, m).roots[m - 1])


# ---------------------------------------------------------------------------
# Laguerre polynomials and radial kernels


def laguerre_table(k_max: int, alpha, x) -> np.ndarray:
    """Rows L_0^alpha(x), ..., L_{k_max}^alpha(x) by the three-term recurrence."""
    a = Order.of(alpha).nu
    arr = np.asarray(x, dtype=float)
    table = np.empty((k_max + 1,) + arr.shape)
    table[0] = 1.0
    if k_max >= 1:
        table[1] = 1.0 + a - arr
    for j in range(1, k_max):
        table[j + 1] = ((2 * j + 1 + a - arr) * table[j] - (j + a) * table[j - 1]) / (j + 1)
    return table


def laguerre(k: int, alpha, x):
    """Generalized Laguerre polynomial L_k^alpha(x)."""
    if k < 0:
        raise DomainError("Laguerre degree must be non-negative")
    arr, scalar = _as_array(x)
    return _result(laguerre_table(k, alpha, arr)[k], scalar)


def omega_kernel(alpha, x):
    """x^(-alpha/2) J_alpha(2 sqrt(x)), with value 1/Gamma(alpha+1) at 0."""
    order = Order.of(alpha)
    a = order.nu
    arr, scalar = _as_array(x)
    if np.any(arr < 0):
        raise DomainError("omega_kernel needs x >= 0")
    out = np.empty_like(arr)
    small = arr < OMEGA_SERIES_CUTOVER
    if np.any(small):
        xs = arr[small]
        term = np.full_like(xs, 1.0 / special.gamma(a + 1))
        total = term.copy()
        for j in range(1, 8):
            term = term * (-xs / (j * (j + a)))
            total = total + term
        out[small] = total
    big = ~small
    if np.any(big):
        out[big] = 2.0**a * bessel_j_scaled(order, 2.0 * np.sqrt(arr[big]))
    return _result(out, scalar)


def ball_volume(n: int, radius: float = 1.0) -> float:
    return math.pi ** (n / 2) * radius**n / math.gamma(n / 2 + 1)


def ball_ft(n: int, R: float, x):
    """Fourier transform of the indicator of the radius-R ball in R^n."""
    if R <= 0:
        raise DomainError("ball radius must be positive")
    arr, scalar = _as_array(x)
    values = (2 * math.pi) ** (n / 2) * R**n * bessel_j_scaled(
        Order(n), 2 * math.pi * R * np.abs(arr)
    )
    return _result(values, scalar)

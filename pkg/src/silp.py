"""Scale-invariant Laguerre positivity (SILP).

For f on [0, inf) and a scale y > 0 the Laguerre coefficients are

    a_j(y) = j!/Gamma(j+alpha+1) * int_0^inf f(x/y) L_j^alpha(x) x^alpha e^{-x} dx,

so that f(x) ~ sum_j a_j(y) L_j^alpha(xy). f is alpha-SILP when every a_j(y)
is non-negative. Everything here certifies that on a finite (j, y) grid
only; a certified verdict says nothing about cells outside the grid.
"""

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

import config
from errors import AccuracyError, DegenerateBoundError, DomainError, PreconditionError
from models import ClosureSweepReport, SilpReport, SilpVerdict
from radial import half_line_integral, levensh_fn
from specfun import Order, laguerre_table, omega_kernel

logger = logging.getLogger(__name__)

START_NODES = 32
AGREEMENT = 1e-10
SIGN_SAMPLES = 1000
SIGN_SAMPLE_LIMIT = 1e12
BOUND_INTEGRAL_TOL = 1e-10
DEFAULT_Y_GRID = (0.25, 0.5, 1.0, 2.0, 4.0)
DEFAULT_J_MAX = 20


@dataclass(frozen=True)
class HalfLineFunction:
    """A function on [0, inf) with |f(x)| <= decay_constant (1+x)^-decay_power e^(-decay_rate x).

    ``breakpoints`` are points where f is not smooth; ``zeros`` lists sign
    changes up to a given x, both used to place quadrature panels.
    """

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    decay_constant: float | None
    decay_power: float = 0.0
    decay_rate: float = 0.0
    breakpoints: tuple[float, ...] = ()
    zeros: Callable[[float], np.ndarray] | None = None

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        values = self.evaluate(arr)
        return float(values) if arr.ndim == 0 else values

    def envelope(self, x):
        x = np.asarray(x, dtype=float)
        return self.decay_constant * (1 + x) ** (-self.decay_power) * np.exp(-self.decay_rate * x)

    def scaled(self, c: float) -> "HalfLineFunction":
        """x -> f(c x)."""
        if c <= 0:
            raise DomainError("scale must be positive")
        base = self.evaluate
        zeros = self.zeros
        return HalfLineFunction(
            name=f"{self.name}({c:g}x)",
            evaluate=lambda x: base(c * np.asarray(x, dtype=float)),
            # (1 + c x)^-p <= max(1, 1/c)^p (1 + x)^-p
            decay_constant=None if self.decay_constant is None else self.decay_constant * max(1.0, 1 / c) ** self.decay_power,
            decay_power=self.decay_power,
            decay_rate=self.decay_rate * c,
            breakpoints=tuple(b / c for b in self.breakpoints),
            zeros=(lambda upto: np.asarray(zeros(c * upto)) / c) if zeros is not None else None,
        )


# ---------------------------------------------------------------------------
# Families


def exp_fn() -> HalfLineFunction:
    """e^{-x}; a_j(y) = y^(alpha+1)/(1+y)^(j+alpha+1)."""
    return HalfLineFunction("exp", lambda x: np.exp(-np.asarray(x, dtype=float)), 1.0, decay_rate=1.0)


def exp_coefficient(alpha, j: int, y: float) -> float:
    a = Order.of(alpha).nu
    return y ** (a + 1) / (1 + y) ** (j + a + 1)


def kernel_fn(alpha, c: float = 1.0) -> HalfLineFunction:
    """omega_kernel(alpha, c x), an extreme ray of the alpha-SILP cone."""
    order = Order.of(alpha)
    if c <= 0:
        raise DomainError("kernel scale must be positive")
    a = order.nu
    # |J_a(z)| ~ sqrt(2/(pi z)) for large z, bounded by 1/Gamma(a+1) (z/2)^a near 0
    constant = max(1 / math.gamma(a + 1), 2.0 ** (a + 0.5)) * max(1.0, 1 / c) ** (a / 2 + 0.25)
    return HalfLineFunction(
        name=f"omega[{order}](c={c:g})",
        evaluate=lambda x: omega_kernel(order, c * np.asarray(x, dtype=float)),
        decay_constant=constant,
        decay_power=a / 2 + 0.25,
    )


def silp_from_measure(masses: Sequence[tuple[float, float]], alpha) -> HalfLineFunction:
    """f(x) = sum_i w_i omega_kernel(alpha, x y_i) for atoms (y_i, w_i)."""
    order = Order.of(alpha)
    masses = [(float(y), float(w)) for y, w in masses]
    if not masses:
        raise PreconditionError("at least one atom")
    for y, w in masses:
        if w < 0:
            raise PreconditionError("non-negative weights", f"weight {w} at y={y}")
        if y <= 0:
            raise PreconditionError("positive atom positions", f"y={y}")
    ys = np.array([y for y, _ in masses])
    ws = np.array([w for _, w in masses])
    kernels = [kernel_fn(order, y) for y in ys]
    constant = float(sum(w * k.decay_constant for w, k in zip(ws, kernels))) or 1.0

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return sum(w * omega_kernel(order, x * y) for y, w in zip(ys, ws))

    return HalfLineFunction(
        name=f"measure[{len(masses)} atoms]",
        evaluate=evaluate,
        decay_constant=constant,
        decay_power=kernels[0].decay_power,
    )


def levensh_pullback(n: int) -> HalfLineFunction:
    """x -> levensh(sqrt x)/levensh(0), the optimal Bessel function in squared radius."""
    if n < 1:
        raise DomainError("dimension must be >= 1")
    f = levensh_fn(n)
    f0 = f(0.0)
    base = f.evaluate

    def zeros(upto: float) -> np.ndarray:
        return np.asarray(f.zeros(math.sqrt(upto))) ** 2

    # (1+sqrt x)^-(n+eps) <= (1+x)^-((n+eps)/2)
    return HalfLineFunction(
        name=f"levensh_pullback(n={n})",
        evaluate=lambda x: base(np.sqrt(np.asarray(x, dtype=float))) / f0,
        decay_constant=f.decay.C / f0,
        decay_power=(n + f.decay.eps) / 2,
        zeros=zeros,
    )


def linear_cutoff_fn() -> HalfLineFunction:
    """1 - x on [0, 2] and 0 afterwards: sign-changing, not SILP."""

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 2, 1 - x, 0.0)

    return HalfLineFunction("linear_cutoff", evaluate, 1.0, breakpoints=(1.0, 2.0))


def damped_linear_fn() -> HalfLineFunction:
    """(1 - x) e^{-x}; a_0(y) < 0 for alpha >= 1/2 and small y."""

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return (1 - x) * np.exp(-x)

    # (1+x) e^{-x/2} <= 2/sqrt(e)
    return HalfLineFunction("damped_linear", evaluate, 1.25, decay_rate=0.5)


def multiply(f: HalfLineFunction, g: HalfLineFunction) -> HalfLineFunction:
    """Pointwise product; alpha-SILP is closed under it."""
    fe, ge = f.evaluate, g.evaluate
    constant = None if f.decay_constant is None or g.decay_constant is None else f.decay_constant * g.decay_constant
    return HalfLineFunction(
        name=f"{f.name}*{g.name}",
        evaluate=lambda x: fe(x) * ge(x),
        decay_constant=constant,
        decay_power=f.decay_power + g.decay_power,
        decay_rate=f.decay_rate + g.decay_rate,
        breakpoints=tuple(sorted(set(f.breakpoints) | set(g.breakpoints))),
    )


FAMILIES: dict[str, Callable[..., HalfLineFunction]] = {
    "exp": lambda alpha: exp_fn(),
    "kernel": lambda alpha: kernel_fn(alpha),
    "linear-cutoff": lambda alpha: linear_cutoff_fn(),
    "damped-linear": lambda alpha: damped_linear_fn(),
}


# ---------------------------------------------------------------------------
# Weighted quadrature against x^alpha e^{-x}


@lru_cache(maxsize=64)
def _gen_laguerre(N: int, a: float) -> tuple[np.ndarray, np.ndarray]:
    return special.roots_genlaguerre(N, a)


@lru_cache(maxsize=64)
def _jacobi(N: int, a: float) -> tuple[np.ndarray, np.ndarray]:
    # weight (1+t)^a on [-1, 1]
    return special.roots_jacobi(N, 0.0, a)


@lru_cache(maxsize=64)
def _legendre(N: int) -> tuple[np.ndarray, np.ndarray]:
    return special.roots_legendre(N)


@lru_cache(maxsize=64)
def _laguerre0(N: int) -> tuple[np.ndarray, np.ndarray]:
    return special.roots_laguerre(N)


def _weighted_rule(a: float, breakpoints: tuple[float, ...], N: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for int_0^inf g(x) x^a e^{-x} dx.

    Without breakpoints this is plain generalized Gauss-Laguerre. Otherwise
    the first piece carries x^a through Gauss-Jacobi, inner pieces use
    Gauss-Legendre and the last piece is a shifted Gauss-Laguerre rule.
    """
    if not breakpoints:
        return _gen_laguerre(N, a)
    xs, ws = [], []
    b0 = breakpoints[0]
    t, w = _jacobi(N, a)
    x = b0 * (1 + t) / 2
    xs.append(x)
    ws.append(w * (b0 / 2) ** (a + 1) * np.exp(-x))
    t, w = _legendre(N)
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        half = (hi - lo) / 2
        x = (lo + hi) / 2 + half * t
        xs.append(x)
        ws.append(half * w * x**a * np.exp(-x))
    last = breakpoints[-1]
    u, w = _laguerre0(N)
    x = last + u
    xs.append(x)
    ws.append(w * x**a * math.exp(-last))
    return np.concatenate(xs), np.concatenate(ws)


def integrate_moment(
    project: Callable[[np.ndarray, np.ndarray], np.ndarray],
    alpha,
    breakpoints: Sequence[float] = (),
    *,
    agreement: float = AGREEMENT,
    max_nodes: int | None = None,
) -> np.ndarray:
    """Apply project(x, w) to weighted rules of doubling size until two results agree.

    project returns sum-type reductions (a vector is fine); the result is the
    last one. Agreement is absolute below magnitude 1 and relative above it.
    """
    a = Order.of(alpha).nu
    bps = tuple(sorted(b for b in set(float(b) for b in breakpoints) if b > 0))
    max_nodes = max_nodes or config.LAGUERRE_MAX_NODES
    N = START_NODES
    previous = None
    diff = math.inf
    while N <= max_nodes:
        x, w = _weighted_rule(a, bps, N)
        current = np.atleast_1d(np.asarray(project(x, w), dtype=float))
        if previous is not None:
            diff = float(np.max(np.abs(current - previous)))
            if diff <= agreement * max(1.0, float(np.max(np.abs(current)))):
                logger.debug("Weighted quadrature converged with %d nodes per piece", N)
                return current
        previous = current
        N *= 2
    raise AccuracyError(
        f"Laguerre-weighted quadrature did not settle with {max_nodes} nodes",
        partial=previous,
        est_error=diff,
    )


def _coefficients(f: HalfLineFunction, alpha, y: float, j_max: int) -> np.ndarray:
    """a_0(y), ..., a_{j_max}(y)."""
    if y <= 0:
        raise DomainError("scale y must be positive")
    if j_max < 0:
        raise DomainError("j_max must be >= 0")
    order = Order.of(alpha)
    a = order.nu
    j = np.arange(j_max + 1)
    norm = np.exp(special.gammaln(j + 1) - special.gammaln(j + a + 1))

    def project(x, w):
        return laguerre_table(j_max, order, x) @ (w * f.evaluate(x / y))

    raw = integrate_moment(project, order, [b * y for b in f.breakpoints])
    return norm * raw


def laguerre_coeff(f: HalfLineFunction, alpha, j: int, y: float) -> float:
    if j < 0:
        raise DomainError("j must be >= 0")
    return float(_coefficients(f, alpha, y, j)[j])


def cesaro_weights(m: int, k: float) -> np.ndarray:
    """(C, k) weights binom(k+m-j, m-j)/binom(k+m, m) for j = 0..m."""
    j = np.arange(m + 1)
    return special.binom(k + m - j, m - j) / special.binom(k + m, m)


def cesaro_sum(coeffs: Sequence[float], alpha, y: float, x, k: float):
    """(C, k) mean of sum_j coeffs[j] L_j^alpha(xy) e^{-xy/2}."""
    coeffs = np.asarray(coeffs, dtype=float)
    m = len(coeffs) - 1
    xs = np.asarray(x, dtype=float)
    table = laguerre_table(m, alpha, xs * y)
    values = np.tensordot(cesaro_weights(m, k) * coeffs, table, axes=1) * np.exp(-xs * y / 2)
    return float(values) if xs.ndim == 0 else values


def cesaro_mean(f: HalfLineFunction, alpha, y: float, x, m: int, k: float | None = None):
    """sigma_m f(x), converging uniformly to f(x) e^{-xy/2} when k > alpha + 1/2."""
    a = Order.of(alpha).nu
    k = a + 1 if k is None else k
    if not k > a + 0.5:
        raise PreconditionError("k > alpha + 1/2", f"k={k}, alpha={a}")
    if m < 0:
        raise DomainError("m must be >= 0")
    return cesaro_sum(_coefficients(f, alpha, y, m), alpha, y, x, k)


def generating_function_residual(f: HalfLineFunction, alpha, y: float, t: float, J: int) -> float:
    """|sum_{j<=J} t^j A_j - (1-t)^(-alpha-1) int f(x/y) x^alpha e^{-x/(1-t)} dx|, A_j unnormalized.

    The right side is computed as int f((1-t)u/y) u^alpha e^{-u} du.
    """
    if abs(t) >= 1:
        raise DomainError("|t| must be < 1")
    order = Order.of(alpha)
    a = order.nu
    j = np.arange(J + 1)
    unnormalized = _coefficients(f, order, y, J) * np.exp(special.gammaln(j + a + 1) - special.gammaln(j + 1))
    partial = math.fsum((unnormalized * t**j).tolist())
    closed = integrate_moment(
        lambda u, w: w @ f.evaluate((1 - t) * u / y),
        order,
        [b * y / (1 - t) for b in f.breakpoints],
    )[0]
    return abs(partial - float(closed))


# ---------------------------------------------------------------------------
# Certification


def _row(f: HalfLineFunction, alpha, j_max: int, y: float) -> tuple[np.ndarray, bool]:
    try:
        return _coefficients(f, alpha, y, j_max), True
    except AccuracyError as exc:
        logger.warning("SILP coefficients of %s at y=%g did not converge (diff %.3g)", f.name, y, exc.est_error)
        return np.asarray(exc.partial, dtype=float), False


def silp_check(
    f: HalfLineFunction,
    alpha,
    y_grid: Sequence[float] = DEFAULT_Y_GRID,
    j_max: int = DEFAULT_J_MAX,
    *,
    tol: float | None = None,
    workers: int | None = None,
) -> SilpReport:
    """Coefficient matrix over the grid with a verdict.

    violation-found iff min_coeff < -tol; rows whose quadrature did not
    settle keep their best values and turn a clean grid into inconclusive.
    """
    if f.decay_constant is None:
        raise PreconditionError("decay metadata supplied", f.name)
    order = Order.of(alpha)
    tol = config.default_tolerance() if tol is None else tol
    ys = [float(y) for y in y_grid]
    if not ys or any(y <= 0 for y in ys):
        raise DomainError("y grid must be non-empty and positive")
    with ThreadPoolExecutor(max_workers=workers or config.WORKERS) as pool:
        rows = list(pool.map(lambda y: _row(f, order, j_max, y), ys))
    coeffs = [row.tolist() for row, _ in rows]
    unconverged = [y for y, (_, ok) in zip(ys, rows) if not ok]
    min_coeff = float(min(min(row) for row in coeffs))
    if min_coeff < -tol:
        verdict = SilpVerdict.VIOLATION
    elif unconverged:
        verdict = SilpVerdict.INCONCLUSIVE
    else:
        verdict = SilpVerdict.CERTIFIED
    logger.info("silp_check %s alpha=%s: %s (min %.3g)", f.name, order, verdict.value, min_coeff)
    return SilpReport(
        alpha=order.nu,
        y_grid=ys,
        j_max=j_max,
        coeffs=coeffs,
        min_coeff=min_coeff,
        verdict=verdict,
        tolerance=tol,
        unconverged_cells=unconverged,
    )


def random_measure(rng: np.random.Generator, alpha, atoms: int = 3, y_range: tuple[float, float] = (0.25, 2.0)) -> HalfLineFunction:
    """silp_from_measure with atom positions uniform in y_range and weights uniform in (0, 1]."""
    ys = rng.uniform(*y_range, size=atoms)
    ws = 1.0 - rng.uniform(0.0, 1.0, size=atoms)
    return silp_from_measure(list(zip(ys, ws)), alpha)


def product_closure_sweep(
    alpha,
    pairs: int,
    rng: np.random.Generator,
    y_grid: Sequence[float] = DEFAULT_Y_GRID,
    j_max: int = DEFAULT_J_MAX,
    *,
    tol: float | None = None,
) -> ClosureSweepReport:
    """silp_check on the products of ``pairs`` random measure pairs."""
    order = Order.of(alpha)
    tol = config.default_tolerance() if tol is None else tol
    if pairs < 1:
        raise DomainError("need at least one pair")
    reports = []
    for i in range(pairs):
        f, g = random_measure(rng, order), random_measure(rng, order)
        reports.append(silp_check(multiply(f, g), order, y_grid, j_max, tol=tol))
        logger.debug("closure pair %d: min coefficient %.3g", i, reports[-1].min_coeff)
    verdicts = {r.verdict for r in reports}
    if SilpVerdict.VIOLATION in verdicts:
        verdict = SilpVerdict.VIOLATION
    elif SilpVerdict.INCONCLUSIVE in verdicts:
        verdict = SilpVerdict.INCONCLUSIVE
    else:
        verdict = SilpVerdict.CERTIFIED
    min_coeffs = [r.min_coeff for r in reports]
    return ClosureSweepReport(
        alpha=order.nu,
        pairs=pairs,
        min_coeffs=min_coeffs,
        min_coeff=min(min_coeffs),
        verdict=verdict,
        tolerance=tol,
    )


def _sign_samples(f: HalfLineFunction, tol: float) -> np.ndarray:
    """Geometric grid on [1, X], X where the decay envelope drops below tol."""
    X = 1e3
    while X < SIGN_SAMPLE_LIMIT and float(f.envelope(X)) > tol:
        X *= 10
    return np.geomspace(1.0, X, SIGN_SAMPLES)


def silp_bound(f: HalfLineFunction, n: int, *, tol: float | None = None, certify: bool = True) -> float:
    """Center density bound Gamma(n/2) / (2^n pi^(n/2) int_0^inf f(x) x^(n/2-1) dx).

    Hypotheses: n > 1, f(0) = 1, f <= 0 on [1, inf) and f (n/2-1)-SILP.
    """
    tol = config.default_tolerance() if tol is None else tol
    if n <= 1:
        raise PreconditionError("n > 1", f"n = {n}")
    if f.decay_constant is None:
        raise PreconditionError("decay metadata supplied", f.name)
    alpha = Order.for_dimension(n)
    a = alpha.nu
    f0 = f(0.0)
    if abs(f0 - 1) > 1e-12:
        raise PreconditionError("f(0) = 1", f"f(0) = {f0!r}")
    xs = _sign_samples(f, tol)
    worst = float(np.max(f.evaluate(xs)))
    if worst > tol:
        where = float(xs[int(np.argmax(f.evaluate(xs)))])
        raise PreconditionError("f(x) <= 0 for x >= 1", f"f({where:.6g}) = {worst:.3g}")
    if certify:
        report = silp_check(f, alpha, tol=tol)
        if report.verdict == SilpVerdict.VIOLATION:
            raise PreconditionError(f"f is {alpha}-SILP", f"coefficient {report.min_coeff:.3g} on the grid")
        if report.verdict == SilpVerdict.INCONCLUSIVE:
            logger.warning("SILP certification of %s inconclusive at y=%s", f.name, report.unconverged_cells)

    p = f.decay_power
    if f.decay_rate == 0 and p <= a + 1:
        raise PreconditionError("decay faster than x^(-n/2)", f"power {p}")

    def tail(X: float) -> float:
        if f.decay_rate > 0:
            rate = f.decay_rate
            return f.decay_constant * math.gamma(a + 1) * special.gammaincc(a + 1, rate * X) / rate ** (a + 1)
        return f.decay_constant * X ** (a + 1 - p) / (p - a - 1)

    def breaks_upto(R: float) -> np.ndarray:
        pts = [np.arange(0.5, min(R, 8.0), 0.5), np.geomspace(8.0, max(R, 8.0), 64), np.asarray(f.breakpoints, dtype=float)]
        if f.zeros is not None:
            pts.append(np.asarray(f.zeros(R), dtype=float))
        return np.concatenate(pts)

    integral, est_error, _ = half_line_integral(
        lambda x: f.evaluate(x) * x**a,
        breaks_upto=breaks_upto,
        tail_bound=tail,
        tol=BOUND_INTEGRAL_TOL,
    )
    if integral <= 0:
        raise DegenerateBoundError(f"int f(x) x^{a:g} dx = {integral:.6g} is not positive")
    bound = math.gamma(n / 2) / (2**n * math.pi ** (n / 2) * integral)
    logger.debug("silp_bound(%s, n=%d) = %.12g (integral error %.2g)", f.name, n, bound, est_error)
    return bound

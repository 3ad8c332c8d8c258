"""Radial functions on R^n and their Fourier transforms.

Transforms use the convention fhat(t) = integral of f(x) e^{2 pi i <t, x>} dx,
which for radial f reduces to

    fhat(t) = 2 pi t^(-nu) int_0^inf f(s) s^(nu+1) J_nu(2 pi t s) ds,   nu = n/2 - 1.

The kernel is evaluated as 2 pi (2 pi)^nu s^(n-1) J_nu(z)/z^nu, which is the
same expression and stays finite at t = 0.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, special

import config
from errors import AccuracyError, DomainError
from models import TransformResult
from specfun import (
    Order,
    ball_ft,
    ball_volume,
    bessel_j_prime,
    bessel_j_scaled,
    bessel_root,
    bessel_roots_upto,
)

logger = logging.getLogger(__name__)

PANEL_WIDTH = 0.5
LOW_ORDER = 20
HIGH_ORDER = 40
REFINE_SPLIT = 8
LEVENSH_TAYLOR_WINDOW = 1e-5
# |J_nu(x)| <= LANDAU_B * x^(-1/3) for nu >= 0, x > 0
LANDAU_B = 0.6749

ZerosFn = Callable[[float], np.ndarray]


@dataclass(frozen=True)
class Decay:
    """Envelope |f(r)| <= C (1+r)^(-n-eps), or C exp(-a r^2) when gaussian_rate a is set."""

    C: float
    eps: float
    gaussian_rate: float | None = None
    heuristic: bool = False

    def __post_init__(self):
        if self.C <= 0 or self.eps <= 0:
            raise DomainError("decay constants must be positive")


@dataclass(frozen=True)
class RadialFunction:
    n: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    decay: Decay
    band_limit: float | None = None
    name: str = "f"
    transform: Callable[[np.ndarray], np.ndarray] | None = None
    fhat0: float | None = None
    zeros: ZerosFn | None = None  # zeros of f in (0, R]
    support: float | None = None  # f(r) = 0 for r > support
    transform_decay: Decay | None = None  # envelope of fhat, when known

    def __call__(self, r):
        arr = np.asarray(r, dtype=float)
        values = self.evaluate(np.abs(arr))
        return float(values) if arr.ndim == 0 else values

    def envelope(self, r):
        """Decay bound at radius r."""
        r = np.asarray(r, dtype=float)
        if self.decay.gaussian_rate is not None:
            return self.decay.C * np.exp(-self.decay.gaussian_rate * r * r)
        return self.decay.C * (1 + r) ** (-self.n - self.decay.eps)

    def scaled(self, c: float) -> "RadialFunction":
        """r -> c * f(r); every LP ratio is unchanged."""
        if c <= 0:
            raise DomainError("scale factor must be positive")
        base = self.evaluate
        transform = self.transform
        return replace(
            self,
            evaluate=lambda r: c * base(r),
            decay=replace(self.decay, C=c * self.decay.C),
            transform=(lambda t: c * transform(t)) if transform is not None else None,
            fhat0=c * self.fhat0 if self.fhat0 is not None else None,
            transform_decay=replace(self.transform_decay, C=c * self.transform_decay.C) if self.transform_decay is not None else None,
            name=f"{c:g}*{self.name}",
        )


def _fit_decay(evaluate: Callable, n: int, eps: float, r_max: float, points: int = 20000) -> Decay:
    """Envelope constant fitted on a grid with a 10% margin; flagged heuristic."""
    r = np.linspace(0.0, r_max, points)
    ratio = np.abs(evaluate(r)) * (1 + r) ** (n + eps)
    return Decay(C=1.1 * float(np.max(ratio)), eps=eps, heuristic=True)


# ---------------------------------------------------------------------------
# Panel quadrature on [0, inf)

_GL_NODES: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _GL_NODES:
        _GL_NODES[order] = np.polynomial.legendre.leggauss(order)
    return _GL_NODES[order]


def _panel_sums(integrand: Callable, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mid = (a + b) / 2
    half = (b - a) / 2
    sums = []
    for order in (LOW_ORDER, HIGH_ORDER):
        nodes, weights = gauss_legendre(order)
        x = mid[:, None] + half[:, None] * nodes[None, :]
        values = integrand(x.ravel()).reshape(x.shape)
        sums.append(half * (values @ weights))
    return sums[1], np.abs(sums[1] - sums[0])


def _integrate_panels(integrand: Callable, edges: np.ndarray, tol: float) -> tuple[np.ndarray, float]:
    a, b = edges[:-1], edges[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    values, errors = _panel_sums(integrand, a, b)
    threshold = 1e-3 * tol
    bad = np.nonzero(errors > threshold)[0]
    if len(bad):
        fractions = np.linspace(0.0, 1.0, REFINE_SPLIT + 1)
        sub = a[bad, None] + (b[bad] - a[bad])[:, None] * fractions[None, :]
        sub_values, sub_errors = _panel_sums(integrand, sub[:, :-1].ravel(), sub[:, 1:].ravel())
        values[bad] = sub_values.reshape(len(bad), REFINE_SPLIT).sum(axis=1)
        errors[bad] = sub_errors.reshape(len(bad), REFINE_SPLIT).sum(axis=1)
    unresolved = float(errors[errors > threshold].sum())
    return values, unresolved


def half_line_integral(
    integrand: Callable[[np.ndarray], np.ndarray],
    *,
    breaks_upto: Callable[[float], np.ndarray],
    tail_bound: Callable[[float], float],
    tol: float,
    max_panels: int | None = None,
    start: float = 4.0,
    support: float | None = None,
) -> tuple[float, float, float]:
    """Integrate over [0, inf) panel by panel, doubling the range until the tail bound is below tol.

    Returns (value, est_error, radius reached). est_error is the magnitude of
    the last panel plus the tail bound plus any panel error that refinement
    could not resolve.
    """
    max_panels = max_panels or config.RADIAL_MAX_PANELS
    pieces: list[float] = []
    unresolved = 0.0
    lo = 0.0
    hi = start if support is None else min(start, support)
    while True:
        pts = np.asarray(breaks_upto(hi), dtype=float)
        pts = np.unique(pts[(pts > lo) & (pts < hi)])
        edges = np.concatenate([[lo], pts, [hi]])
        values, bad = _integrate_panels(integrand, edges, tol)
        pieces.extend(values.tolist())
        unresolved += bad
        last = abs(float(values[-1])) if len(values) else 0.0
        finished = support is not None and hi >= support
        tail = 0.0 if finished else float(tail_bound(hi))
        value = math.fsum(pieces)
        est_error = last + tail + unresolved
        if finished or tail <= tol:
            logger.debug("Integral done: %d panels up to %.4g, est_error %.3g", len(pieces), hi, est_error)
            return value, est_error, hi
        if len(pieces) > max_panels:
            raise AccuracyError(
                f"integral did not converge within {max_panels} panels (radius {hi:.4g})",
                partial=value,
                est_error=est_error,
            )
        lo = hi
        hi = 2 * hi if support is None else min(2 * hi, support)


# ---------------------------------------------------------------------------
# Radial Fourier transform


def _sphere_area(n: int) -> float:
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def _transform_tail(f: RadialFunction, t: float) -> Callable[[float], float]:
    n = f.n
    decay = f.decay
    area = _sphere_area(n)
    if decay.gaussian_rate is not None:
        a = decay.gaussian_rate

        def gaussian_tail(S: float) -> float:
            return decay.C * area * math.gamma(n / 2) * special.gammaincc(n / 2, a * S * S) / (2 * a ** (n / 2))

        return gaussian_tail

    nu = (n - 2) / 2
    eps = decay.eps

    def power_tail(S: float) -> float:
        # (1+s)^(-n-eps) s^(n-1) <= s^(-1-eps), |J_nu(z)/z^nu| <= 1/(2^nu Gamma(nu+1))
        bound = decay.C * area * S ** (-eps) / eps
        if t > 0:
            b, kappa = (LANDAU_B, 1 / 3) if nu >= 0 else (math.sqrt(2 / math.pi), 0.5)
            expo = -n / 2 - eps - kappa
            if expo < -1:
                alt = decay.C * 2 * math.pi * t ** (-nu) * b * (2 * math.pi * t) ** (-kappa)
                alt *= S ** (expo + 1) / (-expo - 1)
                bound = min(bound, alt)
        return bound

    return power_tail


def radial_ft(f: RadialFunction, t: float, *, tol: float | None = None, max_panels: int | None = None) -> TransformResult:
    """Numeric radial Fourier transform of f at radius t."""
    t = float(t)
    if t < 0:
        raise DomainError("transform radius must be non-negative")
    tol = config.default_tolerance() if tol is None else tol
    n = f.n
    order = Order.for_dimension(n)
    scale = 2 * math.pi * (2 * math.pi) ** order.nu
    arg = 2 * math.pi * t

    def integrand(s: np.ndarray) -> np.ndarray:
        return scale * s ** (n - 1) * f.evaluate(s) * bessel_j_scaled(order, arg * s)

    def breaks_upto(R: float) -> np.ndarray:
        pts = [np.arange(PANEL_WIDTH, R, PANEL_WIDTH)]
        if t > 0:
            pts.append(bessel_roots_upto(order, arg * R) / arg)
        if f.zeros is not None:
            pts.append(np.asarray(f.zeros(R), dtype=float))
        return np.concatenate(pts)

    heuristic = f.decay.heuristic and f.support is None
    try:
        value, est_error, _ = half_line_integral(
            integrand,
            breaks_upto=breaks_upto,
            tail_bound=_transform_tail(f, t),
            tol=tol,
            max_panels=max_panels,
            support=f.support,
        )
    except AccuracyError as exc:
        partial = TransformResult(radius=t, value=exc.partial, est_error=exc.est_error, heuristic=heuristic)
        raise AccuracyError(f"radial_ft({f.name}, {t}): {exc}", partial=partial, est_error=exc.est_error) from exc
    return TransformResult(radius=t, value=value, est_error=est_error, heuristic=heuristic)


def transformed(f: RadialFunction, decay: Decay | None = None, *, band_limit: float | None = None, tol: float | None = None) -> RadialFunction:
    """The numeric transform of f, wrapped as a RadialFunction (one radial_ft per point).

    Without ``decay`` the envelope is fitted on a grid; for band-limited f the
    result is supported in the ball of radius f.band_limit.
    """

    def evaluate(r: np.ndarray) -> np.ndarray:
        flat = np.atleast_1d(r).ravel()
        support = f.band_limit if f.band_limit is not None else math.inf
        values = np.array([radial_ft(f, float(x), tol=tol).value if x < support else 0.0 for x in flat])
        return values.reshape(np.shape(r))

    if decay is None:
        reach = f.band_limit if f.band_limit is not None else 50.0
        decay = _fit_decay(evaluate, f.n, 1.0, r_max=reach, points=200)

    return RadialFunction(
        n=f.n,
        evaluate=evaluate,
        decay=decay,
        band_limit=band_limit,
        name=f"ft[{f.name}]",
        transform=f.evaluate,
        support=f.band_limit,
        fhat0=f(0.0),
        transform_decay=f.decay,
    )


# ---------------------------------------------------------------------------
# Concrete families


def gaussian_fn(n: int, s: float = 1.0) -> RadialFunction:
    """exp(-pi s r^2); its transform is s^(-n/2) exp(-pi t^2 / s)."""
    if s <= 0:
        raise DomainError("Gaussian scale must be positive")
    return RadialFunction(
        n=n,
        evaluate=lambda r: np.exp(-math.pi * s * np.asarray(r) ** 2),
        decay=Decay(C=1.0, eps=1.0, gaussian_rate=math.pi * s),
        name=f"gaussian(s={s:g})",
        transform=lambda t: s ** (-n / 2) * np.exp(-math.pi * np.asarray(t) ** 2 / s),
        fhat0=s ** (-n / 2),
        transform_decay=Decay(C=s ** (-n / 2), eps=1.0, gaussian_rate=math.pi / s),
    )


def ball_fn(n: int, R: float) -> RadialFunction:
    """Indicator of the closed ball of radius R."""
    if R <= 0:
        raise DomainError("ball radius must be positive")
    return RadialFunction(
        n=n,
        evaluate=lambda r: (np.asarray(r) <= R).astype(float),
        decay=Decay(C=(1 + R) ** (n + 1), eps=1.0),
        name=f"ball(R={R:g})",
        transform=lambda t: ball_ft(n, R, t),
        fhat0=ball_volume(n, R),
        support=R,
    )


def _lens(n: int, R: float, t) -> np.ndarray:
    """vol(B_R intersect B_R + t): the autocorrelation of the radius-R ball."""
    t = np.abs(np.asarray(t, dtype=float))
    inside = np.clip(1 - (t / (2 * R)) ** 2, 0.0, 1.0)
    return np.where(t < 2 * R, ball_volume(n, R) * special.betainc((n + 1) / 2, 0.5, inside), 0.0)


def lens_fn(n: int, r: float) -> RadialFunction:
    """Closed-form transform of autocorr_fn(n, r), supported on [0, r]."""
    R = r / 2
    return RadialFunction(
        n=n,
        evaluate=lambda t: _lens(n, R, t),
        decay=Decay(C=ball_volume(n, R) * (1 + r) ** (n + 1), eps=1.0),
        name=f"lens(r={r:g})",
        transform=lambda x: ball_ft(n, R, x) ** 2,
        fhat0=ball_volume(n, R) ** 2,
        support=r,
    )


def autocorr_fn(n: int, r: float, power: int = 1) -> RadialFunction:
    """ball_ft(n, R, x)^(2 power) with R = r/(2 power): non-negative, band-limited to B_r.

    power=1 is the autocorrelation of the radius-r/2 ball indicator; power=2
    decays like |x|^(-2n-2) and is the preferred test function when a sum over
    its samples must converge quickly.
    """
    if r <= 0:
        raise DomainError("band limit must be positive")
    if power not in (1, 2):
        raise DomainError("autocorr power must be 1 or 2")
    R = r / (2 * power)
    order = Order(n)

    def evaluate(x: np.ndarray) -> np.ndarray:
        return ball_ft(n, R, x) ** (2 * power)

    def zeros(upto: float) -> np.ndarray:
        return bessel_roots_upto(order, 2 * math.pi * R * upto) / (2 * math.pi * R)

    if power == 1:
        transform = lambda t: _lens(n, R, t)  # noqa: E731
        fhat0 = ball_volume(n, R)
    else:
        transform = None
        area = _sphere_area(n)
        integral, _ = integrate.quad(lambda s: _lens(n, R, s) ** 2 * s ** (n - 1), 0.0, 2 * R, epsabs=0, epsrel=1e-13, limit=200)
        fhat0 = area * integral

    eps = power * (n + 1) - n
    return RadialFunction(
        n=n,
        evaluate=evaluate,
        decay=_fit_decay(evaluate, n, eps, r_max=400.0 / r),
        band_limit=r,
        name=f"autocorr(r={r:g}, power={power})",
        transform=transform,
        fhat0=fhat0,
        zeros=zeros,
    )


def levensh_fn(n: int) -> RadialFunction:
    """J_{n/2}(j r)^2 / ((1 - r^2) r^n) with j the first zero of J_{n/2}.

    Band-limited to radius j/pi, non-positive for r >= 1, zero at every
    r = lambda_m / j. The value at r = 0 comes from the J(x)/x^nu series;
    within LEVENSH_TAYLOR_WINDOW of r = 1 the numerator is expanded around j.
    """
    if n < 1:
        raise DomainError("dimension must be >= 1")
    order = Order(n)
    j = bessel_root(order, 1)
    amp = j ** (n / 2)
    slope = bessel_j_prime(order, j)

    def evaluate(r: np.ndarray) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        out = np.empty_like(r)
        near = np.abs(r - 1) < LEVENSH_TAYLOR_WINDOW
        far = ~near
        if np.any(far):
            rf = r[far]
            out[far] = (amp * bessel_j_scaled(order, j * rf)) ** 2 / (1 - rf * rf)
        if np.any(near):
            d = r[near] - 1
            # J(j(1+d)) = J'(j) j d (1 - d/2) + O(d^3), since J'' = -J'/x at a zero
            out[near] = -(slope * j) ** 2 * d * (1 - d / 2) ** 2 / ((2 + d) * r[near] ** n)
        return out

    def zeros(upto: float) -> np.ndarray:
        return bessel_roots_upto(order, j * upto) / j

    decay = _fit_decay(evaluate, n, 3.0, r_max=200.0)
    logger.debug("levensh_fn(%d): fitted decay C=%.4g (heuristic)", n, decay.C)
    return RadialFunction(
        n=n,
        evaluate=evaluate,
        decay=decay,
        band_limit=j / math.pi,
        name=f"levensh(n={n})",
        zeros=zeros,
    )

"""LP bounds and band-limited quadrature.

For radial f on R^n with fhat supported in B_r(0), with lambda_m the positive
zeros of J_{n/2}:

    fhat(0) = w0 f(0) + sum_m w_m f(lambda_m / (pi r)),
    w0  = Gamma(n/2+1) 2^n / (pi^(n/2) r^n),
    w_m = 4 lambda_m^(n-2) / (Gamma(n/2) pi^(n/2) r^n J_{n/2-1}(lambda_m)^2).

The same zeros sampled at half the spacing recover fhat on [0, r) through a
Dini series.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

import config
from errors import AccuracyError, PreconditionError
from models import BoundResult, BoundSource, FhatProvenance, QuadratureEstimate
from radial import RadialFunction, levensh_fn, radial_ft
from specfun import Order, bessel_j, bessel_j_scaled, bessel_root, bessel_roots, gamma

logger = logging.getLogger(__name__)

DEFAULT_NODES = 400
NODE_TAIL_TARGET = 1e-10
HYPOTHESIS_SAMPLES = 10000
BAND_SLACK = 1e-12
EMPIRICAL_BLOCK = 0.25


@dataclass(frozen=True)
class QuadratureRule:
    n: int
    r: float
    M: int
    nodes: np.ndarray
    w0: float
    weights: np.ndarray

    def __post_init__(self):
        if len(self.nodes) != self.M or len(self.weights) != self.M:
            raise ValueError("rule needs exactly M nodes and weights")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if self.w0 <= 0 or np.any(self.weights <= 0):
            raise ValueError("weights must be positive")


def bgf_rule(n: int, r: float, M: int) -> QuadratureRule:
    if n < 1 or r <= 0 or M < 1:
        raise PreconditionError("n >= 1, r > 0, M >= 1", f"n={n}, r={r}, M={M}")
    lam = bessel_roots(Order(n), M)
    jv = bessel_j(Order.for_dimension(n), lam)
    scale = math.pi ** (n / 2) * r**n
    w0 = gamma(n / 2 + 1) * 2**n / scale
    weights = 4 * lam ** (n - 2) / (gamma(n / 2) * scale * jv**2)
    return QuadratureRule(n=n, r=r, M=M, nodes=lam / (math.pi * r), w0=w0, weights=weights)


def _sphere_area(n: int) -> float:
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def _envelope_tail(f: RadialFunction, x_last: float) -> float:
    """Node sums beyond x_last behave like the radial integral of the envelope."""
    n = f.n
    decay = f.decay
    if decay.gaussian_rate is not None:
        a = decay.gaussian_rate
        return decay.C * _sphere_area(n) * math.gamma(n / 2) * special.gammaincc(n / 2, a * x_last**2) / (2 * a ** (n / 2))
    return decay.C * _sphere_area(n) * x_last ** (-decay.eps) / decay.eps


def _empirical_tail(terms: np.ndarray, eps: float) -> float:
    """Fit |t_m| <= K m^(-1-eps) on the last block and sum the fit beyond M."""
    M = len(terms)
    start = max(0, int(M * (1 - EMPIRICAL_BLOCK)))
    m = np.arange(start + 1, M + 1)
    K = float(np.max(np.abs(terms[start:]) * m ** (1 + eps)))
    return K * M ** (-eps) / eps


def _tail_estimate(f: RadialFunction, terms: np.ndarray, x_last: float) -> tuple[float, bool]:
    """Smaller of the envelope and fitted tails, and whether the result rests on a fit."""
    envelope = _envelope_tail(f, x_last)
    empirical = _empirical_tail(terms, f.decay.eps)
    if empirical < envelope:
        return empirical, True
    return envelope, f.decay.heuristic


def _check_band(f: RadialFunction, r: float) -> None:
    if f.band_limit is None:
        raise PreconditionError("supp fhat in B_r", f"{f.name} carries no band limit")
    if f.band_limit > r * (1 + BAND_SLACK):
        raise PreconditionError("supp fhat in B_r", f"band limit {f.band_limit:.12g} > r = {r:.12g}")


def bgf_apply(rule: QuadratureRule, f: RadialFunction, *, tol: float | None = None) -> QuadratureEstimate:
    """w0 f(0) + sum_m w_m f(node_m), which equals fhat(0) for band-limited f."""
    tol = config.default_tolerance() if tol is None else tol
    if f.n != rule.n:
        raise PreconditionError("matching dimension", f"rule n={rule.n}, function n={f.n}")
    _check_band(f, rule.r)
    terms = rule.weights * f.evaluate(rule.nodes)
    head = rule.w0 * f(0.0)
    value = math.fsum([head, *terms.tolist()])
    tail, heuristic = _tail_estimate(f, terms, float(rule.nodes[-1]))
    logger.debug("bgf_apply %s n=%d r=%g M=%d: %.15g (tail %.3g)", f.name, rule.n, rule.r, rule.M, value, tail)
    if tail > tol * max(1.0, abs(value)):
        raise AccuracyError(
            f"quadrature tail {tail:.3g} above tolerance with M={rule.M}",
            partial=QuadratureEstimate(value=value, tail_estimate=tail, terms=rule.M, heuristic=heuristic),
            est_error=tail,
        )
    return QuadratureEstimate(value=value, tail_estimate=tail, terms=rule.M, heuristic=heuristic)


def choose_node_count(n: int, r: float, f: RadialFunction, *, target: float = NODE_TAIL_TARGET) -> int:
    """Smallest M = 100 * 2^k whose tail estimate is below target relative to the sum.

    Capped at LP_SPHERE_MAX_NODES; the cap is returned with a warning when
    no smaller M qualifies.
    """
    _check_band(f, r)
    f0 = f(0.0)
    M = 100
    while M <= config.BGF_MAX_NODES:
        rule = bgf_rule(n, r, M)
        terms = rule.weights * f.evaluate(rule.nodes)
        value = rule.w0 * f0 + float(np.sum(terms))
        tail, _ = _tail_estimate(f, terms, float(rule.nodes[-1]))
        if tail <= target * max(1.0, abs(value)):
            logger.debug("choose_node_count %s n=%d r=%g: M=%d (tail %.3g)", f.name, n, r, M, tail)
            return M
        M *= 2
    logger.warning("Tail estimate of %s stays above %.1g up to %d nodes", f.name, target, config.BGF_MAX_NODES)
    return config.BGF_MAX_NODES


def dini_samples(f: RadialFunction, r: float, M: int) -> tuple[float, np.ndarray]:
    """f(0) and f(lambda_m / (2 pi r)) for m = 1..M."""
    lam = bessel_roots(Order(f.n), M)
    return f(0.0), f.evaluate(lam / (2 * math.pi * r))


def dini_interpolate(
    n: int,
    r: float,
    samples: tuple[float, np.ndarray],
    u: float,
    *,
    f: RadialFunction | None = None,
    tol: float | None = None,
) -> QuadratureEstimate:
    """fhat(r u) from the truncated Dini series over the given samples.

    With ``f`` given, its decay metadata bounds the truncation error and an
    estimate above tol raises AccuracyError; without it only the empirical
    fit of the last terms is used.
    """
    if not 0 <= u < 1:
        raise PreconditionError("u in [0, 1)", f"u = {u}")
    tol = config.default_tolerance() if tol is None else tol
    f0, values = samples
    values = np.asarray(values, dtype=float)
    M = len(values)
    order = Order.for_dimension(n)
    nu = order.nu
    lam = bessel_roots(Order(n), M)
    jv2 = bessel_j(order, lam) ** 2
    x = lam / (2 * math.pi * r)
    # J_nu(lam u)/u^nu = lam^nu (J_nu(z)/z^nu) at z = lam u
    coeffs = 2 * x**nu / jv2 * lam**nu
    terms = coeffs * values * bessel_j_scaled(order, lam * u)
    head = 2 * gamma(nu + 2) / (math.pi * r) ** nu * f0
    denom = 2 * math.pi * r ** (nu + 2)
    value = math.fsum([head, *terms.tolist()]) / denom
    bound_terms = coeffs * np.abs(values) / (2**nu * gamma(nu + 1)) / denom
    if f is not None:
        tail, heuristic = _tail_estimate(f, bound_terms, float(x[-1]))
    else:
        tail, heuristic = _empirical_tail(bound_terms, 1.0), True
    if tail > tol * max(1.0, abs(value)):
        raise AccuracyError(
            f"Dini truncation estimate {tail:.3g} above tolerance with M={M}",
            partial=QuadratureEstimate(value=value, tail_estimate=tail, terms=M, heuristic=heuristic),
            est_error=tail,
        )
    return QuadratureEstimate(value=value, tail_estimate=tail, terms=M, heuristic=heuristic)


def _sign_grid(f: RadialFunction, tol: float) -> np.ndarray:
    cutoff = 10.0
    while cutoff < 1e8 and float(f.envelope(cutoff)) > tol:
        cutoff *= 2
    return np.unique(np.concatenate([np.linspace(1.0, 10.0, HYPOTHESIS_SAMPLES), np.geomspace(10.0, max(cutoff, 10.0), HYPOTHESIS_SAMPLES)]))


def lp_bound(
    f: RadialFunction,
    fhat0: float,
    *,
    provenance: FhatProvenance = FhatProvenance.CLOSED_FORM,
    certificate: str | None = None,
    fhat0_error: float = 0.0,
    heuristic: bool = False,
    tol: float | None = None,
) -> BoundResult:
    """Center density bound f(0) / (2^n fhat(0)).

    f <= 0 on |x| >= 1 is checked on samples plus the decay envelope;
    fhat >= 0 is the caller's claim and is recorded as ``certificate``.
    The result is flagged heuristic when f carries a fitted envelope or the
    caller says fhat0 came from one.
    """
    tol = config.default_tolerance() if tol is None else tol
    n = f.n
    if not fhat0 > 0:
        raise PreconditionError("fhat(0) > 0", f"fhat0 = {fhat0}")
    f0 = f(0.0)
    grid = _sign_grid(f, tol)
    values = f.evaluate(grid)
    worst = int(np.argmax(values))
    if values[worst] > tol * max(1.0, abs(f0)):
        raise PreconditionError("f(x) <= 0 for |x| >= 1", f"f({grid[worst]:.6g}) = {values[worst]:.3g}")
    if certificate is None:
        logger.warning("lp_bound(%s): no certificate for fhat >= 0 supplied", f.name)
    conversion = math.pi ** (n / 2) / gamma(n / 2 + 1)
    center = f0 / (2**n * fhat0)
    interval = None
    if fhat0_error > 0:
        low = f0 / (2**n * (fhat0 + fhat0_error))
        high = f0 / (2**n * (fhat0 - fhat0_error)) if fhat0 > fhat0_error else math.inf
        interval = (low, high)
    return BoundResult(
        n=n,
        density_bound=center * conversion,
        center_density_bound=center,
        source=BoundSource.GENERIC_F,
        conversion_factor=conversion,
        fhat0=fhat0,
        fhat0_provenance=provenance,
        certificate=certificate,
        center_density_interval=interval,
        heuristic=heuristic or f.decay.heuristic,
    )


def bessel_bound(n: int) -> BoundResult:
    """Density bound j^n / (Gamma(n/2+1)^2 4^n), j the first zero of J_{n/2}."""
    if n < 1:
        raise PreconditionError("n >= 1", f"n = {n}")
    j = bessel_root(Order(n), 1)
    g = gamma(n / 2 + 1)
    density = j**n / (g**2 * 4**n)
    conversion = math.pi ** (n / 2) / g
    return BoundResult(
        n=n,
        density_bound=density,
        center_density_bound=density / conversion,
        source=BoundSource.BESSEL_CLOSED_FORM,
        conversion_factor=conversion,
        j_value=j,
        certificate="nonnegative-by-construction: levensh",
    )


def optimality_residual(n: int, M: int = DEFAULT_NODES) -> float:
    """|w0 f(0) - fhat(0)| / fhat(0) for the levensh function on the rule of radius j/pi.

    Every node is a zero of f, so only the w0 term survives; fhat(0) comes
    from the independent radial transform.
    """
    f = levensh_fn(n)
    j = bessel_root(Order(n), 1)
    rule = bgf_rule(n, j / math.pi, M)
    fhat0 = radial_ft(f, 0.0).value
    return abs(rule.w0 * f(0.0) - fhat0) / fhat0

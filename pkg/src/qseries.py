"""Exact q-expansions of theta series of even unimodular lattices.

Convention: coefficient k counts vectors of norm 2k. All arithmetic is in
Fraction; a product or sum is truncated at the smaller order of its operands.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from errors import DomainError
from models import ExtremalityReport

logger = logging.getLogger(__name__)

CONVENTION = "q^k counts norm 2k"

THETA72_WEIGHTS = (
    Fraction(79, 1080),
    Fraction(1183, 720),
    Fraction(-91, 180),
    Fraction(-91, 432),
)


@dataclass(frozen=True)
class QSeries:
    coeffs: tuple[Fraction, ...]
    name: str = ""

    def __post_init__(self):
        if not self.coeffs:
            raise DomainError("a q-series needs at least the constant coefficient")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @property
    def trunc(self) -> int:
        """Inclusive truncation order K."""
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        if not 0 <= k <= self.trunc:
            raise IndexError(f"coefficient {k} is beyond truncation order {self.trunc}")
        return self.coeffs[k]

    def truncate(self, K: int) -> "QSeries":
        if K > self.trunc:
            raise DomainError(f"cannot extend a series known to order {self.trunc} up to {K}")
        return QSeries(self.coeffs[: K + 1], self.name)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __add__(self, other: "QSeries") -> "QSeries":
        return series_add(self, other)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return series_add(self, series_scale(other, -1))

    def __mul__(self, other: "QSeries | Fraction | int") -> "QSeries":
        if isinstance(other, QSeries):
            return series_mul(self, other)
        return series_scale(self, other)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "QSeries":
        return series_pow(self, exponent)


def one(K: int) -> QSeries:
    return QSeries((Fraction(1),) + (Fraction(0),) * K, "1")


def series_add(a: QSeries, b: QSeries) -> QSeries:
    K = min(a.trunc, b.trunc)
    return QSeries(tuple(a.coeffs[k] + b.coeffs[k] for k in range(K + 1)))


def series_scale(a: QSeries, c) -> QSeries:
    c = Fraction(c)
    return QSeries(tuple(c * x for x in a.coeffs))


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    """Cauchy product truncated at min(a.trunc, b.trunc)."""
    K = min(a.trunc, b.trunc)
    ac, bc = a.coeffs, b.coeffs
    out = []
    for k in range(K + 1):
        out.append(sum((ac[i] * bc[k - i] for i in range(k + 1) if ac[i] and bc[k - i]), Fraction(0)))
    return QSeries(tuple(out))


def series_pow(a: QSeries, exponent: int) -> QSeries:
    if exponent < 0:
        raise DomainError("only non-negative powers are supported")
    result = one(a.trunc)
    base = a
    while exponent:
        if exponent & 1:
            result = series_mul(result, base)
        exponent >>= 1
        if exponent:
            base = series_mul(base, base)
    return result


def _sigma3(K: int) -> list[int]:
    sigma = [0] * (K + 1)
    for d in range(1, K + 1):
        cube = d**3
        for multiple in range(d, K + 1, d):
            sigma[multiple] += cube
    return sigma


@lru_cache(maxsize=16)
def eisenstein_e4(K: int) -> QSeries:
    """E4 = 1 + 240 sum sigma_3(k) q^k, the theta series of E8."""
    if K < 0:
        raise DomainError("truncation order must be >= 0")
    sigma = _sigma3(K)
    return QSeries((Fraction(1),) + tuple(Fraction(240 * sigma[k]) for k in range(1, K + 1)), "E4")


@lru_cache(maxsize=16)
def delta_cusp(K: int) -> QSeries:
    """Delta = q prod_{m>=1} (1 - q^m)^24."""
    if K < 0:
        raise DomainError("truncation order must be >= 0")
    # prod (1 - q^m) up to q^(K-1), in integers
    euler = [0] * K
    if K:
        euler[0] = 1
    for m in range(1, K):
        for i in range(K - 1, m - 1, -1):
            euler[i] -= euler[i - m]
    if K == 0:
        return QSeries((Fraction(0),), "Delta")
    base = QSeries(tuple(Fraction(c) for c in euler))
    power = series_pow(base, 24)
    return QSeries((Fraction(0),) + power.coeffs, "Delta")


@lru_cache(maxsize=16)
def theta_leech(K: int) -> QSeries:
    """Theta series of the Leech lattice, E4^3 - 720 Delta."""
    e4 = eisenstein_e4(K)
    series = series_pow(e4, 3) - series_scale(delta_cusp(K), 720)
    return QSeries(series.coeffs, "Theta24")


@lru_cache(maxsize=16)
def theta72(K: int) -> QSeries:
    """The extremal weight-36 form as a polynomial in Theta8 and Theta24."""
    t8 = eisenstein_e4(K)
    t24 = theta_leech(K)
    t8_cubed = series_pow(t8, 3)
    w1, w2, w3, w4 = THETA72_WEIGHTS
    series = (
        w1 * series_pow(t24, 3)
        + w2 * series_mul(series_pow(t24, 2), t8_cubed)
        + w3 * series_mul(t24, series_pow(t8_cubed, 2))
        + w4 * series_pow(t8_cubed, 3)
    )
    if not series.is_integral():
        logger.error("Theta72 expansion to order %d produced non-integer coefficients", K)
    return QSeries(series.coeffs, "Theta72")


def extremality(s: QSeries) -> ExtremalityReport:
    """Minimal non-zero norm and the list of negative coefficients of s."""
    first = next((k for k in range(1, s.trunc + 1) if s.coeffs[k] != 0), None)
    negatives = [(k, c) for k, c in enumerate(s.coeffs) if c < 0]
    return ExtremalityReport(
        min_norm=2 * first if first is not None else None,
        negative_coeffs=negatives,
        checked_up_to=s.trunc,
    )


NAMED_SERIES = {
    "e8": eisenstein_e4,
    "leech": theta_leech,
    "theta72": theta72,
}

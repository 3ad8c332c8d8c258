"""Lattices with exact rational Gram matrices.

Shell enumeration (Fincke-Pohst over an exact LDL decomposition), theta sums
with certified tails, and the Poisson-summation based checks: the theta
transformation law, Laguerre positivity of shell sums, center density and
feasibility of lattice distributions in the dual LP.
"""

import itertools
import json
import logging
import math
import threading
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator
from scipy import special

import config
import qseries
from errors import AccuracyError, DomainError, PreconditionError, ResourceError
from models import CenterDensity, DualFeasibilityReport, WeakDualityReport
from radial import RadialFunction, radial_ft
from specfun import Order, laguerre_table

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent / "data"
TAIL_TOL = 1e-12
TAIL_SHARE = 1e-3  # dual-feasibility tail target, relative to the slack tolerance
MAX_SHELL_NORM = 1e6

ThetaSource = Literal["enumerate", "cubic", "e4", "leech"]


def parse_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise DomainError(f"exact rational expected, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"not a rational 'p/q' string: {value!r}") from None
    raise DomainError(f"exact rational expected, got {value!r}")


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def ldl(gram) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Exact decomposition x^T G x = sum_k d_k (x_k + sum_{i<k} m[k][i] x_i)^2.

    Raises DomainError when a pivot is not positive.
    """
    n = len(gram)
    a = [[Fraction(v) for v in row] for row in gram]
    d = [Fraction(0)] * n
    m = [[Fraction(0)] * n for _ in range(n)]
    for k in reversed(range(n)):
        pivot = a[k][k]
        if pivot <= 0:
            raise DomainError("Gram matrix is not positive definite")
        d[k] = pivot
        for i in range(k):
            m[k][i] = a[k][i] / pivot
        for i in range(k):
            if m[k][i]:
                for j in range(k):
                    a[i][j] -= pivot * m[k][i] * m[k][j]
    return d, m


def _inverse(gram: tuple[tuple[Fraction, ...], ...]) -> list[list[Fraction]]:
    n = len(gram)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(gram)]
    for col in range(n):
        pivot_row = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        pivot = aug[col][col]
        aug[col] = [v / pivot for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [v - factor * p for v, p in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


class Lattice(BaseModel):
    """A lattice given by its exact Gram matrix.

    ``theta_source`` names a closed-form theta series for the built-in
    families; ``norm_scale`` is the factor between this Gram and that family's
    canonical Gram (scaling and duals keep the closed form usable).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    n: int = Field(ge=1)
    gram: tuple[tuple[Fraction, ...], ...]
    theta_source: ThetaSource = "enumerate"
    norm_scale: Fraction = Fraction(1)

    @field_validator("gram", mode="before")
    @classmethod
    def _parse_gram(cls, value):
        return tuple(tuple(parse_rational(v) for v in row) for row in value)

    @field_validator("norm_scale", mode="before")
    @classmethod
    def _parse_scale(cls, value):
        return parse_rational(value)

    @model_validator(mode="after")
    def _check_gram(self):
        if len(self.gram) != self.n or any(len(row) != self.n for row in self.gram):
            raise ValueError(f"gram must be {self.n}x{self.n}")
        for i, j in itertools.combinations(range(self.n), 2):
            if self.gram[i][j] != self.gram[j][i]:
                raise ValueError("gram must be symmetric")
        ldl(self.gram)
        return self

    @field_serializer("gram")
    def _ser_gram(self, gram) -> list[list[str]]:
        return [[format_rational(v) for v in row] for row in gram]

    @field_serializer("norm_scale")
    def _ser_scale(self, value: Fraction) -> str:
        return format_rational(value)

    def determinant(self) -> Fraction:
        d, _ = ldl(self.gram)
        return math.prod(d, start=Fraction(1))

    def gram_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.gram])

    def scaled(self, s) -> "Lattice":
        """Gram multiplied by s, i.e. every norm multiplied by s."""
        s = parse_rational(s)
        if s <= 0:
            raise DomainError("scale must be positive")
        return Lattice(
            name=self.name if s == 1 else f"{self.name}*{format_rational(s)}",
            n=self.n,
            gram=tuple(tuple(v * s for v in row) for row in self.gram),
            theta_source=self.theta_source,
            norm_scale=self.norm_scale * s,
        )


@dataclass(frozen=True)
class ShellMap:
    """Vector counts per norm, exact for every norm <= complete_up_to."""

    entries: tuple[tuple[Fraction, int], ...]
    complete_up_to: Fraction

    def norms(self) -> np.ndarray:
        return np.array([float(norm) for norm, _ in self.entries])

    def counts(self) -> np.ndarray:
        return np.array([float(count) for _, count in self.entries])

    def as_dict(self) -> dict[Fraction, int]:
        return dict(self.entries)

    def count(self, norm) -> int:
        return self.as_dict().get(parse_rational(norm), 0)

    def min_norm(self) -> Fraction | None:
        return next((norm for norm, _ in self.entries if norm > 0), None)

    def truncated(self, up_to) -> "ShellMap":
        up_to = parse_rational(up_to)
        if up_to > self.complete_up_to:
            raise DomainError(f"shells are only complete up to {self.complete_up_to}")
        return ShellMap(tuple((k, c) for k, c in self.entries if k <= up_to), up_to)

    def total(self, fn: Callable[[np.ndarray], np.ndarray]) -> float:
        """sum over shells of count * fn(norm)."""
        if not self.entries:
            return 0.0
        return math.fsum((self.counts() * fn(self.norms())).tolist())


# ---------------------------------------------------------------------------
# Built-in lattices


def _golay_generators() -> list[list[int]]:
    """Generator rows of the extended binary Golay code [24, 12, 8].

    Cyclic code of length 23 with generator polynomial
    1 + x^2 + x^4 + x^5 + x^6 + x^10 + x^11, extended by a parity bit.
    """
    poly = [1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 1]
    rows = []
    for shift in range(12):
        word = [0] * 23
        for i, c in enumerate(poly):
            word[i + shift] = c
        rows.append(word + [sum(word) % 2])
    return rows


def _echelon_basis(rows: list[list[int]]) -> list[list[int]]:
    """Integer row echelon basis of the Z-span of rows, size-reduced above the pivots."""
    rows = [list(r) for r in rows if any(r)]
    ncols = len(rows[0])
    basis: list[list[int]] = []
    for col in range(ncols):
        while True:
            active = [r for r in rows if r[col] != 0]
            if len(active) <= 1:
                break
            pivot = min(active, key=lambda r: abs(r[col]))
            for r in active:
                if r is pivot:
                    continue
                q = r[col] // pivot[col]
                for k in range(col, ncols):
                    r[k] -= q * pivot[k]
            rows = [r for r in rows if any(r)]
        active = [r for r in rows if r[col] != 0]
        if active:
            row = active[0]
            if row[col] < 0:
                row[:] = [-v for v in row]
            basis.append(row)
            rows = [r for r in rows if r is not row]
    for i in reversed(range(len(basis))):
        for j in range(i + 1, len(basis)):
            col = next(k for k, v in enumerate(basis[j]) if v)
            q = round(Fraction(basis[i][col], basis[j][col]))
            if q:
                basis[i] = [a - q * b for a, b in zip(basis[i], basis[j])]
    return basis


def _leech_lattice() -> Lattice:
    """Leech lattice from the Golay code, coordinates scaled by sqrt(8)."""
    gens = [[2 * c for c in word] for word in _golay_generators()]
    for j in range(1, 24):
        for sign in (1, -1):
            v = [0] * 24
            v[0], v[j] = 4, 4 * sign
            gens.append(v)
    gens.append([-3] + [1] * 23)
    basis = _echelon_basis(gens)
    det = math.prod(row[i] for i, row in enumerate(basis))
    if len(basis) != 24 or abs(det) != 8**12:
        raise RuntimeError(f"Leech construction produced rank {len(basis)}, det {det}")
    gram = [[Fraction(sum(a * b for a, b in zip(u, v)), 8) for v in basis] for u in basis]
    return Lattice(name="Leech", n=24, gram=gram, theta_source="leech")


def load_lattice(path: str | Path) -> Lattice:
    """Read a lattice definition file (JSON with name, n, gram of "p/q" strings)."""
    with open(path) as f:
        data = json.load(f)
    return Lattice(**data)


@lru_cache(maxsize=32)
def builtin(name: str) -> Lattice:
    """Z1..Z8, D4, E8 or Leech."""
    key = name.strip().lower().replace("^", "")
    if key.startswith("z") and key[1:].isdigit():
        n = int(key[1:])
        if not 1 <= n <= 8:
            raise DomainError(f"Z^n is only shipped for n <= 8, got {name!r}")
        gram = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        return Lattice(name=f"Z{n}", n=n, gram=gram, theta_source="cubic")
    if key in ("d4", "e8"):
        lattice = load_lattice(DATA_DIR / f"{key}.json")
        if key == "e8":
            lattice = lattice.model_copy(update={"theta_source": "e4"})
        return lattice
    if key == "leech":
        return _leech_lattice()
    raise DomainError(f"unknown lattice {name!r}; built-ins are {', '.join(BUILTIN_NAMES)}")


BUILTIN_NAMES = tuple(f"z{n}" for n in range(1, 9)) + ("d4", "e8", "leech")


def resolve_lattice(name_or_path: str) -> Lattice:
    """A built-in name or the path of a lattice definition file."""
    path = Path(name_or_path)
    if path.suffix == ".json" or path.exists():
        return load_lattice(path)
    return builtin(name_or_path)


def dual(L: Lattice) -> Lattice:
    """Dual lattice: Gram inverse, exactly."""
    inverse = _inverse(L.gram)
    unimodular_family = L.theta_source != "enumerate"
    return Lattice(
        name=f"{L.name}*",
        n=L.n,
        gram=inverse,
        theta_source=L.theta_source if unimodular_family else "enumerate",
        norm_scale=1 / L.norm_scale if unimodular_family else Fraction(1),
    )


def covolume(L: Lattice) -> float:
    return math.sqrt(L.determinant())


# ---------------------------------------------------------------------------
# Fincke-Pohst enumeration

_COMPLETED: dict[tuple, Fraction] = {}
_SHELL_CACHE: dict[tuple, ShellMap] = {}
_CACHE_LOCK = threading.Lock()


def _common_denominator(values) -> int:
    return math.lcm(1, *(Fraction(v).denominator for v in values))


def enumerate_vectors(
    L: Lattice,
    bound,
    *,
    shift=None,
    half: bool = True,
    budget: int | None = None,
) -> Iterator[tuple[np.ndarray, np.ndarray, int]]:
    """All x (integer coordinates) with Q(x + shift) <= bound, in chunks.

    Yields (coords, numerators, denominator): the exact norm of row i is
    numerators[i] / denominator. With ``half`` (only allowed without a shift)
    one vector of every +-pair is produced, namely the one whose first
    non-zero coordinate is positive.
    """
    bound = parse_rational(bound)
    budget = budget or config.ENUM_NODE_BUDGET
    n = L.n
    shift_q = [parse_rational(v) for v in shift] if shift is not None else [Fraction(0)] * n
    if len(shift_q) != n:
        raise DomainError(f"shift must have {n} coordinates")
    if half and any(shift_q):
        raise DomainError("+-symmetry halving needs a zero shift")

    d_q, m_q = ldl(L.gram)
    d = np.array([float(v) for v in d_q])
    m = np.array([[float(v) for v in row] for row in m_q])
    v = np.array([float(q) for q in shift_q])

    gram_den = _common_denominator(x for row in L.gram for x in row)
    shift_den = _common_denominator(shift_q)
    gram_int = np.array([[int(x * gram_den) for x in row] for row in L.gram], dtype=np.int64)
    w = np.array([int(q * shift_den) for q in shift_q], dtype=np.int64)
    denominator = gram_den * shift_den**2
    limit = bound.numerator * denominator  # exact test: num * bound.den <= limit

    radius0 = float(bound) * (1 + 1e-9) + 1e-9
    stack = [(0, np.zeros((1, 0), dtype=np.int64), np.array([radius0]), np.array([True]))]
    nodes = 0
    while stack:
        k, X, R, zero = stack.pop()
        if k == n:
            Z = X * shift_den + w
            num = np.einsum("ij,jk,ik->i", Z, gram_int, Z)
            keep = num * bound.denominator <= limit
            if np.any(keep):
                yield X[keep], num[keep], denominator
            continue
        y = X + v[:k]
        center = -(v[k] + y @ m[k, :k])
        rad = np.sqrt(np.maximum(R, 0.0) / d[k])
        lo = np.ceil(center - rad - 1e-9)
        hi = np.floor(center + rad + 1e-9)
        if half:
            lo = np.where(zero, np.maximum(lo, 0.0), lo)
        cnt = np.maximum(hi - lo + 1, 0).astype(np.int64)
        total = int(cnt.sum())
        nodes += total
        if nodes > budget:
            with _CACHE_LOCK:
                done = _COMPLETED.get(L.gram, Fraction(0))
            raise ResourceError(
                f"enumeration of {L.name} to norm {bound} exceeded {budget} nodes",
                completed_up_to=done,
            )
        if total == 0:
            continue
        parent = np.repeat(np.arange(len(cnt)), cnt)
        offsets = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        xk = lo[parent].astype(np.int64) + offsets
        remaining = R[parent] - d[k] * (xk - center[parent]) ** 2
        ok = remaining >= -1e-9 * (1 + radius0)
        child_X = np.hstack([X[parent][ok], xk[ok, None]])
        child_R = remaining[ok]
        child_zero = (zero[parent] & (xk == 0))[ok]
        chunk = config.ENUM_CHUNK
        for start in range(0, len(child_R), chunk):
            stop = start + chunk
            stack.append((k + 1, child_X[start:stop], child_R[start:stop], child_zero[start:stop]))
    logger.debug("Enumerated %s to norm %s with %d nodes", L.name, bound, nodes)


def shells(L: Lattice, up_to) -> ShellMap:
    """Exact shell counts up to ``up_to`` by enumeration."""
    up_to = parse_rational(up_to)
    if up_to <= 0:
        raise DomainError("up_to must be positive")
    with _CACHE_LOCK:
        cached = _SHELL_CACHE.get(L.gram)
    if cached is not None and cached.complete_up_to >= up_to:
        return cached.truncated(up_to)

    counts: dict[Fraction, int] = {}
    for coords, num, den in enumerate_vectors(L, up_to, half=True):
        values, mult = np.unique(num, return_counts=True)
        for value, c in zip(values.tolist(), mult.tolist()):
            norm = Fraction(int(value), den)
            counts[norm] = counts.get(norm, 0) + (2 * c if norm else c)
    result = ShellMap(tuple(sorted(counts.items())), up_to)
    with _CACHE_LOCK:
        current = _SHELL_CACHE.get(L.gram)
        if current is None or current.complete_up_to < up_to:
            _SHELL_CACHE[L.gram] = result
            _COMPLETED[L.gram] = up_to
    return result


def _cubic_shells(n: int, up_to: int) -> list[int]:
    one_dim = np.zeros(up_to + 1, dtype=np.int64)
    k = 0
    while k * k <= up_to:
        one_dim[k * k] += 1 if k == 0 else 2
        k += 1
    counts = np.zeros(up_to + 1, dtype=np.int64)
    counts[0] = 1
    for _ in range(n):
        counts = np.convolve(counts, one_dim)[: up_to + 1]
    return counts.tolist()


def theta_shells(L: Lattice, up_to) -> ShellMap:
    """Shell counts from the cheapest exact source for this lattice."""
    up_to = parse_rational(up_to)
    scale = L.norm_scale
    if L.theta_source == "cubic":
        top = math.floor(up_to / scale)
        counts = _cubic_shells(L.n, top)
        entries = tuple((k * scale, c) for k, c in enumerate(counts) if c)
        return ShellMap(entries, up_to)
    if L.theta_source in ("e4", "leech"):
        K = math.floor(up_to / (2 * scale))
        series = qseries.eisenstein_e4(K) if L.theta_source == "e4" else qseries.theta_leech(K)
        entries = tuple((2 * k * scale, int(c)) for k, c in enumerate(series.coeffs) if c)
        return ShellMap(entries, up_to)
    return shells(L, up_to)


def min_norm(L: Lattice) -> Fraction:
    """Minimal non-zero norm; basis vectors bound it from above."""
    diagonal = min(L.gram[i][i] for i in range(L.n))
    return theta_shells(L, diagonal).min_norm()


# ---------------------------------------------------------------------------
# Certified tails


@dataclass(frozen=True)
class Envelope:
    """phi(rho) <= amplitude * exp(-rate rho^2), or amplitude * (1+rho)^(-power)."""

    amplitude: float
    rate: float | None = None
    power: float | None = None

    @classmethod
    def of_decay(cls, n: int, decay) -> "Envelope":
        if decay.gaussian_rate is not None:
            return cls(decay.C, rate=decay.gaussian_rate)
        return cls(decay.C, power=n + decay.eps)


def shell_tail_bound(env: Envelope, n: int, min_norm_value, N: float) -> float:
    """Bound on sum of phi(|x|) over points of a lattice (or coset) with |x|^2 > N.

    Points with min distance sqrt(min_norm) give N(rho) <= ((rho + r0)/r0)^n,
    r0 = sqrt(min_norm)/2; integrating against -phi' gives the bound.
    """
    r0 = math.sqrt(float(min_norm_value)) / 2
    R = math.sqrt(N)
    total = 0.0
    for i in range(n + 1):
        binom = math.comb(n, i) * r0 ** (-i)
        if env.rate is not None:
            a = env.rate
            total += binom * a ** (-i / 2) * math.gamma(i / 2 + 1) * special.gammaincc(i / 2 + 1, a * N)
        else:
            p = env.power
            if p <= n:
                raise PreconditionError("decay faster than |x|^-n", f"power {p} <= {n}")
            total += binom * p * (1 + R) ** (i - p) / (p - i)
    return env.amplitude * total


def required_norm(env: Envelope, n: int, min_norm_value, tol: float, start: float = 4.0) -> Fraction:
    """Smallest tried norm N (growing by 1.5x) whose tail bound is below tol."""
    N = max(start, float(min_norm_value))
    while shell_tail_bound(env, n, min_norm_value, N) > tol:
        N *= 1.5
        if N > MAX_SHELL_NORM:
            raise AccuracyError(f"no shell depth below {MAX_SHELL_NORM} reaches tail {tol}")
    return Fraction(math.ceil(N))


def theta_T(L: Lattice, y: float, shells: ShellMap | None = None, *, tol: float = TAIL_TOL) -> float:
    """T(y) = sum over vectors of exp(-|v|^2 y), with a certified tail."""
    if y <= 0:
        raise DomainError("y must be positive")
    mn = min_norm(L)
    env = Envelope(1.0, rate=y)
    if shells is None:
        shells = theta_shells(L, required_norm(env, L.n, mn, tol))
    value = shells.total(lambda norm: np.exp(-norm * y))
    tail = shell_tail_bound(env, L.n, mn, float(shells.complete_up_to))
    if tail > tol:
        raise AccuracyError(f"theta tail {tail:.3g} above tolerance {tol:.3g}", partial=value, est_error=tail)
    return value


def theta_transform_check(L: Lattice, y: float, *, tol: float = TAIL_TOL) -> float:
    """|T_{L*}(y)/(2^n covol) - (4 pi)^(-n/2) (pi^2/y)^(n/2) T_L(pi^2/y)|."""
    n = L.n
    lhs = theta_T(dual(L), y, tol=tol) / (2**n * covolume(L))
    y_dual = math.pi**2 / y
    rhs = (4 * math.pi) ** (-n / 2) * y_dual ** (n / 2) * theta_T(L, y_dual, tol=tol)
    return abs(lhs - rhs)


def _phased_sum(L: Lattice, bound, values: Callable, shift=None, phase=None) -> float:
    """sum over x (or x + shift) with norm <= bound of values(norm) * cos(2 pi <x, phase>)."""
    half = shift is None or not any(parse_rational(s) for s in shift)
    parts: list[float] = []
    phase_vec = np.array([float(parse_rational(p)) for p in phase]) if phase is not None else None
    for coords, num, den in enumerate_vectors(L, bound, shift=None if half else shift, half=half):
        norms = num.astype(float) / den
        terms = values(norms)
        if phase_vec is not None:
            terms = terms * np.cos(2 * math.pi * (coords @ phase_vec))
        if half:
            terms = np.where(num == 0, terms, 2 * terms)
        parts.extend(terms.tolist())
    return math.fsum(parts)


def _fhat_values(f: RadialFunction) -> Callable[[np.ndarray], np.ndarray]:
    if f.transform is not None:
        return lambda norms: np.asarray(f.transform(np.sqrt(norms)), dtype=float)
    if f.band_limit is None:
        raise PreconditionError("fhat evaluable", f"{f.name} has neither a closed-form transform nor a band limit")

    def numeric(norms: np.ndarray) -> np.ndarray:
        unique, inverse = np.unique(norms, return_inverse=True)
        values = np.array([radial_ft(f, math.sqrt(x)).value for x in unique])
        return values[inverse]

    return numeric


def _support_norm(radius: float) -> Fraction:
    return Fraction(math.ceil(radius**2 * 10**6), 10**6)


def _primal_bound(f: RadialFunction, n: int, min_norm_value, tol: float) -> tuple[Fraction, float]:
    """Shell depth for sum f(x) and the certified bound on what lies beyond it."""
    if f.support is not None:
        return _support_norm(f.support), 0.0
    env = Envelope.of_decay(n, f.decay)
    bound = required_norm(env, n, min_norm_value, tol)
    return bound, shell_tail_bound(env, n, min_norm_value, float(bound))


def _dual_bound(f: RadialFunction, n: int, dual_min, tol: float) -> tuple[Fraction, float]:
    if f.band_limit is not None:
        return _support_norm(f.band_limit), 0.0
    if f.transform_decay is None:
        raise PreconditionError("fhat tail", f"{f.name} has no transform envelope")
    env = Envelope.of_decay(n, f.transform_decay)
    bound = required_norm(env, n, dual_min, tol)
    return bound, shell_tail_bound(env, n, dual_min, float(bound))


def poisson_check(L: Lattice, f: RadialFunction, v=None, *, tol: float = TAIL_TOL) -> float:
    """|sum_x f(x + v) - covol^-1 sum_t cos(2 pi <v, t>) fhat(t)|.

    v is given in the coordinates of L's basis, so <v, t> is the plain dot
    product with the dual-basis coordinates of t.
    """
    n = L.n
    if f.n != n:
        raise DomainError(f"function dimension {f.n} does not match lattice dimension {n}")
    v = [Fraction(0)] * n if v is None else [parse_rational(x) for x in v]
    mn = min_norm(L)
    Ld = dual(L)
    dual_mn = min_norm(Ld)
    lhs_bound, _ = _primal_bound(f, n, mn, tol)
    rhs_bound, _ = _dual_bound(f, n, dual_mn, tol)
    f_values = lambda norms: np.asarray(f.evaluate(np.sqrt(norms)), dtype=float)  # noqa: E731
    fhat_values = _fhat_values(f)
    if any(v):
        lhs = _phased_sum(L, lhs_bound, f_values, shift=v)
        rhs = _phased_sum(Ld, rhs_bound, fhat_values, phase=v)
    else:
        lhs = theta_shells(L, lhs_bound).total(f_values)
        rhs = theta_shells(Ld, rhs_bound).total(fhat_values)
    residual = abs(lhs - rhs / covolume(L))
    logger.debug("poisson_check %s %s v=%s: lhs=%.15g residual=%.3g", L.name, f.name, v, lhs, residual)
    return residual


def laguerre_positivity_check(L: Lattice, k_max: int, y: float, *, tol: float = TAIL_TOL) -> list[float]:
    """Entry k: sum over shells of count * L_k^{n/2-1}(norm y) exp(-norm y)."""
    if y <= 0 or k_max < 0:
        raise DomainError("need y > 0 and k_max >= 0")
    alpha = Order.for_dimension(L.n)
    a = alpha.nu
    # |L_k^a(x)| e^{-x} <= A e^{-x/2}
    amplitude = max(max(special.binom(k + a, k), 2 - special.binom(k + a, k)) for k in range(k_max + 1))
    env = Envelope(float(amplitude), rate=y / 2)
    mn = min_norm(L)
    sh = theta_shells(L, required_norm(env, L.n, mn, tol))
    x = sh.norms() * y
    table = laguerre_table(k_max, alpha, x) * np.exp(-x)
    counts = sh.counts()
    return [math.fsum((counts * row).tolist()) for row in table]


def _aitken(v0: float, v1: float, v2: float) -> float:
    denom = (v2 - v1) - (v1 - v0)
    if denom == 0 or not math.isfinite(denom):
        return v2
    return v2 - (v2 - v1) ** 2 / denom


def center_density(L: Lattice, *, tol: float = 1e-9, max_halvings: int = 10) -> CenterDensity:
    """(min/4)^{n/2}/sqrt(det), algebraically and as a theta-series limit.

    The limit is (4 pi)^{-n/2} y^{n/2} T(y) of the lattice rescaled to min
    norm 1, at y = 1, 1/2, 1/4, ...; its error decays like exp(-c/y), so the
    sequence is accelerated with Aitken's delta-squared rather than a
    polynomial Richardson table.
    """
    n = L.n
    mn = min_norm(L)
    det = L.determinant()
    square = (mn / 4) ** n / det
    algebraic = math.sqrt(square)
    exact = None
    num_root, den_root = math.isqrt(square.numerator), math.isqrt(square.denominator)
    if num_root**2 == square.numerator and den_root**2 == square.denominator:
        exact = format_rational(Fraction(num_root, den_root))

    unit = L.scaled(1 / mn)
    values: list[float] = []
    y = 1.0
    for _ in range(max_halvings):
        scale = (4 * math.pi / y) ** (n / 2)
        values.append(theta_T(unit, y, tol=TAIL_TOL * scale) / scale)
        if len(values) >= 2 and abs(values[-1] - values[-2]) < tol:
            limit = _aitken(*values[-3:]) if len(values) >= 3 else values[-1]
            return CenterDensity(
                algebraic=algebraic,
                algebraic_exact=exact,
                limit=limit,
                limit_error=abs(values[-1] - values[-2]),
            )
        y /= 2
    raise AccuracyError(
        f"center density limit for {L.name} did not settle after {max_halvings} halvings",
        partial=values[-1],
        est_error=abs(values[-1] - values[-2]),
    )


def dual_feasibility(L: Lattice, tests: list[RadialFunction], *, tol: float | None = None) -> DualFeasibilityReport:
    """Check the lattice distribution g = sum_x delta_x against the dual LP conditions.

    Condition (2) follows from the minimal norm. Condition (3) is tested on the
    given non-negative functions only: slack(phi) = covol^-1 sum_t phi(t) - c phi(0).
    Dual shells are summed until the envelope tail drops below tol * TAIL_SHARE;
    the reported slack omits that tail, so it is a lower bound, and
    ``slack_errors`` holds the omitted amount.
    """
    tol = config.default_tolerance() if tol is None else tol
    tail_target = tol * TAIL_SHARE
    mn = min_norm(L)
    if mn < 1:
        raise PreconditionError("min norm >= 1", f"{L.name} has min norm {format_rational(mn)}")
    if not tests:
        raise PreconditionError("non-empty test set")
    covol = covolume(L)
    c = 1 / covol
    Ld = dual(L)
    dual_mn = min_norm(Ld)
    slacks: dict[str, float] = {}
    slack_errors: dict[str, float] = {}
    for phi in tests:
        if phi.n != L.n:
            raise DomainError(f"test function {phi.name} has dimension {phi.n}, lattice {L.n}")
        env = Envelope.of_decay(L.n, phi.decay)
        bound = required_norm(env, L.n, dual_mn, tail_target)
        total = theta_shells(Ld, bound).total(lambda norms: np.asarray(phi.evaluate(np.sqrt(norms)), dtype=float))
        slacks[phi.name] = total / covol - c * phi(0.0)
        slack_errors[phi.name] = shell_tail_bound(env, L.n, dual_mn, float(bound)) / covol
    margin = min(slacks.values())
    if margin < -tol:
        logger.warning("Dual feasibility margin %.3g below -%.1g for %s", margin, tol, L.name)
    return DualFeasibilityReport(
        c=c,
        min_norm=mn,
        margin=margin,
        test_set=list(slacks),
        slacks=slacks,
        slack_errors=slack_errors,
        support_condition_holds=mn >= 1,
    )


def weak_duality_check(L: Lattice, f: RadialFunction, *, fhat0: float | None = None, tol: float | None = None) -> WeakDualityReport:
    """f(0) >= sum_x f(x) = covol^-1 sum_t fhat(t) >= c fhat(0), for L with min norm >= 1.

    Both sums are cut where their envelope tails drop below tol; the equality
    is accepted within tol plus those certified tails.
    """
    tol = config.default_tolerance() if tol is None else tol
    mn = min_norm(L)
    if mn < 1:
        raise PreconditionError("min norm >= 1", f"{L.name} has min norm {format_rational(mn)}")
    n = L.n
    Ld = dual(L)
    covol = covolume(L)
    primal_depth, primal_tail = _primal_bound(f, n, mn, tol)
    dual_depth, dual_tail = _dual_bound(f, n, min_norm(Ld), tol)
    lattice_sum = theta_shells(L, primal_depth).total(lambda norms: np.asarray(f.evaluate(np.sqrt(norms)), dtype=float))
    dual_sum = theta_shells(Ld, dual_depth).total(_fhat_values(f)) / covol
    truncation = primal_tail + dual_tail / covol
    logger.debug("weak_duality_check %s: shells to %s and %s, truncation %.3g", L.name, primal_depth, dual_depth, truncation)
    if fhat0 is None:
        fhat0 = f.fhat0 if f.fhat0 is not None else radial_ft(f, 0.0).value
    f0 = f(0.0)
    c_fhat0 = fhat0 / covol
    agree = abs(lattice_sum - dual_sum) <= max(tol, 1e-7 * abs(f0)) + truncation
    holds = f0 >= lattice_sum - tol and dual_sum >= c_fhat0 - tol and agree
    return WeakDualityReport(
        f0=f0,
        lattice_sum=lattice_sum,
        dual_sum=dual_sum,
        c_fhat0=c_fhat0,
        holds=holds,
        truncation_error=truncation,
    )

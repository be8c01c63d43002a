"""Static nonlinear edge functions and their passivity-based sign classes.

An edge function is a scalar map mu = psi(zeta) with psi(0) = 0.  Besides
evaluation, every kind exposes its cocontent (the integral of psi from 0 to
zeta), its derivative where defined, and its set of equilibria (the zeros of
psi around the origin).  Sign classification follows the passive/active
dichotomy: an edge is positive when zeta * psi(zeta) >= 0 everywhere on a
verification grid, strictly positive when zeta * psi(zeta) >= eps * zeta**2
for some eps > 0, and mirrored for negative.  Classification is grid-based,
not symbolic: arbitrary user functions admit no decision procedure, so every
verdict records the grid it was checked on.
"""

from __future__ import annotations

import csv
import enum
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidGrid, NotAnInterval, ValidationError

# Grid values with |zeta| below this are treated as the origin when
# computing strictness margins (eps = inf of zeta*psi/zeta**2 off zero).
_ORIGIN_TOL = 1e-9
# |values| at or below this count as zero in grid scans.
_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Symmetric verification grid: ``samples`` points over [-n, n]."""

    n: float = 100.0
    samples: int = 2001

    def validate(self, min_samples: int = 101) -> None:
        if not (self.n > 0):
            raise InvalidGrid(f"grid half-width must be positive, got {self.n}")
        if self.samples < min_samples:
            raise InvalidGrid(
                f"grid needs at least {min_samples} samples, got {self.samples}"
            )

    def points(self) -> np.ndarray:
        return np.linspace(-self.n, self.n, self.samples)


class SignLabel(enum.Enum):
    STRICTLY_POSITIVE = "strictly_positive"
    POSITIVE = "positive"
    STRICTLY_NEGATIVE = "strictly_negative"
    NEGATIVE = "negative"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class SignClass:
    """Strongest sign label supported by a verification grid.

    ``margin`` is the strictness constant (0 when the class is not strict)
    and ``witness`` is a grid point ruling out the next-stronger label
    (None when no stronger label exists to rule out).
    """

    label: SignLabel
    margin: float
    witness: Optional[float]
    grid: GridSpec

    @property
    def is_positive(self) -> bool:
        return self.label in (SignLabel.POSITIVE, SignLabel.STRICTLY_POSITIVE)

    @property
    def is_strictly_positive(self) -> bool:
        return self.label is SignLabel.STRICTLY_POSITIVE

    @property
    def is_negative(self) -> bool:
        return self.label in (SignLabel.NEGATIVE, SignLabel.STRICTLY_NEGATIVE)


@dataclass(frozen=True)
class EquilibriaInterval:
    """Closed interval [lower, upper] containing 0 where psi vanishes.

    ``lower <= 0 <= upper``; both are +-inf for identically zero functions.
    """

    lower: float
    upper: float

    def __post_init__(self):
        if not (self.lower <= 0.0 <= self.upper):
            raise ValidationError("equilibria interval must contain the origin")

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol

    @property
    def is_whole_line(self) -> bool:
        return math.isinf(self.lower) and math.isinf(self.upper)


@dataclass(frozen=True)
class MonotonicityReport:
    """Grid verdict on monotonicity plus a surjectivity heuristic.

    ``unbounded`` records whether |psi| is still growing at both grid ends,
    a cheap stand-in for psi -> +-inf as zeta -> +-inf.
    """

    nondecreasing: bool
    strictly: bool
    min_slope: float
    unbounded: bool
    grid: GridSpec


class EdgeFunction:
    """Base class for static edge functions.  Instances are immutable."""

    def __call__(self, zeta: float) -> float:
        raise NotImplementedError

    def cocontent(self, zeta: float) -> float:
        """Integral of the function from 0 to zeta (always 0 at zeta = 0)."""
        raise NotImplementedError

    def derivative(self, zeta: float) -> float:
        """Slope at zeta; may be +inf at isolated points (power laws at 0)."""
        raise NotImplementedError

    def equilibria(self) -> EquilibriaInterval:
        """Zero interval around the origin; NotAnInterval if there is none."""
        return _equilibria_by_scan(self)

    def batch(self, zeta: np.ndarray) -> np.ndarray:
        return np.array([self(float(z)) for z in zeta])


@dataclass(frozen=True)
class Linear(EdgeFunction):
    """mu = w * zeta."""

    w: float

    def __call__(self, zeta: float) -> float:
        return self.w * zeta

    def cocontent(self, zeta: float) -> float:
        return 0.5 * self.w * zeta * zeta

    def derivative(self, zeta: float) -> float:
        return self.w

    def equilibria(self) -> EquilibriaInterval:
        if self.w == 0.0:
            return EquilibriaInterval(-math.inf, math.inf)
        return EquilibriaInterval(0.0, 0.0)

    def batch(self, zeta: np.ndarray) -> np.ndarray:
        return self.w * zeta


@dataclass(frozen=True)
class DeadZone(EdgeFunction):
    """mu = w * sign(zeta) * max(|zeta| - band, 0).

    Flat (zero) on [-band, band]; the classic sensor dead zone.  Positive but
    not strictly positive for w > 0.
    """

    w: float
    band: float = 1.0

    def __post_init__(self):
        if not (self.band > 0):
            raise ValidationError(f"dead zone band must be > 0, got {self.band}")

    def __call__(self, zeta: float) -> float:
        excess = abs(zeta) - self.band
        if excess <= 0.0:
            return 0.0
        return math.copysign(self.w * excess, zeta)

    def cocontent(self, zeta: float) -> float:
        excess = max(abs(zeta) - self.band, 0.0)
        return 0.5 * self.w * excess * excess

    def derivative(self, zeta: float) -> float:
        return 0.0 if abs(zeta) <= self.band else self.w

    def equilibria(self) -> EquilibriaInterval:
        if self.w == 0.0:
            return EquilibriaInterval(-math.inf, math.inf)
        return EquilibriaInterval(-self.band, self.band)

    def batch(self, zeta: np.ndarray) -> np.ndarray:
        return self.w * np.sign(zeta) * np.maximum(np.abs(zeta) - self.band, 0.0)


@dataclass(frozen=True)
class PowerSign(EdgeFunction):
    """mu = w * sign(zeta) * |zeta| ** alpha with 0 < alpha < 1.

    Strictly monotone with unbounded range for w > 0; drives integrator
    networks to agreement in finite time.  Not Lipschitz at the origin.
    """

    w: float
    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValidationError(
                f"power exponent must lie in (0, 1), got {self.alpha}"
            )

    def __call__(self, zeta: float) -> float:
        if zeta == 0.0:
            return 0.0
        return math.copysign(self.w * abs(zeta) ** self.alpha, zeta)

    def cocontent(self, zeta: float) -> float:
        return self.w * abs(zeta) ** (1.0 + self.alpha) / (1.0 + self.alpha)

    def derivative(self, zeta: float) -> float:
        if zeta == 0.0:
            return math.inf if self.w != 0.0 else 0.0
        return self.w * self.alpha * abs(zeta) ** (self.alpha - 1.0)

    def equilibria(self) -> EquilibriaInterval:
        if self.w == 0.0:
            return EquilibriaInterval(-math.inf, math.inf)
        return EquilibriaInterval(0.0, 0.0)

    def batch(self, zeta: np.ndarray) -> np.ndarray:
        return self.w * np.sign(zeta) * np.abs(zeta) ** self.alpha


@dataclass(frozen=True)
class Sinusoid(EdgeFunction):
    """mu = a * sin(zeta): neither positive nor negative, zeros at k*pi."""

    a: float

    def __call__(self, zeta: float) -> float:
        return self.a * math.sin(zeta)

    def cocontent(self, zeta: float) -> float:
        return self.a * (1.0 - math.cos(zeta))

    def derivative(self, zeta: float) -> float:
        return self.a * math.cos(zeta)

    def equilibria(self) -> EquilibriaInterval:
        if self.a == 0.0:
            return EquilibriaInterval(-math.inf, math.inf)
        raise NotAnInterval("sinusoid zeros are isolated points, not an interval")

    def batch(self, zeta: np.ndarray) -> np.ndarray:
        return self.a * np.sin(zeta)


@dataclass(frozen=True)
class Negated(EdgeFunction):
    """mu = -inner(zeta); flips positive classes to negative ones."""

    inner: EdgeFunction

    def __call__(self, zeta: float) -> float:
        return -self.inner(zeta)

    def cocontent(self, zeta: float) -> float:
        return -self.inner.cocontent(zeta)

    def derivative(self, zeta: float) -> float:
        return -self.inner.derivative(zeta)

    def equilibria(self) -> EquilibriaInterval:
        return self.inner.equilibria()

    def batch(self, zeta: np.ndarray) -> np.ndarray:
        return -self.inner.batch(zeta)


@dataclass(frozen=True)
class Sum(EdgeFunction):
    """Pointwise sum of edge functions."""

    terms: tuple[EdgeFunction, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValidationError("sum needs at least one term")
        object.__setattr__(self, "terms", terms)

    def __call__(self, zeta: float) -> float:
        return sum(t(zeta) for t in self.terms)

    def cocontent(self, zeta: float) -> float:
        # Integration is linear, so the sum of the terms' closed forms is
        # exact; no quadrature needed.
        return sum(t.cocontent(zeta) for t in self.terms)

    def derivative(self, zeta: float) -> float:
        return sum(t.derivative(zeta) for t in self.terms)

    def batch(self, zeta: np.ndarray) -> np.ndarray:
        out = self.terms[0].batch(zeta).astype(float, copy=True)
        for t in self.terms[1:]:
            out += t.batch(zeta)
        return out


@dataclass(frozen=True)
class SampledTable(EdgeFunction):
    """Piecewise-linear interpolant through sampled (zeta, mu) points.

    Linear interpolation keeps monotone samples monotone, which matters when
    equivalent edge functions are re-used as edge functions.  Outside the
    sampled range the end segments are extended linearly.  The table must
    bracket zeta = 0 and interpolate to mu = 0 there.
    """

    zetas: tuple[float, ...]
    mus: tuple[float, ...]
    # Prefix integrals over the knots, filled in at construction.
    _prefix: tuple[float, ...] = field(default=(), repr=False, compare=False)
    _zero_cocontent: float = field(default=0.0, repr=False, compare=False)

    def __post_init__(self):
        z = tuple(float(v) for v in self.zetas)
        m = tuple(float(v) for v in self.mus)
        if len(z) != len(m):
            raise ValidationError("table zeta and mu columns differ in length")
        if len(z) < 2:
            raise ValidationError("table needs at least two sample points")
        if any(b <= a for a, b in zip(z, z[1:])):
            raise ValidationError("table zeta values must be strictly increasing")
        if not (z[0] <= 0.0 <= z[-1]):
            raise ValidationError("table must bracket zeta = 0")
        object.__setattr__(self, "zetas", z)
        object.__setattr__(self, "mus", m)
        prefix = [0.0]
        for (za, ma), (zb, mb) in zip(zip(z, m), zip(z[1:], m[1:])):
            prefix.append(prefix[-1] + 0.5 * (ma + mb) * (zb - za))
        object.__setattr__(self, "_prefix", tuple(prefix))
        object.__setattr__(self, "_zero_cocontent", self._integral_from_start(0.0))
        if abs(self(0.0)) > _ZERO_TOL:
            raise ValidationError(
                f"edge function must vanish at 0, table gives {self(0.0)!r}"
            )

    def _segment(self, zeta: float) -> int:
        """Index i of the segment [zetas[i], zetas[i+1]] covering zeta."""
        i = bisect_right(self.zetas, zeta) - 1
        return min(max(i, 0), len(self.zetas) - 2)

    def __call__(self, zeta: float) -> float:
        i = self._segment(zeta)
        za, zb = self.zetas[i], self.zetas[i + 1]
        ma, mb = self.mus[i], self.mus[i + 1]
        slope = (mb - ma) / (zb - za)
        return ma + slope * (zeta - za)

    def _integral_from_start(self, zeta: float) -> float:
        i = self._segment(zeta)
        za, zb = self.zetas[i], self.zetas[i + 1]
        ma, mb = self.mus[i], self.mus[i + 1]
        slope = (mb - ma) / (zb - za)
        d = zeta - za
        return self._prefix[i] + ma * d + 0.5 * slope * d * d

    def cocontent(self, zeta: float) -> float:
        return self._integral_from_start(zeta) - self._zero_cocontent

    def derivative(self, zeta: float) -> float:
        i = self._segment(zeta)
        za, zb = self.zetas[i], self.zetas[i + 1]
        return (self.mus[i + 1] - self.mus[i]) / (zb - za)

    def equilibria(self) -> EquilibriaInterval:
        vals = self.mus
        zero = [abs(v) <= _ZERO_TOL for v in vals]
        i0 = self._segment(0.0)
        # Grow the zero run outward from the segment containing the origin.
        if not (zero[i0] or zero[i0 + 1]):
            return EquilibriaInterval(0.0, 0.0)
        lo = i0 if zero[i0] else i0 + 1
        hi = i0 + 1 if zero[i0 + 1] else i0
        while lo > 0 and zero[lo - 1]:
            lo -= 1
        while hi < len(vals) - 1 and zero[hi + 1]:
            hi += 1
        if all(zero):
            return EquilibriaInterval(-math.inf, math.inf)
        if any(zero[:lo]) or any(zero[hi + 1 :]):
            raise NotAnInterval("table has zeros away from the origin run")
        for a, b in zip(vals, vals[1:]):
            if a * b < 0 and not (abs(a) <= _ZERO_TOL or abs(b) <= _ZERO_TOL):
                raise NotAnInterval("table crosses zero away from the origin run")
        return EquilibriaInterval(self.zetas[lo], self.zetas[hi])

    def batch(self, zeta: np.ndarray) -> np.ndarray:
        z = np.asarray(self.zetas)
        m = np.asarray(self.mus)
        out = np.interp(zeta, z, m)
        lo_slope = (m[1] - m[0]) / (z[1] - z[0])
        hi_slope = (m[-1] - m[-2]) / (z[-1] - z[-2])
        below = zeta < z[0]
        above = zeta > z[-1]
        if np.any(below):
            out = np.where(below, m[0] + lo_slope * (zeta - z[0]), out)
        if np.any(above):
            out = np.where(above, m[-1] + hi_slope * (zeta - z[-1]), out)
        return out

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["zeta", "mu"])
            for z, m in zip(self.zetas, self.mus):
                writer.writerow([format(z, ".17g"), format(m, ".17g")])

    @classmethod
    def load_csv(cls, path) -> "SampledTable":
        zetas, mus = [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:2]] != ["zeta", "mu"]:
                raise ValidationError(f"{path}: expected header 'zeta,mu'")
            for row in reader:
                if not row:
                    continue
                zetas.append(float(row[0]))
                mus.append(float(row[1]))
        return cls(tuple(zetas), tuple(mus))


def _check_vanishes_at_origin(f: EdgeFunction) -> None:
    if abs(f(0.0)) > _ZERO_TOL:
        raise ValidationError(f"edge function must vanish at 0, got {f(0.0)!r}")


def eval_fn(f: EdgeFunction, zeta: float) -> float:
    """Function-call form of evaluation, mu = psi(zeta)."""
    return f(zeta)


def cocontent(f: EdgeFunction, zeta: float) -> float:
    """Function-call form of the cocontent integral."""
    return f.cocontent(zeta)


def classify_sign(f: EdgeFunction, grid: GridSpec) -> SignClass:
    """Grid-based passivity classification of an edge function.

    Tests zeta * psi(zeta) over the grid: nonnegative everywhere gives
    positive, with a quadratic margin eps = min(zeta*psi/zeta**2) > 0
    upgrading to strictly positive; mirrored for negative; sign changes give
    indefinite.  The verdict is advisory and records the grid used.
    """
    grid.validate(min_samples=101)
    _check_vanishes_at_origin(f)
    z = grid.points()
    vals = f.batch(z)
    p = z * vals
    # Rounding guard: products within 1e-12 of zero (relative to zeta**2)
    # count as zero, so exact dead zones classify cleanly.
    scale = 1.0 + z * z
    zero = np.abs(p) <= 1e-12 * scale
    off_origin = np.abs(z) > _ORIGIN_TOL
    pos_ok = bool(np.all(p >= -1e-12 * scale))
    neg_ok = bool(np.all(p <= 1e-12 * scale))

    def margin_positive() -> float:
        ratios = p[off_origin] / (z[off_origin] ** 2)
        return float(ratios.min()) if ratios.size else 0.0

    def margin_negative() -> float:
        ratios = -p[off_origin] / (z[off_origin] ** 2)
        return float(ratios.min()) if ratios.size else 0.0

    if pos_ok and neg_ok:
        # Identically zero on the grid: positive but as weak as possible.
        return SignClass(SignLabel.POSITIVE, 0.0, float(z[-1]), grid)
    if pos_ok:
        eps = margin_positive()
        if eps > 0.0:
            return SignClass(SignLabel.STRICTLY_POSITIVE, eps, None, grid)
        witness_idx = np.flatnonzero(zero & off_origin)
        witness = float(z[witness_idx[0]]) if witness_idx.size else None
        return SignClass(SignLabel.POSITIVE, 0.0, witness, grid)
    if neg_ok:
        eps = margin_negative()
        if eps > 0.0:
            return SignClass(SignLabel.STRICTLY_NEGATIVE, eps, None, grid)
        witness_idx = np.flatnonzero(zero & off_origin)
        witness = float(z[witness_idx[0]]) if witness_idx.size else None
        return SignClass(SignLabel.NEGATIVE, 0.0, witness, grid)
    witness = float(z[int(np.argmin(p))])
    return SignClass(SignLabel.INDEFINITE, 0.0, witness, grid)


def equilibria(f: EdgeFunction) -> EquilibriaInterval:
    """Zero interval of the edge function around the origin.

    Closed-form for the built-in kinds; a grid scan with bisection-refined
    endpoints otherwise.  Raises NotAnInterval when the zero set near the
    origin is not an interval (e.g. sinusoids).
    """
    return f.equilibria()


def _equilibria_by_scan(
    f: EdgeFunction, half_width: float = 100.0, samples: int = 8001
) -> EquilibriaInterval:
    z = np.linspace(-half_width, half_width, samples)
    vals = f.batch(z)
    zero = np.abs(vals) <= _ZERO_TOL
    if np.all(zero):
        return EquilibriaInterval(-math.inf, math.inf)
    center = samples // 2
    if not zero[center]:
        return EquilibriaInterval(0.0, 0.0)
    lo = hi = center
    while lo > 0 and zero[lo - 1]:
        lo -= 1
    while hi < samples - 1 and zero[hi + 1]:
        hi += 1
    if np.any(zero[:lo]) or np.any(zero[hi + 1 :]):
        raise NotAnInterval("zero set is not a single interval around 0")

    def refine(inside: float, outside: float) -> float:
        # Bisect the boundary between a zero of psi and a non-zero value.
        for _ in range(80):
            mid = 0.5 * (inside + outside)
            if abs(f(mid)) <= _ZERO_TOL:
                inside = mid
            else:
                outside = mid
        return inside

    lower = float(z[lo]) if lo == 0 else refine(float(z[lo]), float(z[lo - 1]))
    upper = (
        float(z[hi])
        if hi == samples - 1
        else refine(float(z[hi]), float(z[hi + 1]))
    )
    return EquilibriaInterval(lower, upper)


def is_monotone_increasing(f: EdgeFunction, grid: GridSpec) -> MonotonicityReport:
    """Grid check that psi is nondecreasing, plus an unboundedness heuristic."""
    grid.validate(min_samples=101)
    z = grid.points()
    vals = f.batch(z)
    diffs = np.diff(vals)
    steps = np.diff(z)
    tol = 1e-12 * (1.0 + np.abs(vals[:-1]) + np.abs(vals[1:]))
    nondecreasing = bool(np.all(diffs >= -tol))
    strictly = bool(np.all(diffs > tol))
    min_slope = float((diffs / steps).min()) if diffs.size else 0.0
    # Still climbing in the outer 10% of the grid and nonzero at the ends.
    k = max(1, grid.samples // 10)
    right_grows = vals[-1] > vals[-1 - k] + _ZERO_TOL and vals[-1] > _ZERO_TOL
    left_grows = vals[0] < vals[k] - _ZERO_TOL and vals[0] < -_ZERO_TOL
    return MonotonicityReport(
        nondecreasing=nondecreasing,
        strictly=strictly,
        min_slope=min_slope,
        unbounded=bool(right_grows and left_grows),
        grid=grid,
    )


def linear_coefficient(f: EdgeFunction) -> Optional[float]:
    """The scalar w when f is (a combination of) linear maps, else None."""
    if isinstance(f, Linear):
        return f.w
    if isinstance(f, Negated):
        inner = linear_coefficient(f.inner)
        return None if inner is None else -inner
    if isinstance(f, Sum):
        total = 0.0
        for t in f.terms:
            w = linear_coefficient(t)
            if w is None:
                return None
            total += w
        return total
    return None


def flip_conjugate(f: EdgeFunction) -> EdgeFunction:
    """The edge function seen from the opposite orientation: -psi(-zeta).

    Reversing an edge's orientation and conjugating its function this way
    leaves the network dynamics unchanged.  All analytic kinds here are odd,
    so they map to themselves; tables are renumbered explicitly.
    """
    if isinstance(f, SampledTable):
        zetas = tuple(-z for z in reversed(f.zetas))
        mus = tuple(-m for m in reversed(f.mus))
        return SampledTable(zetas, mus)
    if isinstance(f, Negated):
        return Negated(flip_conjugate(f.inner))
    if isinstance(f, Sum):
        return Sum(tuple(flip_conjugate(t) for t in f.terms))
    return f

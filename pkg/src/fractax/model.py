"""Domain types: model parameters, coefficient fields, grids, fields, states.

The continuous problem lives on all of space; the simulator truncates to the
torus ``[-extent, extent)^dim`` so that every operator is an exact Fourier
multiplier.  Coefficient fields are restricted to closed-form families whose
space-time infima and suprema are exact, not sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlphaOutOfRange,
    DimOutOfRange,
    GammaOutOfRange,
    GridSpecError,
    KOutOfRange,
    NegativeChi,
    NonFinite,
    NonPositiveInfimum,
    NonPositiveLambda,
    NonPositiveMu,
)

DEFAULT_EXTENT_1D = 10.0 * math.pi   # full period 20*pi
DEFAULT_EXTENT_2D = 4.0 * math.pi    # full period 8*pi per axis
DEFAULT_POINTS_1D = 512
DEFAULT_POINTS_2D = 64


@dataclass(frozen=True)
class ModelParams:
    """Scalar parameters of the chemotaxis system.

    ``alpha`` is the fractional diffusion order, ``gamma`` the logistic
    saturation exponent, ``k`` the signal-production exponent.  ``chi1``
    couples to the attractant ``v1``, ``chi2`` to the repellent ``v2``;
    ``lambda_i`` and ``mu_i`` are the signal decay and production rates.
    """

    alpha: float
    gamma: float
    k: float
    chi1: float
    chi2: float
    lambda1: float
    lambda2: float
    mu1: float
    mu2: float
    dim: int = 1


def validate_params(raw: ModelParams) -> ModelParams:
    """Check every standing hypothesis; return the params unchanged.

    The fractional order must lie strictly inside (1/2, 1): both endpoints
    are excluded.  Idempotent by construction.
    """
    if not (0.5 < raw.alpha < 1.0):
        raise AlphaOutOfRange(f"alpha must lie in (1/2, 1), got {raw.alpha}")
    if not raw.gamma > 1.0:
        raise GammaOutOfRange(f"gamma must exceed 1, got {raw.gamma}")
    if not raw.k >= 1.0:
        raise KOutOfRange(f"k must be >= 1, got {raw.k}")
    for name in ("lambda1", "lambda2"):
        if not getattr(raw, name) > 0.0:
            raise NonPositiveLambda(f"{name} must be positive, got {getattr(raw, name)}")
    for name in ("mu1", "mu2"):
        if not getattr(raw, name) > 0.0:
            raise NonPositiveMu(f"{name} must be positive, got {getattr(raw, name)}")
    for name in ("chi1", "chi2"):
        if getattr(raw, name) < 0.0:
            raise NegativeChi(f"{name} must be nonnegative, got {getattr(raw, name)}")
    if raw.dim not in (1, 2):
        raise DimOutOfRange(f"dim must be 1 or 2, got {raw.dim}")
    return raw


@dataclass(frozen=True)
class CoefficientField:
    """Space-time coefficient a(x,t) or b(x,t) with exact closed-form bounds.

    Two kinds are built in:

    * ``constant`` -- the value ``mean`` everywhere.
    * ``periodic`` -- ``mean + amp_x*cos(wave*(x_1+...+x_dim) + freq*t + phase)
      + amp_t*cos(freq*t)``.

    For the periodic kind the infimum over all (x, t) must be strictly
    positive.  The zero constant is admitted as the one sanctioned degenerate
    value (it encodes an absent term, used by the pure-diffusion special
    case); every other configuration must satisfy the strict bound.
    """

    kind: str
    mean: float
    amp_x: float = 0.0
    amp_t: float = 0.0
    wave: float = 0.0
    freq: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "periodic"):
            raise NonPositiveInfimum(f"unknown coefficient kind {self.kind!r}")
        if self.kind == "constant":
            if self.mean < 0.0:
                raise NonPositiveInfimum(f"constant coefficient must be >= 0, got {self.mean}")
            return
        if self.mean - abs(self.amp_x) - abs(self.amp_t) <= 0.0:
            raise NonPositiveInfimum(
                f"periodic coefficient infimum {self.mean - abs(self.amp_x) - abs(self.amp_t)} "
                "is not strictly positive"
            )
        # exactness of the bounds needs the two oscillations to decouple
        if self.amp_x != 0.0 and self.wave == 0.0:
            raise NonPositiveInfimum("amp_x != 0 requires a nonzero wavevector")
        if self.amp_t != 0.0 and self.freq == 0.0:
            raise NonPositiveInfimum("amp_t != 0 requires a nonzero frequency")

    @classmethod
    def constant(cls, value: float) -> "CoefficientField":
        return cls(kind="constant", mean=float(value))

    @classmethod
    def periodic(cls, mean, amp_x=0.0, amp_t=0.0, wave=0.0, freq=0.0, phase=0.0) -> "CoefficientField":
        return cls("periodic", float(mean), float(amp_x), float(amp_t),
                   float(wave), float(freq), float(phase))

    def bounds(self) -> tuple[float, float]:
        """Exact (inf, sup) over all of space-time."""
        if self.kind == "constant":
            return self.mean, self.mean
        span = abs(self.amp_x) + abs(self.amp_t)
        return self.mean - span, self.mean + span

    def sample(self, coord_sum: np.ndarray, t: float) -> np.ndarray:
        """Evaluate on precomputed ``x_1 + ... + x_dim`` node values at time t."""
        if self.kind == "constant":
            return np.full_like(coord_sum, self.mean)
        out = self.mean + self.amp_x * np.cos(self.wave * coord_sum + self.freq * t + self.phase)
        if self.amp_t != 0.0:
            out = out + self.amp_t * math.cos(self.freq * t)
        return out

    def on_grid(self, grid: "Grid", t: float) -> np.ndarray:
        return self.sample(grid.coord_sum(), t)


@dataclass(frozen=True)
class CoeffBounds:
    """Exact space-time bounds of the growth and saturation coefficients.

    All four values are strictly positive except in the sanctioned
    pure-diffusion degenerate configuration (both coefficients identically
    zero).
    """

    a_inf: float
    a_sup: float
    b_inf: float
    b_sup: float

    def __post_init__(self):
        if self.a_inf > self.a_sup or self.b_inf > self.b_sup:
            raise NonPositiveInfimum("coefficient bounds are not ordered")
        if self.a_inf < 0.0 or self.b_inf < 0.0:
            raise NonPositiveInfimum("coefficient bounds must be nonnegative")


def coeff_bounds(a: CoefficientField, b: CoefficientField) -> CoeffBounds:
    """Exact analytic inf/sup of both coefficient fields over all (x, t)."""
    a_inf, a_sup = a.bounds()
    b_inf, b_sup = b.bounds()
    return CoeffBounds(a_inf, a_sup, b_inf, b_sup)


@dataclass(frozen=True)
class Grid:
    """Periodic tensor grid on the torus ``[-extent_i, extent_i)^dim``."""

    dim: int
    extent: tuple[float, ...]
    points: tuple[int, ...]

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise DimOutOfRange(f"grid dim must be 1 or 2, got {self.dim}")
        if len(self.extent) != self.dim or len(self.points) != self.dim:
            raise GridSpecError("extent/points length must equal dim")
        for ext in self.extent:
            if not ext > 0.0:
                raise GridSpecError(f"extent must be positive, got {ext}")
        for n in self.points:
            if n < 8 or n % 2 != 0:
                raise GridSpecError(f"points per axis must be even and >= 8, got {n}")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(2.0 * ext / n for ext, n in zip(self.extent, self.points))

    @property
    def cell_volume(self) -> float:
        out = 1.0
        for h in self.spacing:
            out *= h
        return out

    @property
    def size(self) -> int:
        out = 1
        for n in self.points:
            out *= n
        return out

    def axis(self, i: int) -> np.ndarray:
        """Node coordinates along axis i: -extent + j*spacing."""
        n = self.points[i]
        return -self.extent[i] + self.spacing[i] * np.arange(n)

    def meshes(self) -> list[np.ndarray]:
        axes = [self.axis(i) for i in range(self.dim)]
        if self.dim == 1:
            return axes
        return list(np.meshgrid(*axes, indexing="ij"))

    def coord_sum(self) -> np.ndarray:
        ms = self.meshes()
        out = ms[0]
        for m in ms[1:]:
            out = out + m
        return out


def make_grid(dim: int = 1, extent=None, points=None) -> Grid:
    """Grid factory with per-dimension defaults; scalars broadcast per axis."""
    if extent is None:
        extent = DEFAULT_EXTENT_1D if dim == 1 else DEFAULT_EXTENT_2D
    if points is None:
        points = DEFAULT_POINTS_1D if dim == 1 else DEFAULT_POINTS_2D
    if np.isscalar(extent):
        extent = (float(extent),) * dim
    else:
        extent = tuple(float(e) for e in extent)
    if np.isscalar(points):
        points = (int(points),) * dim
    else:
        points = tuple(int(n) for n in points)
    return Grid(dim=dim, extent=extent, points=points)


@dataclass(frozen=True)
class Field:
    """Real scalar field sampled on the nodes of a periodic grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise GridSpecError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise NonFinite("field contains non-finite values")

    @property
    def sup(self) -> float:
        return float(self.values.max())

    @property
    def inf(self) -> float:
        return float(self.values.min())

    def mean(self) -> float:
        return float(self.values.mean())

    def integral(self) -> float:
        """Trapezoidal integral over the torus (= rectangle rule by periodicity)."""
        return float(self.values.sum() * self.grid.cell_volume)


def make_field(grid: Grid, values: np.ndarray) -> Field:
    return Field(grid, np.asarray(values, dtype=np.float64))


@dataclass(frozen=True)
class State:
    """Solution triple (u, v1, v2) at one time; all fields share one grid."""

    t: float
    u: Field
    v1: Field
    v2: Field

    def __post_init__(self):
        if not (self.u.grid == self.v1.grid == self.v2.grid):
            raise GridSpecError("state fields must share one grid")

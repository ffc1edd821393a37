"""Grid-based self-application of the derangetropy operator.

The iteration starts from a density sampled on a fixed uniform grid and
repeatedly multiplies by the kernel evaluated at the current cdf, then
renormalizes. Mass drifts only through trapezoid error, and the
pre-renormalization mass of every step is kept as a health metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Distribution
from .errors import DomainError, GridMismatch, InvalidGrid
from .functional import derangetropy_kernel
from .numerics import cumulative_integral

# slack on the unit-mass and cdf-range checks; renormalization makes the
# stored arrays exact to rounding, so this only has to absorb float noise
_MASS_TOL = 1e-8


@dataclass
class GridFunction:
    """A density with its cdf on a shared strictly increasing grid.

    level counts how many times the operator has been applied (0 for a
    freshly discretized distribution). prenorm_mass is the trapezoid mass
    the density had before its renormalization, worth watching because it
    measures quadrature drift, not a property of the operator itself.
    """

    xs: np.ndarray
    density: np.ndarray
    cdf: np.ndarray
    level: int
    prenorm_mass: float = 1.0

    def validate(self) -> None:
        xs, density, cdf = self.xs, self.density, self.cdf
        if xs.ndim != 1 or xs.shape != density.shape or xs.shape != cdf.shape:
            raise InvalidGrid("xs, density, cdf must be matching 1-d arrays")
        if xs.size < 2:
            raise InvalidGrid("grid needs at least two nodes")
        if np.any(np.diff(xs) <= 0.0):
            raise InvalidGrid("grid must be strictly increasing")
        if not (np.all(np.isfinite(density)) and np.all(np.isfinite(cdf))):
            raise InvalidGrid("density or cdf contains non-finite values")
        if float(np.min(density)) < -_MASS_TOL:
            raise InvalidGrid("density has negative values")
        if np.any(np.diff(cdf) < -_MASS_TOL):
            raise InvalidGrid("cdf must be nondecreasing")
        if abs(float(cdf[0])) > _MASS_TOL or abs(float(cdf[-1]) - 1.0) > _MASS_TOL:
            raise InvalidGrid("cdf must run from 0 to 1")
        mass = float(np.trapezoid(density, xs))
        if abs(mass - 1.0) > _MASS_TOL:
            raise InvalidGrid(f"density mass {mass!r} is not 1 within {_MASS_TOL}")
        if self.level < 0:
            raise InvalidGrid("level must be nonnegative")

    def cdf_at(self, t: float) -> float:
        return float(np.interp(t, self.xs, self.cdf))

    def quantile(self, p: float) -> float:
        """Inverse of the piecewise-linear cdf; flat stretches resolve leftward."""
        p = float(p)
        if not 0.0 < p < 1.0:
            raise DomainError(f"quantile needs 0 < p < 1, got {p!r}")
        cdf = self.cdf
        idx = int(np.searchsorted(cdf, p, side="left"))
        idx = min(max(idx, 1), cdf.size - 1)
        rise = cdf[idx] - cdf[idx - 1]
        t = 0.0 if rise <= 0.0 else (p - cdf[idx - 1]) / rise
        t = min(max(t, 0.0), 1.0)
        return float(self.xs[idx - 1] + t * (self.xs[idx] - self.xs[idx - 1]))

    def median(self) -> float:
        return self.quantile(0.5)


@dataclass(frozen=True)
class ConvergenceMetrics:
    level: int
    median: float
    variance: float
    iqr: float
    central_mass: float


def discretize(d: Distribution, n_points: int, tail_eps: float) -> GridFunction:
    """Sample a distribution on a uniform grid over its central quantile range.

    The sampled density is renormalized to unit trapezoid mass, so the grid
    function is a proper density in its own right even when tails were cut
    or the family has integrable endpoint singularities.
    """
    if n_points < 101:
        raise DomainError(f"n_points must be at least 101, got {n_points!r}")
    if not 0.0 < tail_eps < 0.1:
        raise DomainError(f"tail_eps must lie in (0, 0.1), got {tail_eps!r}")
    lo, hi = d.truncated_support(tail_eps)
    xs = np.linspace(lo, hi, n_points)
    density = np.asarray(d.pdf(xs), dtype=float)
    if not np.all(np.isfinite(density)):
        raise InvalidGrid("pdf is not finite on the truncated grid")
    mass = float(np.trapezoid(density, xs))
    if not (mass > 0.0 and math.isfinite(mass)):
        raise InvalidGrid(f"sampled density has mass {mass!r}")
    density = density / mass
    cdf = cumulative_integral(xs, density)
    cdf = np.clip(cdf / cdf[-1], 0.0, 1.0)
    return GridFunction(xs=xs, density=density, cdf=cdf, level=0, prenorm_mass=mass)


def apply_derangetropy(g: GridFunction) -> GridFunction:
    """One application of the operator: reweight by the kernel, renormalize."""
    g.validate()
    weights = derangetropy_kernel(np.clip(g.cdf, 0.0, 1.0))
    raw = weights * g.density
    prenorm = float(np.trapezoid(raw, g.xs))
    if not (prenorm > 0.0 and math.isfinite(prenorm)):
        raise InvalidGrid(f"reweighted density has mass {prenorm!r}")
    density = raw / prenorm
    cdf = cumulative_integral(g.xs, density)
    cdf = np.clip(cdf / cdf[-1], 0.0, 1.0)
    return GridFunction(xs=g.xs, density=density, cdf=cdf, level=g.level + 1, prenorm_mass=prenorm)


def iterate(g0: GridFunction, n: int) -> list[GridFunction]:
    """Levels 0..n of the recursion, starting from g0."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n!r}")
    levels = [g0]
    for _ in range(n):
        levels.append(apply_derangetropy(levels[-1]))
    return levels


def convergence_metrics(g: GridFunction, delta: float, center: float | None = None) -> ConvergenceMetrics:
    """Concentration diagnostics for one level.

    central_mass is the mass within [center - delta, center + delta]; pass
    the level-0 median as center to track a whole iteration against a fixed
    reference point (defaults to the grid's own median).
    """
    if not (delta > 0.0 and math.isfinite(delta)):
        raise DomainError(f"delta must be positive, got {delta!r}")
    med = g.median()
    if center is None:
        center = med
    mean = float(np.trapezoid(g.xs * g.density, g.xs))
    variance = float(np.trapezoid((g.xs - mean) ** 2 * g.density, g.xs))
    iqr = g.quantile(0.75) - g.quantile(0.25)
    central = g.cdf_at(center + delta) - g.cdf_at(center - delta)
    return ConvergenceMetrics(
        level=g.level,
        median=med,
        variance=max(variance, 0.0),
        iqr=max(iqr, 0.0),
        central_mass=min(max(central, 0.0), 1.0),
    )


def l2_distance(g1: GridFunction, g2: GridFunction) -> float:
    """L2 norm of the density difference over the overlap of the two grids.

    Grids need not match; both densities are linearly interpolated onto a
    common uniform grid first. Disjoint supports are an error rather than a
    large number.
    """
    lo = max(float(g1.xs[0]), float(g2.xs[0]))
    hi = min(float(g1.xs[-1]), float(g2.xs[-1]))
    if not lo < hi:
        raise GridMismatch(
            f"grids [{g1.xs[0]!r}, {g1.xs[-1]!r}] and [{g2.xs[0]!r}, {g2.xs[-1]!r}] do not overlap"
        )
    n = max(g1.xs.size, g2.xs.size)
    xs = np.linspace(lo, hi, n)
    d1 = np.interp(xs, g1.xs, g1.density)
    d2 = np.interp(xs, g2.xs, g2.density)
    return float(np.sqrt(np.trapezoid((d1 - d2) ** 2, xs)))

"""Gaussian copula reference surfaces and empirical-minus-Gaussian maps.

The bivariate normal CDF is evaluated by reducing the double integral to a
single integral of the conditional CDF,

    P(X <= x, Y <= y) = integral_{-inf}^{x} phi(t) Phi((y - c t) / sqrt(1 - c^2)) dt,

integrated with adaptive quadrature. The Gaussian copula and its density
follow by the probability-integral transform; copula grids are filled at the
quantile nodes and differenced by inclusion-exclusion so a Gaussian grid is
directly comparable, cell by cell, with an empirical grid of the same
resolution.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import ndtr, ndtri

from .copula import CopulaGrid

__all__ = [
    "GaussianCopulaParams",
    "DifferenceGrid",
    "std_normal_cdf",
    "std_normal_quantile",
    "bivariate_normal_cdf",
    "gaussian_copula_cdf",
    "gaussian_copula_density",
    "gaussian_grid",
    "average_gaussian_density",
    "difference_map",
    "write_difference_csv",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
# beyond this the univariate tail mass is below 1e-300 and can be truncated
_TAIL_LIMIT = 40.0
_QUAD_ABS_TOL = 1e-12


@dataclass(frozen=True)
class GaussianCopulaParams:
    """Correlation parameter of a bivariate Gaussian copula."""

    c: float

    def __post_init__(self):
        if not -1.0 <= self.c <= 1.0:
            raise ValueError("correlation must lie in [-1, 1]")


def _corr_value(correlation) -> float:
    if isinstance(correlation, GaussianCopulaParams):
        return correlation.c
    return float(correlation)


@dataclass(frozen=True)
class DifferenceGrid:
    """Cellwise difference between an empirical and a Gaussian copula grid.

    ``values[i, j]`` is empirical minus Gaussian cell mass; positive where the
    observed dependence is denser than the Gaussian baseline.
    """

    resolution: int
    values: np.ndarray


def std_normal_cdf(x):
    """Standard normal CDF (scalar or array)."""
    out = ndtr(np.asarray(x, dtype=float))
    return float(out) if np.isscalar(x) else out


def std_normal_quantile(u):
    """Standard normal quantile for u strictly inside (0, 1)."""
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr <= 0.0) or np.any(u_arr >= 1.0) or not np.all(np.isfinite(u_arr)):
        raise ValueError("quantile level must lie strictly inside (0, 1)")
    out = ndtri(u_arr)
    return float(out) if np.isscalar(u) else out


def _phi(t: float) -> float:
    return math.exp(-0.5 * t * t) / _SQRT_2PI


def bivariate_normal_cdf(x: float, y: float, correlation: float) -> float:
    """P(X <= x, Y <= y) for standard bivariate normal (X, Y).

    The degenerate cases c = +/-1 use the comonotone and countermonotone
    closed forms. Otherwise the conditional-CDF single integral is evaluated
    with adaptive quadrature to well below 1e-7 absolute error; arguments are
    ordered so the result is exactly symmetric in (x, y).
    """
    c = _corr_value(correlation)
    if not -1.0 <= c <= 1.0:
        raise ValueError("correlation must lie in [-1, 1]")
    x = float(x)
    y = float(y)
    if math.isnan(x) or math.isnan(y):
        raise ValueError("arguments must not be NaN")
    if c == 1.0:
        return float(min(ndtr(x), ndtr(y)))
    if c == -1.0:
        return float(max(ndtr(x) + ndtr(y) - 1.0, 0.0))
    a, b = (x, y) if x <= y else (y, x)
    if a <= -_TAIL_LIMIT:
        return 0.0
    if b >= _TAIL_LIMIT:
        return float(ndtr(a))
    scale = math.sqrt((1.0 - c) * (1.0 + c))

    def integrand(t: float) -> float:
        return _phi(t) * float(ndtr((b - c * t) / scale))

    lower = -_TAIL_LIMIT
    upper = min(a, _TAIL_LIMIT)
    points = None
    if c != 0.0:
        pivot = b / c
        if lower < pivot < upper:
            # the conditional CDF turns over here when |c| is close to 1
            points = [pivot]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, abserr = quad(
            integrand,
            lower,
            upper,
            epsabs=_QUAD_ABS_TOL,
            epsrel=1e-10,
            limit=200,
            points=points,
        )
    if abserr > 1e-7:
        raise ArithmeticError(
            f"bivariate normal quadrature failed to converge (estimate {abserr:.2e})"
        )
    return min(max(value, 0.0), 1.0)


def gaussian_copula_cdf(u: float, v: float, correlation: float) -> float:
    """Gaussian copula Cop_c(u, v) on [0, 1]^2.

    Boundary values follow by continuity: zero when either argument is zero,
    the other argument when one argument is one.
    """
    c = _corr_value(correlation)
    if not -1.0 <= c <= 1.0:
        raise ValueError("correlation must lie in [-1, 1]")
    u = float(u)
    v = float(v)
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise ValueError("copula arguments must lie in [0, 1]")
    if u == 0.0 or v == 0.0:
        return 0.0
    if u == 1.0:
        return v
    if v == 1.0:
        return u
    if c == 0.0:
        return u * v
    if c == 1.0:
        return min(u, v)
    if c == -1.0:
        return max(u + v - 1.0, 0.0)
    return bivariate_normal_cdf(float(ndtri(u)), float(ndtri(v)), c)


def gaussian_copula_density(u, v, correlation: float):
    """Gaussian copula density on the open square (0, 1)^2 for |c| < 1.

    Equals the bivariate normal density over the product of the marginal
    densities at the normal quantiles; at u = v = 1/2 this is 1/sqrt(1 - c^2).
    """
    c = _corr_value(correlation)
    if not -1.0 < c < 1.0:
        raise ValueError("density requires |correlation| < 1")
    u_arr = np.asarray(u, dtype=float)
    v_arr = np.asarray(v, dtype=float)
    if np.any(u_arr <= 0.0) or np.any(u_arr >= 1.0) or np.any(v_arr <= 0.0) or np.any(v_arr >= 1.0):
        raise ValueError("density arguments must lie strictly inside (0, 1)")
    x = ndtri(u_arr)
    y = ndtri(v_arr)
    omc2 = (1.0 - c) * (1.0 + c)
    # form x*y before scaling so swapping u and v is bit-exact
    cross = x * y
    exponent = (c * c * (x * x + y * y) - 2.0 * c * cross) / (2.0 * omc2)
    out = np.exp(-exponent) / math.sqrt(omc2)
    return float(out) if (np.isscalar(u) and np.isscalar(v)) else out


def gaussian_grid(correlation: float, resolution: int) -> CopulaGrid:
    """Gaussian copula on the same quantile grid as the empirical estimator.

    ``cumulative[i, j] = Cop_c(i/m, j/m)``; cell masses come from corner
    inclusion-exclusion of the cumulative, so they are exact cell
    probabilities, directly comparable with empirical cell masses. Degenerate
    correlations +/-1 produce the comonotone and countermonotone grids.
    ``sample_count`` is 0: the grid is analytic, not an estimate.
    """
    c = _corr_value(correlation)
    if not -1.0 <= c <= 1.0:
        raise ValueError("correlation must lie in [-1, 1]")
    m = int(resolution)
    if m < 2:
        raise ValueError("resolution must be at least 2")
    nodes = np.arange(m + 1) / m
    if c == 0.0:
        cumulative = np.outer(nodes, nodes)
    elif c == 1.0:
        cumulative = np.minimum.outer(nodes, nodes)
    elif c == -1.0:
        cumulative = np.maximum(np.add.outer(nodes, nodes) - 1.0, 0.0)
    else:
        cumulative = np.zeros((m + 1, m + 1))
        cumulative[:, m] = nodes
        cumulative[m, :] = nodes
        z = ndtri(nodes[1:m])
        for i in range(1, m):
            for j in range(i, m):
                val = bivariate_normal_cdf(float(z[i - 1]), float(z[j - 1]), c)
                cumulative[i, j] = val
                cumulative[j, i] = val
    density = (
        cumulative[1:, 1:]
        - cumulative[:-1, 1:]
        - cumulative[1:, :-1]
        + cumulative[:-1, :-1]
    )
    np.maximum(density, 0.0, out=density)
    # inclusion-exclusion subtracts mirrored cells in a different order, which
    # costs an ulp; copy the upper triangle so the grid is symmetric bit for bit
    iu, ju = np.triu_indices(m, 1)
    density[ju, iu] = density[iu, ju]
    return CopulaGrid(
        resolution=m,
        density=density,
        cumulative=cumulative,
        sample_count=0,
        pair_count=1,
    )


def _upper_triangle_correlations(corr) -> np.ndarray:
    values = np.asarray(getattr(corr, "values", corr), dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError("correlation matrix must be square")
    if not np.array_equal(values, values.T):
        raise ValueError("correlation matrix must be symmetric")
    k = values.shape[0]
    if k < 2:
        raise ValueError("correlation matrix must cover at least two assets")
    iu = np.triu_indices(k, 1)
    return values[iu]


def average_gaussian_density(corr, resolution: int, c_round: int | None = 3) -> CopulaGrid:
    """Mean Gaussian copula grid over all pairs of a correlation matrix.

    Grids are memoized per distinct correlation after rounding to ``c_round``
    decimals (None disables rounding); distinct values are processed in sorted
    order with multiplicity weights, so the reduction is deterministic.
    """
    cs = _upper_triangle_correlations(corr)
    if c_round is not None:
        cs = np.round(cs, c_round)
    unique, counts = np.unique(cs, return_counts=True)
    m = int(resolution)
    density = np.zeros((m, m))
    cumulative = np.zeros((m + 1, m + 1))
    for c_val, weight in zip(unique, counts):
        ref = gaussian_grid(float(c_val), m)
        density += weight * ref.density
        cumulative += weight * ref.cumulative
    n_pairs = cs.size
    density /= n_pairs
    cumulative /= n_pairs
    return CopulaGrid(
        resolution=m,
        density=density,
        cumulative=cumulative,
        sample_count=0,
        pair_count=int(n_pairs),
    )


def difference_map(empirical: CopulaGrid, corr, c_round: int | None = 3) -> DifferenceGrid:
    """Empirical minus Gaussian cell masses on a shared grid.

    The Gaussian side pairs each entry of the correlation upper triangle with
    a reference grid at the empirical grid's resolution and averages them, so
    the subtraction is cell-aligned by construction. Positive cells mark
    regions where the Gaussian baseline under-represents the observed mass.
    """
    reference = average_gaussian_density(corr, empirical.resolution, c_round=c_round)
    if reference.pair_count != empirical.pair_count:
        raise ValueError(
            f"correlation matrix covers {reference.pair_count} pairs but the "
            f"empirical grid averages {empirical.pair_count}"
        )
    return DifferenceGrid(
        resolution=empirical.resolution,
        values=empirical.density - reference.density,
    )


def write_difference_csv(diff: DifferenceGrid, destination) -> None:
    """Write a difference map as CSV rows ``i,j,u_hi,v_hi,d_permille``.

    Cell values are scaled by 1000 (per-mille), matching the reporting scale
    of the difference analysis.
    """
    m = diff.resolution
    lines = ["i,j,u_hi,v_hi,d_permille"]
    for i in range(1, m + 1):
        u_hi = i / m
        for j in range(1, m + 1):
            v_hi = j / m
            lines.append(
                f"{i},{j},{u_hi!r},{v_hi!r},{float(diff.values[i - 1, j - 1]) * 1000.0!r}"
            )
    payload = "\n".join(lines) + "\n"
    if isinstance(destination, (str, bytes)) or hasattr(destination, "__fspath__"):
        with open(destination, "w", newline="") as fh:
            fh.write(payload)
    else:
        destination.write(payload)

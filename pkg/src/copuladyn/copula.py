"""Empirical copula estimation on quantile grids.

The joint dependence of two return series is summarized on an m-by-m grid of
marginal quantile bins. Bin i of a margin covers the half-open quantile
interval (F^-1((i-1)/m), F^-1(i/m)]; an observation tied with a bin edge goes
to the lowest-indexed bin whose upper edge contains it, and the lowest bin is
closed below so it picks up the sample minimum. Cell (i, j) of the density
grid holds the fraction of time points whose first series falls in bin i and
whose second falls in bin j; cells therefore sum to one and each margin is
uniform up to tie-induced lumping.

The cumulative grid holds the empirical copula at the grid nodes,
``cumulative[i][j] = Cop(i/m, j/m)``, with the conventional zero boundary at
i = 0 and j = 0. At interior nodes the prefix sum of the density cells equals
the direct indicator-count estimator exactly, because integer counts are
accumulated before the single division by the sample count.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .empirical import EmpiricalDistribution, ecdf, quantile

__all__ = [
    "CopulaGrid",
    "quantile_bins",
    "empirical_copula_cumulative",
    "empirical_copula_density",
    "average_pairwise_density",
    "interpolate_cumulative",
    "rebuild_joint_cdf",
    "write_grid_csv",
]


@dataclass(frozen=True)
class CopulaGrid:
    """Gridded copula estimate.

    Attributes
    ----------
    resolution : int
        Number of quantile bins per margin (m).
    density : ndarray, shape (m, m)
        Cell masses; ``density[i, j]`` is the mass of quantile bin i+1 of the
        first margin against bin j+1 of the second. Non-negative, sums to 1.
    cumulative : ndarray, shape (m+1, m+1)
        Copula values at the grid nodes, ``cumulative[i, j] = Cop(i/m, j/m)``,
        zero along the i = 0 and j = 0 boundaries.
    sample_count : int
        Number of elementary observations behind the estimate: T for a single
        pair, T times the number of pairs for an average. 0 marks an analytic
        (noise-free) grid.
    pair_count : int
        Number of series pairs averaged into this grid.
    """

    resolution: int
    density: np.ndarray
    cumulative: np.ndarray
    sample_count: int
    pair_count: int = 1


def quantile_bins(series, resolution: int) -> np.ndarray:
    """Assign each observation to its marginal quantile bin.

    Returns 0-based bin indices in [0, resolution). Observation x lands in the
    first bin whose upper quantile edge F^-1(i/m) is >= x, which implements the
    half-open interval convention with ties going to the lower-indexed bin and
    the minimum included in the first bin.
    """
    sample = np.asarray(series, dtype=float)
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    dist = EmpiricalDistribution.from_sample(sample)
    edges = quantile(dist, np.arange(1, resolution + 1) / resolution)
    bins = np.searchsorted(edges, sample, side="left")
    # the top edge is the sample maximum, so bins < resolution already; clamp
    # guards against pathological float comparisons only
    return np.minimum(bins, resolution - 1)


def empirical_copula_cumulative(r1, r2, u: float, v: float) -> float:
    """Empirical copula of two aligned series at a single point (u, v).

    Counts time points where both series sit at or below their marginal
    empirical quantiles at levels u and v respectively. Levels are the raw
    indicator estimator: at u = 0 the quantile convention returns the sample
    minimum, so the result can be of order 1/T rather than exactly zero.
    """
    a = np.asarray(r1, dtype=float)
    b = np.asarray(r2, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("series must be one dimensional and equally long")
    if a.size == 0:
        raise ValueError("series must not be empty")
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise ValueError("copula arguments must lie in [0, 1]")
    q1 = quantile(EmpiricalDistribution.from_sample(a), u)
    q2 = quantile(EmpiricalDistribution.from_sample(b), v)
    hits = np.count_nonzero((a <= q1) & (b <= q2))
    return hits / a.size


def _grid_from_counts(counts: np.ndarray, total: int, pair_count: int) -> CopulaGrid:
    """Build a CopulaGrid from integer cell counts.

    Counts are prefix-summed as integers before the single division so the
    cumulative grid equals the direct indicator estimator bit for bit.
    """
    m = counts.shape[0]
    density = counts / total
    cumulative = np.zeros((m + 1, m + 1))
    cumulative[1:, 1:] = counts.cumsum(axis=0).cumsum(axis=1) / total
    return CopulaGrid(
        resolution=m,
        density=density,
        cumulative=cumulative,
        sample_count=total,
        pair_count=pair_count,
    )


def empirical_copula_density(r1, r2, resolution: int) -> CopulaGrid:
    """Gridded empirical copula of one pair of aligned series.

    Parameters
    ----------
    r1, r2 : array_like
        Synchronous observations, same length T.
    resolution : int
        Bins per margin; a warning is issued when T < resolution because
        several bins are then necessarily empty.
    """
    a = np.asarray(r1, dtype=float)
    b = np.asarray(r2, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("series must be one dimensional and equally long")
    if a.size == 0:
        raise ValueError("series must not be empty")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if a.size < resolution:
        warnings.warn(
            f"sample length {a.size} is below grid resolution {resolution}; "
            "the grid will be sparse",
            stacklevel=2,
        )
    m = resolution
    flat = quantile_bins(a, m) * m + quantile_bins(b, m)
    counts = np.bincount(flat, minlength=m * m).reshape(m, m)
    return _grid_from_counts(counts, a.size, pair_count=1)


def _pair_chunks(n_assets: int, chunks: int):
    pairs = [(i, j) for i in range(n_assets) for j in range(i + 1, n_assets)]
    size = max(1, (len(pairs) + chunks - 1) // chunks)
    return [pairs[k : k + size] for k in range(0, len(pairs), size)]


def average_pairwise_density(matrix, resolution: int, threads: int | None = None) -> CopulaGrid:
    """Average the empirical copula density over all asset pairs i < j.

    Bin indices are computed once per asset; each pair then contributes an
    integer 2-D histogram. Histograms are accumulated as integers in the fixed
    i < j lexicographic order (and integer addition is order-free anyway), so
    the result is identical for any thread count.

    Parameters
    ----------
    matrix : ReturnMatrix or (K, T) array
        Aligned return panel with assets as rows, K >= 2.
    resolution : int
        Bins per margin.
    threads : int, optional
        Worker threads for the pair histograms; None or 1 runs sequentially.
    """
    returns = np.asarray(getattr(matrix, "returns", matrix), dtype=float)
    if returns.ndim != 2:
        raise ValueError("return panel must be a 2-D assets x time array")
    n_assets = returns.shape[0]
    if n_assets < 2:
        raise ValueError("need at least two assets to form pairs")
    m = resolution
    n_obs = returns.shape[1]
    bins = np.vstack([quantile_bins(returns[k], m) for k in range(n_assets)])

    def chunk_counts(chunk):
        acc = np.zeros(m * m, dtype=np.int64)
        for i, j in chunk:
            acc += np.bincount(bins[i] * m + bins[j], minlength=m * m)
        return acc

    n_pairs = n_assets * (n_assets - 1) // 2
    if threads is None or threads <= 1:
        total_counts = chunk_counts([(i, j) for i in range(n_assets) for j in range(i + 1, n_assets)])
    else:
        chunks = _pair_chunks(n_assets, 4 * threads)
        total_counts = np.zeros(m * m, dtype=np.int64)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(chunk_counts, chunks):
                total_counts += part
    counts = total_counts.reshape(m, m)
    return _grid_from_counts(counts, n_pairs * n_obs, pair_count=n_pairs)


def interpolate_cumulative(grid: CopulaGrid, u: float, v: float) -> float:
    """Bilinear interpolation of the cumulative grid at (u, v) in [0, 1]^2."""
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise ValueError("interpolation point must lie in [0, 1]^2")
    m = grid.resolution

    def locate(p: float):
        s = p * m
        lo = int(s)
        if lo >= m:
            lo = m - 1
        return lo, s - lo

    i0, fu = locate(u)
    j0, fv = locate(v)
    cum = grid.cumulative
    return float(
        (1.0 - fu) * (1.0 - fv) * cum[i0, j0]
        + fu * (1.0 - fv) * cum[i0 + 1, j0]
        + (1.0 - fu) * fv * cum[i0, j0 + 1]
        + fu * fv * cum[i0 + 1, j0 + 1]
    )


def rebuild_joint_cdf(
    grid: CopulaGrid,
    margin1: EmpiricalDistribution,
    margin2: EmpiricalDistribution,
    x: float,
    y: float,
) -> float:
    """Joint CDF estimate H(x, y) = Cop(F1(x), F2(y)) from grid and margins.

    Below both sample minima this is 0; at or above both maxima it is 1 up to
    grid slack.
    """
    return interpolate_cumulative(grid, ecdf(margin1, x), ecdf(margin2, y))


def write_grid_csv(grid: CopulaGrid, destination, permille: bool = False) -> None:
    """Write a copula grid as CSV rows ``i,j,u_hi,v_hi,density,cumulative``.

    Row (i, j), 1-based, covers the cell with upper corner (i/m, j/m): the
    density column is the cell mass and the cumulative column is the copula at
    that corner. With ``permille=True`` an extra ``density_permille`` column
    holds the cell mass scaled by 1000.
    """
    m = grid.resolution
    lines = []
    header = "i,j,u_hi,v_hi,density,cumulative"
    if permille:
        header += ",density_permille"
    lines.append(header)
    for i in range(1, m + 1):
        u_hi = i / m
        for j in range(1, m + 1):
            v_hi = j / m
            dens = float(grid.density[i - 1, j - 1])
            cum = float(grid.cumulative[i, j])
            row = f"{i},{j},{u_hi!r},{v_hi!r},{dens!r},{cum!r}"
            if permille:
                row += f",{dens * 1000.0!r}"
            lines.append(row)
    payload = "\n".join(lines) + "\n"
    if isinstance(destination, (str, bytes)) or hasattr(destination, "__fspath__"):
        with open(destination, "w", newline="") as fh:
            fh.write(payload)
    else:
        destination.write(payload)

"""Tail dependence, correlation matrices, and rolling-window dynamics.

The lower tail coefficient at level alpha is the copula evaluated on the
diagonal, Cop(alpha, alpha): the probability that both returns sit at or below
their alpha-quantiles. The default upper coefficient transcribes the
complementary diagonal literally, 1 - Cop(1-alpha, 1-alpha), which is the
probability that at least one return exceeds its (1-alpha)-quantile; the
joint-exceedance (survival) variant 1 - 2(1-alpha) + Cop(1-alpha, 1-alpha)
ships as a clearly named alternate, selectable in reports and the CLI.

Windowed analysis cuts a return panel into non-overlapping blocks of whole
trading days and reports, per window, the average pairwise copula grid, the
empirical tail curve, the Pearson matrix with its mean off-diagonal level, and
the tail curve a Gaussian copula would imply at the measured correlations.
"""

from __future__ import annotations

import datetime as dt
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .copula import CopulaGrid, average_pairwise_density, interpolate_cumulative
from .gaussian import gaussian_copula_cdf
from .ingest import ReturnMatrix

__all__ = [
    "CorrelationMatrix",
    "TailCurve",
    "WindowReport",
    "lower_tail",
    "upper_tail",
    "upper_tail_survival",
    "tail_curve",
    "pearson_matrix",
    "mean_correlation",
    "average_gaussian_tail",
    "gaussian_tail_curve",
    "partition_windows",
    "window_report",
    "windowed_reports",
    "write_relation_csv",
]

UPPER_TAIL_CONVENTIONS = ("literal", "survival")


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric K x K Pearson matrix with unit diagonal, entries in [-1, 1]."""

    values: np.ndarray
    asset_ids: list | None = None

    def __post_init__(self):
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("correlation matrix must be square")
        if not np.array_equal(v, v.T):
            raise ValueError("correlation matrix must be symmetric")
        if not np.allclose(np.diag(v), 1.0, rtol=0.0, atol=1e-12):
            raise ValueError("correlation matrix diagonal must be 1")
        if np.any(np.abs(v) > 1.0 + 1e-12):
            raise ValueError("correlation entries must lie in [-1, 1]")

    @property
    def size(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class TailCurve:
    """Lower/upper tail dependence sampled at a list of alpha levels."""

    alphas: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        if not (self.alphas.size == self.lower.size == self.upper.size):
            raise ValueError("tail curve arrays must share one length")


@dataclass(frozen=True)
class WindowReport:
    """Per-window summary of dependence level and tail behavior."""

    window_start: dt.date
    window_end: dt.date
    mean_correlation: float
    tail: TailCurve
    gaussian_tail: TailCurve
    sample_count: int
    grid: CopulaGrid = field(repr=False, compare=False, default=None)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha <= 0.5:
        raise ValueError("alpha must lie in (0, 0.5]")
    return alpha


def lower_tail(grid: CopulaGrid, alpha: float) -> float:
    """Cop(alpha, alpha): both series at or below their alpha-quantiles.

    Levels off the grid nodes are bilinearly interpolated.
    """
    alpha = _check_alpha(alpha)
    return interpolate_cumulative(grid, alpha, alpha)


def upper_tail(grid: CopulaGrid, alpha: float) -> float:
    """1 - Cop(1-alpha, 1-alpha): at least one series above its (1-alpha)-quantile."""
    alpha = _check_alpha(alpha)
    return 1.0 - interpolate_cumulative(grid, 1.0 - alpha, 1.0 - alpha)


def upper_tail_survival(grid: CopulaGrid, alpha: float) -> float:
    """Joint exceedance 1 - 2(1-alpha) + Cop(1-alpha, 1-alpha), clipped at 0."""
    alpha = _check_alpha(alpha)
    value = 1.0 - 2.0 * (1.0 - alpha) + interpolate_cumulative(grid, 1.0 - alpha, 1.0 - alpha)
    return max(value, 0.0)


def tail_curve(grid: CopulaGrid, alphas, upper_convention: str = "literal") -> TailCurve:
    """Evaluate lower and upper tail coefficients at each alpha."""
    if upper_convention not in UPPER_TAIL_CONVENTIONS:
        raise ValueError(f"upper_convention must be one of {UPPER_TAIL_CONVENTIONS}")
    upper_fn = upper_tail if upper_convention == "literal" else upper_tail_survival
    alpha_arr = np.asarray(list(alphas), dtype=float)
    return TailCurve(
        alphas=alpha_arr,
        lower=np.array([lower_tail(grid, a) for a in alpha_arr]),
        upper=np.array([upper_fn(grid, a) for a in alpha_arr]),
    )


def pearson_matrix(matrix: ReturnMatrix) -> CorrelationMatrix:
    """Sample Pearson correlations over the aligned return rows."""
    data = matrix.returns
    if data.shape[1] < 2:
        raise ValueError("need at least two observations per series")
    variances = data.var(axis=1)
    dead = np.flatnonzero(variances == 0.0)
    if dead.size:
        names = ", ".join(matrix.asset_ids[k] for k in dead)
        raise ValueError(f"zero-variance series: {names}")
    corr = np.corrcoef(data)
    corr = (corr + corr.T) / 2.0
    np.fill_diagonal(corr, 1.0)
    np.clip(corr, -1.0, 1.0, out=corr)
    return CorrelationMatrix(values=corr, asset_ids=list(matrix.asset_ids))


def mean_correlation(corr: CorrelationMatrix) -> float:
    """Mean of the strictly-upper-triangle entries."""
    k = corr.size
    if k < 2:
        raise ValueError("need at least two assets")
    iu = np.triu_indices(k, 1)
    return float(corr.values[iu].mean())


def average_gaussian_tail(
    corr: CorrelationMatrix, alpha: float, c_round: int | None = None
) -> float:
    """Mean over pairs of the Gaussian-implied tail Cop_c(alpha, alpha).

    With ``c_round`` set, correlations are rounded to that many decimals first
    and the copula value is computed once per distinct rounded entry (cost
    control for large matrices; the induced error is far below sampling noise
    at that rounding).
    """
    alpha = _check_alpha(alpha)
    k = corr.size
    if k < 2:
        raise ValueError("need at least two assets")
    iu = np.triu_indices(k, 1)
    entries = corr.values[iu]
    if c_round is not None:
        entries = np.round(entries, c_round)
    unique, counts = np.unique(entries, return_counts=True)
    total = 0.0
    for c_val, weight in zip(unique, counts):
        total += weight * gaussian_copula_cdf(alpha, alpha, float(c_val))
    return total / entries.size


def gaussian_tail_curve(
    corr: CorrelationMatrix, alphas, c_round: int | None = None
) -> TailCurve:
    """Gaussian-implied tail curve; lower and upper coincide by symmetry."""
    alpha_arr = np.asarray(list(alphas), dtype=float)
    values = np.array([average_gaussian_tail(corr, a, c_round=c_round) for a in alpha_arr])
    return TailCurve(alphas=alpha_arr, lower=values, upper=values.copy())


def partition_windows(matrix: ReturnMatrix, window_days: int) -> list:
    """Cut the panel into consecutive blocks of ``window_days`` trading days.

    Windows never overlap, cover whole days, and a trailing partial window is
    dropped. Errors if the panel does not cover even one full window.
    """
    if window_days < 1:
        raise ValueError("window_days must be at least 1")
    days = matrix.session_dates
    unique_days = np.unique(days)
    n_windows = unique_days.size // window_days
    if n_windows == 0:
        raise ValueError(
            f"panel covers {unique_days.size} trading days, shorter than one "
            f"{window_days}-day window"
        )
    windows = []
    for w in range(n_windows):
        first = unique_days[w * window_days]
        last = unique_days[(w + 1) * window_days - 1]
        lo = int(np.searchsorted(days, first, side="left"))
        hi = int(np.searchsorted(days, last, side="right"))
        windows.append(
            ReturnMatrix(
                asset_ids=list(matrix.asset_ids),
                interval=matrix.interval,
                returns=matrix.returns[:, lo:hi],
                timestamps=matrix.timestamps[lo:hi],
                session_dates=days[lo:hi],
            )
        )
    return windows


def window_report(
    window: ReturnMatrix,
    resolution: int,
    alphas,
    upper_convention: str = "literal",
    c_round: int | None = None,
    threads: int | None = None,
) -> WindowReport:
    """Assemble the per-window dependence summary.

    Builds the average pairwise grid, the empirical tail curve, the Pearson
    matrix with its mean level, and the Gaussian-implied tail curve at the
    measured correlations.
    """
    grid = average_pairwise_density(window, resolution, threads=threads)
    corr = pearson_matrix(window)
    start, end = window.period
    return WindowReport(
        window_start=start,
        window_end=end,
        mean_correlation=mean_correlation(corr),
        tail=tail_curve(grid, alphas, upper_convention=upper_convention),
        gaussian_tail=gaussian_tail_curve(corr, alphas, c_round=c_round),
        sample_count=window.n_observations,
        grid=grid,
    )


def windowed_reports(
    matrix: ReturnMatrix,
    window_days: int,
    resolution: int,
    alphas,
    upper_convention: str = "literal",
    c_round: int | None = None,
    threads: int | None = None,
) -> list:
    """Window reports for the whole panel, in chronological order.

    Windows are independent and may be processed by a thread pool; reports are
    returned in window order regardless of completion order, so results do not
    depend on the thread count.
    """
    windows = partition_windows(matrix, window_days)

    def one(win):
        return window_report(
            win, resolution, alphas, upper_convention=upper_convention, c_round=c_round
        )

    if threads is None or threads <= 1:
        return [one(w) for w in windows]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, windows))


def write_relation_csv(reports, destination) -> None:
    """Relation dataset: one row per (window, alpha).

    Columns: ``window_start,window_end,mean_corr,alpha,lambda_lower,``
    ``lambda_upper,lambda_gauss``.
    """
    lines = ["window_start,window_end,mean_corr,alpha,lambda_lower,lambda_upper,lambda_gauss"]
    for rep in reports:
        for idx, alpha in enumerate(rep.tail.alphas):
            lines.append(
                f"{rep.window_start.isoformat()},{rep.window_end.isoformat()},"
                f"{rep.mean_correlation!r},{float(alpha)!r},"
                f"{float(rep.tail.lower[idx])!r},{float(rep.tail.upper[idx])!r},"
                f"{float(rep.gaussian_tail.lower[idx])!r}"
            )
    payload = "\n".join(lines) + "\n"
    if isinstance(destination, (str, bytes)) or hasattr(destination, "__fspath__"):
        with open(destination, "w", newline="") as fh:
            fh.write(payload)
    else:
        destination.write(payload)

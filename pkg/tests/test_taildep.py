"""Tail coefficients, correlation summaries, and rolling-window reports."""

import io

import numpy as np
import pytest

from copuladyn import (
    CorrelationMatrix,
    SynthSpec,
    average_gaussian_tail,
    empirical_copula_density,
    gaussian_copula_cdf,
    gaussian_tail_curve,
    lower_tail,
    mean_correlation,
    partition_windows,
    pearson_matrix,
    sample_panel,
    tail_curve,
    upper_tail,
    upper_tail_survival,
    window_report,
    windowed_reports,
    write_relation_csv,
)

ALPHAS = (0.02, 0.04, 0.1, 0.25)


def tri_corr(a, b, c):
    m = np.array([[1.0, a, b], [a, 1.0, c], [b, c, 1.0]])
    return CorrelationMatrix(values=m)


def test_tail_values_on_grid_nodes():
    x = np.arange(100.0)
    grid = empirical_copula_density(x, x, 50)  # comonotone, nodes at k/50
    # alpha on a node: Cop(a, a) = a for the comonotone copula
    assert lower_tail(grid, 0.02) == pytest.approx(0.02, abs=1e-15)
    assert lower_tail(grid, 0.5) == pytest.approx(0.5, abs=1e-15)
    assert upper_tail(grid, 0.1) == pytest.approx(0.1, abs=1e-12)
    assert upper_tail_survival(grid, 0.1) == pytest.approx(0.1, abs=1e-12)


def test_tail_values_countermonotone():
    x = np.arange(100.0)
    grid = empirical_copula_density(x, -x, 50)
    assert lower_tail(grid, 0.25) == 0.0
    # literal upper: 1 - Cop(0.75, 0.75) = 1 - 0.5 = 0.5
    assert upper_tail(grid, 0.25) == pytest.approx(0.5, abs=1e-12)
    # joint exceedance of opposite tails is impossible
    assert upper_tail_survival(grid, 0.25) == 0.0


def test_tail_interpolates_off_nodes():
    x = np.arange(100.0)
    grid = empirical_copula_density(x, x, 4)  # nodes at 0.25 steps
    # bilinear inside the corner cell: (0.1/0.25)^2 * C(0.25, 0.25) = 0.04
    assert lower_tail(grid, 0.1) == pytest.approx(0.04, abs=1e-12)
    # node-aligned levels are exact
    assert lower_tail(grid, 0.25) == pytest.approx(0.25, abs=1e-15)


def test_alpha_validation():
    grid = empirical_copula_density(np.arange(10.0), np.arange(10.0), 5)
    for bad in (0.0, -0.1, 0.51, 1.0):
        with pytest.raises(ValueError):
            lower_tail(grid, bad)
        with pytest.raises(ValueError):
            upper_tail(grid, bad)


def test_tail_curve_conventions():
    x = np.arange(200.0)
    grid = empirical_copula_density(x, -x, 50)
    lit = tail_curve(grid, ALPHAS, upper_convention="literal")
    srv = tail_curve(grid, ALPHAS, upper_convention="survival")
    assert np.array_equal(lit.lower, srv.lower)
    assert np.all(lit.upper >= srv.upper)
    with pytest.raises(ValueError):
        tail_curve(grid, ALPHAS, upper_convention="other")


def test_tail_monotone_in_alpha(rng):
    a = rng.normal(size=5000)
    b = 0.6 * a + 0.8 * rng.normal(size=5000)
    grid = empirical_copula_density(a, b, 50)
    curve = tail_curve(grid, ALPHAS)
    assert np.all(np.diff(curve.lower) >= -1e-12)
    assert np.all(np.diff(curve.upper) >= -1e-12)


def test_pearson_matrix_exact_cases():
    mat = sample_panel(SynthSpec(kind="comonotone", assets=3, length=50, seed=1))
    corr = pearson_matrix(mat)
    # scaled copies of one series correlate exactly
    assert np.allclose(corr.values, 1.0, atol=1e-12)
    assert corr.asset_ids == mat.asset_ids
    anti = sample_panel(SynthSpec(kind="countermonotone", assets=2, length=50, seed=1))
    c2 = pearson_matrix(anti)
    assert c2.values[0, 1] == pytest.approx(-1.0, abs=1e-12)


def test_pearson_matrix_rejects_dead_series():
    mat = sample_panel(SynthSpec(kind="gaussian", assets=2, length=30, seed=0))
    frozen = mat.returns.copy()
    frozen[1, :] = 7.0
    dead = type(mat)(
        asset_ids=list(mat.asset_ids),
        interval=mat.interval,
        returns=frozen,
        timestamps=mat.timestamps,
        session_dates=mat.session_dates,
    )
    with pytest.raises(ValueError, match="SYN001"):
        pearson_matrix(dead)


def test_correlation_matrix_validation():
    with pytest.raises(ValueError):
        CorrelationMatrix(values=np.array([[1.0, 0.5], [0.4, 1.0]]))
    with pytest.raises(ValueError):
        CorrelationMatrix(values=np.array([[0.9, 0.5], [0.5, 1.0]]))
    with pytest.raises(ValueError):
        CorrelationMatrix(values=np.array([[1.0, 1.5], [1.5, 1.0]]))


def test_mean_correlation_explicit():
    corr = tri_corr(0.2, 0.5, 0.8)
    assert mean_correlation(corr) == pytest.approx(0.5, abs=1e-15)


def test_average_gaussian_tail_matches_dblquad_mean():
    corr = tri_corr(0.2, 0.5, 0.8)
    # frozen mean of the 2-D quadrature oracle over c in {0.2, 0.5, 0.8}
    assert average_gaussian_tail(corr, 0.1) == pytest.approx(
        0.03528017166122672, abs=5e-10)
    assert average_gaussian_tail(corr, 0.25) == pytest.approx(
        0.12434473308316885, abs=5e-10)


def test_average_gaussian_tail_equals_explicit_mean():
    corr = tri_corr(0.1, 0.3, 0.6)
    expect = np.mean([gaussian_copula_cdf(0.04, 0.04, c) for c in (0.1, 0.3, 0.6)])
    assert average_gaussian_tail(corr, 0.04) == pytest.approx(expect, abs=1e-14)


def test_average_gaussian_tail_rounding_memoization():
    base = tri_corr(0.2, 0.5, 0.8)
    wobble = tri_corr(0.2000004, 0.5, 0.8)
    assert average_gaussian_tail(wobble, 0.1, c_round=3) == average_gaussian_tail(
        base, 0.1, c_round=3)


def test_gaussian_tail_curve_symmetric():
    curve = gaussian_tail_curve(tri_corr(0.2, 0.5, 0.8), ALPHAS)
    assert np.array_equal(curve.lower, curve.upper)
    assert np.all(np.diff(curve.lower) > 0)


def make_panel(days, assets=3, seed=0, correlation=0.4):
    # 13 thirty-minute returns per trading day
    return sample_panel(
        SynthSpec(kind="gaussian", assets=assets, length=days * 13, seed=seed,
                  correlation=correlation))


def test_partition_counts():
    assert len(partition_windows(make_panel(20), 10)) == 2
    assert len(partition_windows(make_panel(25), 10)) == 2  # trailing 5 days dropped
    assert len(partition_windows(make_panel(9), 3)) == 3


def test_partition_window_contents():
    mat = make_panel(6)
    wins = partition_windows(mat, 3)
    assert len(wins) == 2
    assert wins[0].n_observations == 39
    assert wins[1].n_observations == 39
    # windows abut without overlap and preserve column order
    recombined = np.hstack([w.returns for w in wins])
    assert np.array_equal(recombined, mat.returns)
    d0 = np.unique(wins[0].session_dates)
    d1 = np.unique(wins[1].session_dates)
    assert d0.size == 3 and d1.size == 3
    assert d0[-1] < d1[0]


def test_partition_rejects_short_panel():
    with pytest.raises(ValueError, match="window"):
        partition_windows(make_panel(4), 10)
    with pytest.raises(ValueError):
        partition_windows(make_panel(4), 0)


def test_window_report_identical_series():
    # T = 1300 makes alpha * T integral for every alpha in ALPHAS, and
    # resolution 100 puts each alpha on a grid node, so the comonotone tail
    # is exact rather than quantized by the sample size
    mat = sample_panel(SynthSpec(kind="comonotone", assets=3, length=1300, seed=2))
    rep = window_report(mat, 100, ALPHAS)
    assert rep.mean_correlation == pytest.approx(1.0, abs=1e-12)
    assert rep.sample_count == 1300
    for idx, alpha in enumerate(ALPHAS):
        assert rep.tail.lower[idx] == pytest.approx(alpha, abs=1e-12)
    # Gaussian tail at c = 1 is the comonotone bound: min(a, a) = a
    for idx, alpha in enumerate(ALPHAS):
        assert rep.gaussian_tail.lower[idx] == pytest.approx(alpha, abs=1e-12)
    assert rep.window_start == mat.period[0]
    assert rep.window_end == mat.period[1]


def test_windowed_reports_thread_invariant():
    mat = make_panel(12, seed=9)
    seq = windowed_reports(mat, 3, 10, ALPHAS, threads=1)
    par = windowed_reports(mat, 3, 10, ALPHAS, threads=4)
    assert len(seq) == len(par) == 4
    for a, b in zip(seq, par):
        assert a.window_start == b.window_start
        assert a.mean_correlation == b.mean_correlation
        assert np.array_equal(a.tail.lower, b.tail.lower)
        assert np.array_equal(a.tail.upper, b.tail.upper)
        assert np.array_equal(a.gaussian_tail.lower, b.gaussian_tail.lower)


def test_windows_track_correlation_level():
    # higher equicorrelation must raise both the measured mean correlation
    # and the lower tail mass
    lo = window_report(make_panel(40, seed=3, correlation=0.15), 20, (0.25,))
    hi = window_report(make_panel(40, seed=3, correlation=0.75), 20, (0.25,))
    assert hi.mean_correlation > lo.mean_correlation + 0.3
    assert hi.tail.lower[0] > lo.tail.lower[0]
    assert hi.gaussian_tail.lower[0] > lo.gaussian_tail.lower[0]


def test_write_relation_csv_shape_and_values():
    mat = make_panel(8, seed=13)
    reports = windowed_reports(mat, 4, 10, ALPHAS)
    buf = io.StringIO()
    write_relation_csv(reports, buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == ("window_start,window_end,mean_corr,alpha,"
                        "lambda_lower,lambda_upper,lambda_gauss")
    assert len(lines) == 1 + 2 * len(ALPHAS)
    first = lines[1].split(",")
    assert first[0] == reports[0].window_start.isoformat()
    assert float(first[2]) == reports[0].mean_correlation
    assert float(first[3]) == 0.02
    assert float(first[4]) == reports[0].tail.lower[0]
    assert float(first[5]) == reports[0].tail.upper[0]
    assert float(first[6]) == reports[0].gaussian_tail.lower[0]

"""Boomerang observables of centroid series

This module extracts the maximum mean position, the return time and the
late-time plateau from centroid series, runs sweeps over the coin angle and
the disorder width and fits power laws to the resulting maxima."""

# SPDX-FileCopyrightText: 2024 boomerang-walk developers
#
# SPDX-License-Identifier: LGPL-3.0-only

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike
from psyplot.docstring import docstrings
from psyplot.warning import warn
from scipy import stats

from boomerang_walk.common import ConfigurationError, FitError, SeriesError
from boomerang_walk.config.rcsetup import rcParams
from boomerang_walk.disorder import CentroidSeries, SimConfig, run_ensemble

logger = logging.getLogger(__name__)

#: relative slack of the fit window bounds
_WINDOW_RTOL = 1e-9


class Direction(str, enum.Enum):
    """The direction of the initial drift of the walker"""

    RIGHTWARD = "rightward"
    LEFTWARD = "leftward"


@dataclass(frozen=True)
class MaxDisplacement:
    """The maximum mean position of a centroid series

    Parameters
    ----------
    x_max: float
        The largest displacement in the drift direction (in sites)
    t_max: int
        The earliest time step at which `x_max` is reached
    horizon: int
        The last time step of the series"""

    x_max: float
    t_max: int
    horizon: int

    @property
    def returned(self) -> bool:
        """False if the maximum sits at the end of the series"""
        return self.t_max < self.horizon


@dataclass(frozen=True)
class PowerLawFit:
    """Result of a least squares fit of ``ln y = ln A + k ln x``

    Parameters
    ----------
    exponent: float
        The slope ``k``
    log_prefactor: float
        The intercept ``ln A``
    r_squared: float
        The coefficient of determination of the linear regression
    fit_range: tuple of float
        The ``(lo, hi)`` window of the independent variable
    n_points: int
        The number of points inside the window
    exponent_stderr: float
        The standard error of the slope"""

    exponent: float
    log_prefactor: float
    r_squared: float
    fit_range: tuple
    n_points: int
    exponent_stderr: float = np.nan

    def predict(self, x: ArrayLike):
        """Evaluate the fitted power law at `x`"""
        return np.exp(self.log_prefactor) * np.asarray(x) ** self.exponent

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "log_prefactor": self.log_prefactor,
            "r_squared": self.r_squared,
            "fit_range": list(self.fit_range),
            "n_points": self.n_points,
            "exponent_stderr": self.exponent_stderr,
        }


@dataclass
class SweepResult:
    """The maximum mean positions of a parameter sweep

    Parameters
    ----------
    table: pandas.DataFrame
        One row per sweep point with the swept parameter(s) and the columns
        ``x_max, t_max, horizon, returned, return_time``
    series: list of CentroidSeries
        The ensemble series of every sweep point (same order as `table`)
    configs: list of SimConfig
        The configuration that produced each series"""

    table: pd.DataFrame
    series: list = field(default_factory=list)
    configs: list = field(default_factory=list)


def default_direction(config: SimConfig) -> Direction:
    """The drift direction implied by the initial coin state

    States closer to ``|R>`` (``alpha <= pi/2``) drift to the right."""
    if config.alpha <= np.pi / 2:
        return Direction.RIGHTWARD
    return Direction.LEFTWARD


def _oriented(series: CentroidSeries, direction) -> np.ndarray:
    x = np.asarray(series.x_mean)
    if len(x) == 0:
        raise SeriesError("Cannot analyse an empty centroid series")
    if Direction(direction) is Direction.LEFTWARD:
        return -x
    return x


def extract_x_max(
    series: CentroidSeries, direction=Direction.RIGHTWARD
) -> MaxDisplacement:
    """Find the maximum mean position

    Parameters
    ----------
    series: CentroidSeries
        The (ensemble averaged) centroid series
    direction: {'rightward', 'leftward'}
        For leftward drifts, the absolute value of the minimum is used

    Returns
    -------
    MaxDisplacement
        The maximum of the raw series and its earliest time step

    Raises
    ------
    SeriesError
        If the series is empty"""
    x = _oriented(series, direction)
    t_max = int(np.argmax(x))
    return MaxDisplacement(
        x_max=float(x[t_max]), t_max=t_max, horizon=len(x) - 1
    )


def return_time(series: CentroidSeries, direction=Direction.RIGHTWARD):
    """The first time after the maximum when the centroid is back at 0

    Parameters
    ----------
    series: CentroidSeries
        The centroid series
    direction: {'rightward', 'leftward'}
        The drift direction

    Returns
    -------
    int or None
        The time step or None if the centroid does not cross the starting
        site within the horizon"""
    x = _oriented(series, direction)
    t_max = int(np.argmax(x))
    crossed = np.nonzero(x[t_max:] <= 0)[0]
    if len(crossed):
        return int(t_max + crossed[0])
    return None


def plateau_level(series: CentroidSeries, tail_fraction: float = None):
    """Mean and spread of the centroid at late times

    Parameters
    ----------
    series: CentroidSeries
        The centroid series
    tail_fraction: float
        The trailing fraction of the horizon to average over, within
        ``(0, 0.5]``. Defaults to the ``'analysis.plateau_fraction'``
        rcParams key

    Returns
    -------
    float
        The mean of ``x_mean`` over the tail window
    float
        The standard deviation of ``x_mean`` over the tail window

    Raises
    ------
    SeriesError
        If `tail_fraction` is out of range or the window has less than 10
        points"""
    if tail_fraction is None:
        tail_fraction = rcParams["analysis.plateau_fraction"]
    if not 0 < tail_fraction <= 0.5:
        raise SeriesError(
            "tail_fraction must lie in (0, 0.5], got %r" % tail_fraction
        )
    n = int(round(tail_fraction * series.horizon))
    if n < 10:
        raise SeriesError(
            "The tail window of %i points is too short, need at least 10"
            % n
        )
    window = np.asarray(series.x_mean)[-n:]
    return float(window.mean()), float(window.std())


def fit_power_law(
    xs: ArrayLike, ys: ArrayLike, fit_range: Sequence[float] = None
) -> PowerLawFit:
    """Fit ``y = A x**k`` by least squares in log-log space

    Parameters
    ----------
    xs: np.ndarray
        The independent variable
    ys: np.ndarray
        The dependent variable
    fit_range: tuple of float
        The ``(lo, hi)`` window of `xs` that is used. If None, all points
        are used

    Returns
    -------
    PowerLawFit
        The exponent ``k`` and prefactor ``ln A`` of the fit

    Raises
    ------
    FitError
        If less than three points fall into the window or any of them is not
        positive"""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise FitError(
            "xs and ys differ in shape: %s != %s" % (xs.shape, ys.shape)
        )
    if fit_range is None:
        if not len(xs):
            raise FitError("Cannot fit a power law to empty data")
        fit_range = (float(xs.min()), float(xs.max()))
    lo, hi = map(float, fit_range)
    mask = (xs >= lo * (1 - _WINDOW_RTOL)) & (xs <= hi * (1 + _WINDOW_RTOL))
    n = int(mask.sum())
    if n < 3:
        raise FitError(
            "A power-law fit needs at least 3 points in [%s, %s], got %i"
            % (lo, hi, n)
        )
    x, y = xs[mask], ys[mask]
    if np.any(x <= 0) or np.any(y <= 0):
        raise FitError("Power-law fits need positive values in the window")
    res = stats.linregress(np.log(x), np.log(y))
    return PowerLawFit(
        exponent=float(res.slope),
        log_prefactor=float(res.intercept),
        r_squared=float(np.clip(res.rvalue**2, 0, 1)),
        fit_range=(lo, hi),
        n_points=n,
        exponent_stderr=float(res.stderr),
    )


def measure_x_max(
    config: SimConfig, direction=None, extend_horizon: bool = False
):
    """Run one ensemble and extract its maximum mean position

    Parameters
    ----------
    config: SimConfig
        The experiment
    direction: {'rightward', 'leftward'}
        The drift direction. If None, :func:`default_direction` is used
    extend_horizon: bool
        If True, the horizon is doubled as long as the maximum does not lie
        within the ``'analysis.return_fraction'`` of the horizon (up to
        ``'analysis.max_horizon'``)

    Returns
    -------
    CentroidSeries
        The series of the final run
    MaxDisplacement
        Its maximum
    SimConfig
        The configuration of the final run"""
    if direction is None:
        direction = default_direction(config)
    max_horizon = rcParams["analysis.max_horizon"]
    while True:
        series = run_ensemble(config)
        md = extract_x_max(series, direction)
        settled = (
            md.t_max < rcParams["analysis.return_fraction"] * config.horizon
        )
        if not extend_horizon or settled or config.horizon >= max_horizon:
            break
        horizon = min(2 * config.horizon, max_horizon)
        logger.info(
            "Maximum at t=%i of %i for theta=%s, W=%s. Rerunning with T=%i",
            md.t_max,
            config.horizon,
            config.theta,
            config.disorder_width,
            horizon,
        )
        config = config.replace(horizon=horizon)
    if not md.returned:
        warn(
            "The centroid did not return within %i steps (theta=%s, W=%s)"
            % (config.horizon, config.theta, config.disorder_width)
        )
    return series, md, config


@docstrings.get_sections(base="sweep")
@docstrings.dedent
def sweep_points(
    base: SimConfig,
    points: Sequence[dict],
    direction=None,
    extend_horizon: bool = False,
) -> SweepResult:
    """
    Run one ensemble per sweep point

    Parameters
    ----------
    base: SimConfig
        The configuration that is shared by all sweep points. Sweep point
        ``k`` uses the master seed ``base.master_seed + k``
    points: list of dict
        The SimConfig attributes of each sweep point, e.g.
        ``{"theta": 0.1, "horizon": 1000}``
    direction: {'rightward', 'leftward'}
        The drift direction. If None, it is derived from the initial state
    extend_horizon: bool
        If True, the horizon of a sweep point is extended until its maximum
        is reached well before the end of the run"""
    rows = []
    result = SweepResult(pd.DataFrame())
    for k, params in enumerate(points):
        config = base.replace(
            master_seed=(base.master_seed + k) % 2**64, **params
        )
        logger.info(
            "Sweep point %i/%i: %s",
            k + 1,
            len(points),
            ", ".join("%s=%.6g" % item for item in params.items()),
        )
        series, md, config = measure_x_max(config, direction, extend_horizon)
        row = {
            _COLUMNS.get(key, key): val
            for key, val in params.items()
            if key != "horizon"
        }
        row.update(
            x_max=md.x_max,
            t_max=md.t_max,
            horizon=md.horizon,
            returned=md.returned,
            return_time=return_time(
                series, direction or default_direction(config)
            ),
        )
        rows.append(row)
        result.series.append(series)
        result.configs.append(config)
    result.table = pd.DataFrame(rows)
    return result


docstrings.delete_params("sweep.parameters", "points")

#: column names of swept SimConfig attributes in the sweep tables
_COLUMNS = {"disorder_width": "W"}


@docstrings.dedent
def sweep_theta(base: SimConfig, thetas: ArrayLike, **kwargs) -> SweepResult:
    """
    Maximum mean position as a function of the coin angle

    Parameters
    ----------
    %(sweep.parameters.no_points)s
    thetas: np.ndarray
        The coin angles, each within ``(0, pi/2]``

    Returns
    -------
    SweepResult
        The table with the columns ``theta, x_max, t_max, ...``"""
    thetas = [float(theta) for theta in thetas]
    for theta in thetas:
        if not 0 < theta <= np.pi / 2:
            raise ConfigurationError(
                "Sweep angles must lie in (0, pi/2], got %r" % theta,
                key="theta",
            )
    return sweep_points(base, [{"theta": theta} for theta in thetas], **kwargs)


@docstrings.dedent
def sweep_disorder(
    base: SimConfig, widths: ArrayLike, **kwargs
) -> SweepResult:
    """
    Maximum mean position as a function of the disorder width

    Parameters
    ----------
    %(sweep.parameters.no_points)s
    widths: np.ndarray
        The disorder widths, each > 0

    Returns
    -------
    SweepResult
        The table with the columns ``W, x_max, t_max, ...``"""
    widths = [float(w) for w in widths]
    for w in widths:
        if not w > 0:
            raise ConfigurationError(
                "Sweep disorder widths must be > 0, got %r" % w,
                key="disorder_width",
            )
    points = [{"disorder_width": w} for w in widths]
    return sweep_points(base, points, **kwargs)


@docstrings.dedent
def sweep_grid(
    base: SimConfig,
    thetas: ArrayLike,
    widths: ArrayLike,
    horizons: dict = None,
    **kwargs,
) -> SweepResult:
    """
    Maximum mean position on a grid of coin angles and disorder widths

    Parameters
    ----------
    %(sweep.parameters.no_points)s
    thetas: np.ndarray
        The coin angles, each within ``[0, pi/2]``
    widths: np.ndarray
        The disorder widths, each ``>= 0``
    horizons: dict
        Horizons of single grid points, keyed by ``(theta, W)``. The other
        points use ``base.horizon``

    Returns
    -------
    SweepResult
        The table with the columns ``theta, W, x_max, t_max, ...``, with
        the disorder width varying fastest"""
    horizons = horizons or {}
    points = []
    for theta in thetas:
        for w in widths:
            point = {"theta": float(theta), "disorder_width": float(w)}
            if (theta, w) in horizons:
                point["horizon"] = int(horizons[theta, w])
            points.append(point)
    return sweep_points(base, points, **kwargs)


def breakdown_ratio(fit: PowerLawFit, x: float, x_max: float) -> float:
    """Ratio of the power-law extrapolation at `x` to the measured maximum

    Values well above 1 show that the measured maximum falls below the
    scaling law."""
    if x_max <= 0:
        return np.inf
    return float(fit.predict(x) / x_max)

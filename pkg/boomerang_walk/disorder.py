"""Disorder realizations and ensemble averages

This module draws the random phase fields, runs the walk of one disorder
realization over the full time horizon and averages the centroid series of
many realizations.

Every realization owns a random stream that is derived from the master seed
and the realization index only. The ensemble average is accumulated in the
order of the realization index, so the result does not depend on how many
worker processes computed the realizations."""

# SPDX-FileCopyrightText: 2024 boomerang-walk developers
#
# SPDX-License-Identifier: LGPL-3.0-only

from __future__ import annotations

import dataclasses
import enum
import logging
import time
from dataclasses import dataclass
from functools import partial
from multiprocessing import Pool
from typing import Iterator, Sequence

import numpy as np
import pandas as pd
import xarray as xr
from numpy.typing import NDArray
from psyplot.docstring import docstrings

from boomerang_walk.common import ConfigurationError
from boomerang_walk.config.rcsetup import rcParams
from boomerang_walk.walk import (
    CoinAngle,
    InitialStateAngles,
    Walker,
    phase_factors,
    probabilities,
)

logger = logging.getLogger(__name__)

_MAX_SEED = 2**64


class DisorderMode(str, enum.Enum):
    """Time structure of the phase disorder"""

    #: one field per realization, reused at every step
    STATIC = "static"

    #: a fresh field at every step
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class DisorderField:
    """The random phases of one disorder realization

    Parameters
    ----------
    nu: np.ndarray
        The phase parameters per site, each within ``[-W, W]``
    mode: DisorderMode
        Whether the field is kept for the whole run or redrawn each step"""

    nu: NDArray[np.float64]
    mode: DisorderMode = DisorderMode.STATIC

    @property
    def n_sites(self) -> int:
        return len(self.nu)

    @property
    def phases(self) -> NDArray[np.complex128]:
        """The factors ``exp(2 pi i nu)``"""
        return phase_factors(self.nu)

    def mirrored(self) -> DisorderField:
        """The field reflected at the center of the lattice"""
        return dataclasses.replace(self, nu=self.nu[::-1].copy())


@dataclass(frozen=True)
class SimConfig:
    """The full description of one ensemble experiment

    Parameters
    ----------
    theta: float
        The coin angle in ``[0, pi/2]``
    disorder_width: float
        The width ``W >= 0`` of the uniform phase distribution
    alpha: float
        Polar Bloch angle of the initial coin state in ``[0, pi]``
    beta: float
        Relative phase of the initial coin state in ``[0, 2 pi)``
    horizon: int
        The number of steps ``T >= 1``
    ensemble_size: int
        The number of disorder realizations ``M >= 1``
    master_seed: int
        Unsigned 64-bit seed from which all realizations are derived
    disorder_mode: DisorderMode
        ``'static'`` or ``'dynamic'`` disorder
    mirror_disorder: bool
        If True, every realization uses the site-mirrored field. Running
        ``|L>`` with mirrored fields reproduces the ``|R>`` run reflected at
        the origin"""

    theta: float
    disorder_width: float
    alpha: float = 0.0
    beta: float = 0.0
    horizon: int = 300
    ensemble_size: int = 5000
    master_seed: int = 42
    disorder_mode: DisorderMode = DisorderMode.STATIC
    mirror_disorder: bool = False

    def __post_init__(self):
        CoinAngle(self.theta)
        InitialStateAngles(self.alpha, self.beta)
        if not self.disorder_width >= 0:
            raise ConfigurationError(
                "disorder_width must be >= 0, got %r" % self.disorder_width,
                key="disorder_width",
            )
        for key, value in [
            ("horizon", self.horizon),
            ("ensemble_size", self.ensemble_size),
        ]:
            if int(value) != value or value < 1:
                raise ConfigurationError(
                    "%s must be an integer >= 1, got %r" % (key, value),
                    key=key,
                )
            object.__setattr__(self, key, int(value))
        if int(self.master_seed) != self.master_seed or not (
            0 <= self.master_seed < _MAX_SEED
        ):
            raise ConfigurationError(
                "master_seed must be an unsigned 64-bit integer, got %r"
                % (self.master_seed,),
                key="master_seed",
            )
        object.__setattr__(self, "master_seed", int(self.master_seed))
        try:
            mode = DisorderMode(self.disorder_mode)
        except ValueError:
            raise ConfigurationError(
                "disorder_mode must be one of %s, got %r"
                % ([m.value for m in DisorderMode], self.disorder_mode),
                key="disorder_mode",
            ) from None
        object.__setattr__(self, "disorder_mode", mode)
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(
            self, "disorder_width", float(self.disorder_width)
        )
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def coin(self) -> CoinAngle:
        return CoinAngle(self.theta)

    @property
    def angles(self) -> InitialStateAngles:
        return InitialStateAngles(self.alpha, self.beta)

    def replace(self, **kwargs) -> SimConfig:
        """Create a copy with updated parameters"""
        return dataclasses.replace(self, **kwargs)

    def to_dict(self) -> dict:
        """The parameters as plain python types"""
        ret = dataclasses.asdict(self)
        ret["disorder_mode"] = self.disorder_mode.value
        return ret


@dataclass(frozen=True)
class CentroidSeries:
    """Time series of the (ensemble-averaged) centroid

    Parameters
    ----------
    x_mean: np.ndarray
        The centroid ``X(t)`` for ``t = 0, ..., T``
    x_r: np.ndarray
        The part of the centroid carried by the ``|R>`` component
    x_l: np.ndarray
        The part of the centroid carried by the ``|L>`` component
    x_stderr: np.ndarray
        The standard error of `x_mean` across the realizations
    samples: int
        The number of realizations in the average"""

    x_mean: NDArray[np.float64]
    x_r: NDArray[np.float64]
    x_l: NDArray[np.float64]
    x_stderr: NDArray[np.float64]
    samples: int = 1

    def __post_init__(self):
        arrays = []
        for name in ["x_mean", "x_r", "x_l", "x_stderr"]:
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
            arrays.append(arr)
        if len({len(arr) for arr in arrays}) != 1:
            raise ConfigurationError(
                "All columns of a centroid series need the same length"
            )

    @property
    def horizon(self) -> int:
        """The last time index ``T``"""
        return len(self.x_mean) - 1

    @property
    def times(self) -> NDArray[np.int64]:
        return np.arange(len(self.x_mean))

    def to_frame(self) -> pd.DataFrame:
        """The series as a table with the columns of the CSV output"""
        return pd.DataFrame(
            {
                "t": self.times,
                "x_mean": self.x_mean,
                "x_r": self.x_r,
                "x_l": self.x_l,
                "x_stderr": self.x_stderr,
            }
        )

    def to_dataset(self, config: SimConfig | None = None) -> xr.Dataset:
        """The series as a dataset that can be visualized with psyplot

        Parameters
        ----------
        config: SimConfig
            If given, its parameters are stored as global attributes"""
        ds = xr.Dataset(
            {
                "x_mean": ("t", self.x_mean, {"long_name": "centroid"}),
                "x_r": ("t", self.x_r, {"long_name": "R-component centroid"}),
                "x_l": ("t", self.x_l, {"long_name": "L-component centroid"}),
                "x_stderr": (
                    "t",
                    self.x_stderr,
                    {"long_name": "standard error of the centroid"},
                ),
            },
            coords={"t": ("t", self.times, {"long_name": "time step"})},
            attrs={"samples": self.samples},
        )
        for name in ["x_mean", "x_r", "x_l", "x_stderr"]:
            ds[name].attrs["units"] = "sites"
        if config is not None:
            ds.attrs.update(
                {
                    key: int(val) if isinstance(val, bool) else val
                    for key, val in config.to_dict().items()
                }
            )
        return ds


@dataclass(frozen=True)
class ProbabilityProfile:
    """Ensemble averaged site probabilities at selected times

    Parameters
    ----------
    times: np.ndarray
        The time steps of the snapshots
    positions: np.ndarray
        The site positions ``n - n0``
    p: np.ndarray
        ``P_n(t)`` with shape ``(len(times), len(positions))``
    p_r: np.ndarray
        The ``|R>`` component of `p`
    p_l: np.ndarray
        The ``|L>`` component of `p`
    samples: int
        The number of realizations in the average"""

    times: NDArray[np.int64]
    positions: NDArray[np.int64]
    p: NDArray[np.float64]
    p_r: NDArray[np.float64]
    p_l: NDArray[np.float64]
    samples: int

    def to_dataset(self) -> xr.Dataset:
        return xr.Dataset(
            {
                "p": (("t", "n"), self.p),
                "p_r": (("t", "n"), self.p_r),
                "p_l": (("t", "n"), self.p_l),
            },
            coords={"t": self.times, "n": self.positions},
            attrs={"samples": self.samples},
        )

    def to_frame(self) -> pd.DataFrame:
        """Long table with the columns ``t, n, p, p_r, p_l``"""
        return self.to_dataset().to_dataframe().reset_index()[
            ["t", "n", "p", "p_r", "p_l"]
        ]


class EnsembleAccumulator:
    """Running mean and variance of equally shaped arrays

    Values are combined with Welford's update in the order in which they are
    added."""

    def __init__(self):
        self.count = 0
        self.mean = None
        self._m2 = None

    def add(self, values: NDArray[np.float64]):
        self.count += 1
        if self.mean is None:
            self.mean = np.array(values, dtype=float)
            self._m2 = np.zeros_like(self.mean)
        else:
            delta = values - self.mean
            self.mean += delta / self.count
            self._m2 += delta * (values - self.mean)

    @property
    def stderr(self) -> NDArray[np.float64]:
        """The standard error of :attr:`mean`"""
        if self.count < 2:
            return np.zeros_like(self.mean)
        std = np.sqrt(self._m2 / (self.count - 1))
        return std / np.sqrt(self.count)


def realization_stream(
    master_seed: int, realization_index: int
) -> np.random.Generator:
    """The random stream of one disorder realization

    The stream only depends on `master_seed` and `realization_index`, so
    realizations can be generated in any order and on any process."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(realization_index,))
    return np.random.Generator(np.random.Philox(seq))


def sample_field(
    width: float,
    n_sites: int,
    stream: np.random.Generator,
    mode: DisorderMode = DisorderMode.STATIC,
) -> DisorderField:
    """Draw i.i.d. uniform phases on ``[-width, width]``

    Parameters
    ----------
    width: float
        The disorder width ``W >= 0``. ``W = 0`` gives the all-zero field
    n_sites: int
        The number of lattice sites
    stream: np.random.Generator
        The random stream to draw from
    mode: DisorderMode
        The mode that is attached to the field

    Raises
    ------
    ConfigurationError
        If `width` is negative"""
    if not width >= 0:
        raise ConfigurationError(
            "The disorder width must be >= 0, got %r" % width,
            key="disorder_width",
        )
    nu = stream.uniform(-width, width, n_sites)
    return DisorderField(nu, DisorderMode(mode))


def centroid(p: NDArray[np.float64], origin_index: int) -> float:
    """The mean position ``sum_n (n - n0) P_n`` relative to the origin

    No normalization is applied to `p`."""
    positions = np.arange(len(p)) - origin_index
    return float(np.dot(positions, p))


def component_centroid(p_c: NDArray[np.float64], origin_index: int) -> float:
    """The contribution of one coin component to the centroid

    `p_c` is the unnormalized component distribution (``P^R`` or ``P^L``),
    so the two component centroids add up to the :func:`centroid` of
    ``P = P^R + P^L``."""
    return centroid(p_c, origin_index)


def _evolve(config: SimConfig, realization_index: int) -> Iterator[Walker]:
    """Yield the walker of one realization at every time ``0, ..., T``"""
    stream = realization_stream(config.master_seed, realization_index)
    walker = Walker(config.angles, config.coin, config.horizon)
    yield walker
    phases = None
    for _ in range(config.horizon):
        if phases is None or config.disorder_mode is DisorderMode.DYNAMIC:
            field = sample_field(
                config.disorder_width,
                walker.n_sites,
                stream,
                config.disorder_mode,
            )
            if config.mirror_disorder:
                field = field.mirrored()
            phases = field.phases
        walker.step(phases)
        yield walker


def run_realization(
    config: SimConfig, realization_index: int
) -> CentroidSeries:
    """Run the walk of a single disorder realization

    Parameters
    ----------
    config: SimConfig
        The experiment
    realization_index: int
        The index of the realization within the ensemble

    Returns
    -------
    CentroidSeries
        The centroid and its components at ``t = 0, ..., T`` with
        ``samples = 1``"""
    x = np.zeros((3, config.horizon + 1))
    for walker in _evolve(config, realization_index):
        p, p_r, p_l = walker.probabilities()
        origin = walker.origin_index - walker.support.start
        t = walker.time
        x[0, t] = centroid(p, origin)
        x[1, t] = component_centroid(p_r, origin)
        x[2, t] = component_centroid(p_l, origin)
    return CentroidSeries(x[0], x[1], x[2], np.zeros_like(x[0]), samples=1)


def _realization_columns(config, realization_index):
    series = run_realization(config, realization_index)
    return np.vstack([series.x_mean, series.x_r, series.x_l])


def _realization_profile(config, times, realization_index):
    times = set(times)
    ret = []
    for walker in _evolve(config, realization_index):
        if walker.time in times:
            ret.append(np.vstack(probabilities(walker.state)))
    return np.array(ret)


def iter_realizations(func, config: SimConfig) -> Iterator:
    """Map `func` over all realization indices of `config`

    Results are yielded in the order of the realization index, whatever the
    number of worker processes.

    Parameters
    ----------
    func: callable
        A picklable function that takes the realization index
    config: SimConfig
        The experiment

    Yields
    ------
    object
        The result of `func` for realization ``0, 1, ..., M - 1``"""
    indices = range(config.ensemble_size)
    workers = min(rcParams.get_workers(), config.ensemble_size)
    if workers <= 1:
        yield from map(func, indices)
        return
    with Pool(processes=workers) as pool:
        yield from pool.imap(
            func, indices, chunksize=rcParams["ensemble.chunksize"]
        )


@docstrings.get_sections(base="run_ensemble")
@docstrings.dedent
def run_ensemble(config: SimConfig) -> CentroidSeries:
    """Average the centroid series of all disorder realizations

    Parameters
    ----------
    config: SimConfig
        The experiment. Its `ensemble_size` realizations are distributed on
        the worker processes given by the ``'ensemble.workers'`` rcParams key

    Returns
    -------
    CentroidSeries
        The ensemble mean of ``X``, ``X^R`` and ``X^L`` together with the
        standard error of ``X``"""
    logger.debug(
        "Running %i realizations with theta=%s, W=%s, T=%i",
        config.ensemble_size,
        config.theta,
        config.disorder_width,
        config.horizon,
    )
    t0 = time.perf_counter()
    acc = EnsembleAccumulator()
    for columns in iter_realizations(
        partial(_realization_columns, config), config
    ):
        acc.add(columns)
    logger.debug(
        "Finished %i realizations in %.2fs",
        acc.count,
        time.perf_counter() - t0,
    )
    return CentroidSeries(
        acc.mean[0],
        acc.mean[1],
        acc.mean[2],
        acc.stderr[0],
        samples=acc.count,
    )


@docstrings.dedent
def profile_ensemble(
    config: SimConfig, times: Sequence[int]
) -> ProbabilityProfile:
    """Average the site probabilities at selected times

    Parameters
    ----------
    %(run_ensemble.parameters)s
    times: list of int
        The time steps of the snapshots, each within ``[0, T]``

    Returns
    -------
    ProbabilityProfile
        The averaged ``P_n``, ``P^R_n`` and ``P^L_n`` over the full lattice"""
    times = sorted(set(int(t) for t in times))
    if not times or times[0] < 0 or times[-1] > config.horizon:
        raise ConfigurationError(
            "Snapshot times must lie within [0, %i], got %s"
            % (config.horizon, times),
            key="times",
        )
    acc = EnsembleAccumulator()
    for snapshot in iter_realizations(
        partial(_realization_profile, config, times), config
    ):
        acc.add(snapshot)
    n0 = config.horizon + 1
    positions = np.arange(acc.mean.shape[-1]) - n0
    return ProbabilityProfile(
        np.array(times),
        positions,
        acc.mean[:, 0],
        acc.mean[:, 1],
        acc.mean[:, 2],
        samples=acc.count,
    )

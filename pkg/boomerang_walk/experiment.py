"""Experiments, figure presets and output artifacts

This module parses the flat ``key=value`` experiment files, runs the figure
presets and writes the CSV tables, the JSON summary and the YAML manifest of
a run.

All randomness of a run derives from its master seed, so the same
configuration text produces byte-identical CSV and JSON files."""

# SPDX-FileCopyrightText: 2024 boomerang-walk developers
#
# SPDX-License-Identifier: LGPL-3.0-only

from __future__ import annotations

import json
import logging
import os
import os.path as osp
import re
import time
from dataclasses import dataclass, field

import fasteners
import numpy as np
import pandas as pd
import yaml
from psyplot.docstring import docstrings

from boomerang_walk.analysis import (
    Direction,
    breakdown_ratio,
    extract_x_max,
    fit_power_law,
    plateau_level,
    sweep_grid,
)
from boomerang_walk.common import (
    ConfigurationError,
    OutputError,
    SeriesError,
    file_checksum,
)
from boomerang_walk.config.rcsetup import rcParams
from boomerang_walk.disorder import (
    CentroidSeries,
    DisorderMode,
    SimConfig,
    profile_ensemble,
    run_ensemble,
)
from boomerang_walk.walk import InitialStateAngles

logger = logging.getLogger(__name__)

#: The names of the figure presets
PRESETS = ("fig1", "fig2", "fig3", "fig4a", "fig4b", "custom")

#: keys of a configuration file that describe the simulation
SIM_KEYS = (
    "theta",
    "disorder_width",
    "alpha",
    "beta",
    "horizon",
    "ensemble_size",
    "master_seed",
    "disorder_mode",
)

#: all keys of a configuration file
CONFIG_KEYS = ("preset",) + SIM_KEYS + ("output_dir", "format")

#: the simulation keys that a custom experiment has to define
REQUIRED_CUSTOM_KEYS = SIM_KEYS[:-1]

#: the output formats
FORMATS = ("csv", "json")

#: header of the centroid series CSV files
SERIES_COLUMNS = ["t", "x_mean", "x_r", "x_l", "x_stderr"]

#: header of the probability profile CSV files
PROFILE_COLUMNS = ["t", "n", "p", "p_r", "p_l"]

#: name of the JSON summary
SUMMARY_FNAME = "summary.json"

#: name of the plain-text manifest
MANIFEST_FNAME = "manifest.yml"

#: lock file that guards an output directory against concurrent runs
LOCK_FNAME = ".boomerang-walk.lock"

#: the three initial conditions of the boomerang experiments
CONDITIONS = {
    "right": InitialStateAngles.right(),
    "left": InitialStateAngles.left(),
    "symmetric": InitialStateAngles.symmetric(),
}

_MODES = [mode.value for mode in DisorderMode]

_PI_PATTERN = re.compile(
    r"^(?:(?P<num>[0-9.eE+-]+)\s*\*?\s*)?pi(?:\s*/\s*(?P<den>[0-9.eE+-]+))?$"
)


# -----------------------------------------------------------------------------
# ----------------------------- configuration ---------------------------------
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentSpec:
    """A preset together with overrides of its simulation parameters

    Parameters
    ----------
    preset: str
        One of :data:`PRESETS`
    overrides: dict
        Simulation parameters (keys of :data:`SIM_KEYS`) that replace the
        defaults of the preset. Parameters that the preset varies itself
        (e.g. the initial state of ``fig1``) are taken from the preset
    output_dir: str
        The directory for the artifacts
    formats: tuple of str
        The artifacts to write, see :data:`FORMATS`. Defaults to the
        ``'output.formats'`` rcParams key"""

    preset: str = "custom"
    overrides: dict = field(default_factory=dict)
    output_dir: str = None
    formats: tuple = None

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ConfigurationError(
                "preset: Unknown preset %r. Choose one of %s"
                % (self.preset, ", ".join(PRESETS)),
                key="preset",
            )
        unknown = set(self.overrides) - set(SIM_KEYS)
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigurationError(
                "%s: Not a simulation parameter" % key, key=key
            )
        if self.preset == "custom":
            missing = [
                key
                for key in REQUIRED_CUSTOM_KEYS
                if key not in self.overrides
            ]
            if missing:
                raise ConfigurationError(
                    "%s: Missing key(s) %s for the custom preset"
                    % (missing[0], ", ".join(missing)),
                    key=missing[0],
                )
        if self.output_dir is None:
            object.__setattr__(
                self, "output_dir", rcParams["output.directory"]
            )
        if self.formats is None:
            object.__setattr__(self, "formats", rcParams["output.formats"])
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise ConfigurationError(
                "format: Unknown output format(s) %s" % sorted(bad),
                key="format",
            )
        object.__setattr__(self, "formats", tuple(self.formats))

    def base_config(self) -> SimConfig:
        """The resolved simulation parameters of the preset"""
        params = preset_defaults(self.preset)
        params.update(self.overrides)
        try:
            return SimConfig(**params)
        except ConfigurationError as e:
            raise ConfigurationError(
                "%s: %s" % (e.key, e) if e.key else str(e), key=e.key
            ) from e


def preset_defaults(name: str) -> dict:
    """The default simulation parameters of the preset `name`

    Parameters
    ----------
    name: str
        One of :data:`PRESETS`

    Returns
    -------
    dict
        The parameters. Empty for the ``'custom'`` preset"""
    common = dict(
        alpha=0.0,
        beta=0.0,
        ensemble_size=rcParams["presets.ensemble_size"],
        master_seed=rcParams["presets.master_seed"],
        disorder_mode=DisorderMode.STATIC.value,
    )
    defaults = {
        "fig1": dict(theta=np.pi / 4, disorder_width=0.2, horizon=300),
        "fig2": dict(theta=np.pi / 4, disorder_width=0.2, horizon=300),
        "fig3": dict(theta=np.pi / 9, disorder_width=0.1, horizon=500),
        "fig4a": dict(theta=np.pi / 9, disorder_width=0.3, horizon=500),
        "fig4b": dict(theta=np.pi / 4, disorder_width=0.2, horizon=300),
    }
    if name == "custom":
        return {}
    return dict(common, **defaults[name])


def parse_angle(text: str) -> float:
    """Parse a float or a multiple of pi such as ``'7*pi/18'``"""
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_PATTERN.match(text.replace(" ", ""))
    if m is None:
        raise ValueError("Cannot interpret %r as a number" % text)
    num = float(m.group("num")) if m.group("num") else 1.0
    den = float(m.group("den")) if m.group("den") else 1.0
    return num * np.pi / den


def _parse_int(text):
    value = float(text)
    if int(value) != value:
        raise ValueError("%r is not an integer" % text)
    return int(text) if text.strip().lstrip("+-").isdigit() else int(value)


def _parse_formats(text):
    return tuple(s.strip() for s in text.split(",") if s.strip())


_PARSERS = {
    "preset": str.strip,
    "theta": parse_angle,
    "disorder_width": parse_angle,
    "alpha": parse_angle,
    "beta": parse_angle,
    "horizon": _parse_int,
    "ensemble_size": _parse_int,
    "master_seed": _parse_int,
    "disorder_mode": str.strip,
    "output_dir": str.strip,
    "format": _parse_formats,
}

#: ranges of the simulation parameters that are checked while parsing
_RANGES = {
    "theta": (0, np.pi / 2, "[0, pi/2]"),
    "alpha": (0, np.pi, "[0, pi]"),
}


def _check_value(key, value):
    if key in _RANGES:
        lo, hi, desc = _RANGES[key]
        if not lo <= value <= hi:
            raise ConfigurationError(
                "%s: %r is out of range %s" % (key, value, desc), key=key
            )
    elif key == "beta" and not 0 <= value < 2 * np.pi:
        raise ConfigurationError(
            "%s: %r is out of range [0, 2 pi)" % (key, value), key=key
        )
    elif key == "disorder_width" and value < 0:
        raise ConfigurationError(
            "%s: %r must not be negative" % (key, value), key=key
        )
    elif key in ("horizon", "ensemble_size") and value < 1:
        raise ConfigurationError(
            "%s: %r must be at least 1" % (key, value), key=key
        )
    elif key == "master_seed" and not 0 <= value < 2**64:
        raise ConfigurationError(
            "%s: %r is not an unsigned 64-bit integer" % (key, value), key=key
        )
    elif key == "disorder_mode" and value not in _MODES:
        raise ConfigurationError(
            "%s: %r must be 'static' or 'dynamic'" % (key, value), key=key
        )


def parse_config(text: str) -> ExperimentSpec:
    """Parse an experiment file

    The file contains one ``key=value`` pair per line. Empty lines and lines
    starting with ``#`` are ignored. Angles may be given as multiples of
    ``pi``, e.g. ``theta=pi/4``.

    Parameters
    ----------
    text: str
        The content of the file. Valid keys are listed in
        :data:`CONFIG_KEYS`

    Returns
    -------
    ExperimentSpec
        The validated experiment

    Raises
    ------
    ConfigurationError
        For unknown or duplicated keys, values that cannot be parsed or that
        are out of range and missing keys of custom experiments. The error
        message starts with the name of the offending key"""
    values = {}
    for i, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(
                "line %i: Expected key=value, got %r" % (i, line)
            )
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigurationError(
                "%s: Unknown key in line %i. Valid keys are %s"
                % (key, i, ", ".join(CONFIG_KEYS)),
                key=key,
            )
        if key in values:
            raise ConfigurationError(
                "%s: Duplicated key in line %i" % (key, i), key=key
            )
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as e:
            raise ConfigurationError(
                "%s: Cannot parse %r (%s)" % (key, value, e), key=key
            ) from e
        _check_value(key, values[key])
    kws = dict(
        preset=values.pop("preset", "custom"),
        output_dir=values.pop("output_dir", None),
        overrides=values,
    )
    if "format" in values:
        kws["formats"] = values.pop("format")
    spec = ExperimentSpec(**kws)
    spec.base_config()
    return spec


def load_config(fname: str) -> ExperimentSpec:
    """Read and parse the experiment file `fname`"""
    try:
        with open(fname) as f:
            text = f.read()
    except OSError as e:
        raise OutputError("Could not read %s: %s" % (fname, e)) from e
    return parse_config(text)


# -----------------------------------------------------------------------------
# ------------------------------ artifacts ------------------------------------
# -----------------------------------------------------------------------------


@dataclass
class RunManifest:
    """Provenance of one experiment run

    Parameters
    ----------
    preset: str
        The preset that was run
    config: dict
        The resolved base configuration
    master_seed: int
        The master seed of the run
    version: str
        The version of boomerang_walk
    duration: float
        The wall-clock duration in seconds
    checksums: dict
        Mapping from file name (relative to the output directory) to its
        checksum
    requirements: dict
        Versions of the packages that were used"""

    preset: str
    config: dict
    master_seed: int
    version: str
    duration: float = 0.0
    checksums: dict = field(default_factory=dict)
    requirements: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "preset": self.preset,
            "config": self.config,
            "master_seed": self.master_seed,
            "version": self.version,
            "duration": self.duration,
            "checksums": self.checksums,
            "requirements": self.requirements,
        }


def _write_frame(frame: pd.DataFrame, path: str) -> str:
    try:
        frame.to_csv(
            path,
            index=False,
            float_format=rcParams["output.float_format"],
            lineterminator="\n",
            na_rep="",
        )
    except OSError as e:
        raise OutputError("Could not write %s: %s" % (path, e)) from e
    return file_checksum(path)


def write_series_csv(series: CentroidSeries, path: str) -> str:
    """Write a centroid series

    The file has the header ``t,x_mean,x_r,x_l,x_stderr`` and one row per
    time step. Floats are written with 17 significant digits, so
    :func:`read_series_csv` restores the values exactly.

    Parameters
    ----------
    series: CentroidSeries
        The series to write
    path: str
        The output file

    Returns
    -------
    str
        The checksum of the written file"""
    return _write_frame(series.to_frame()[SERIES_COLUMNS], path)


def read_series_csv(path: str, samples: int = 1) -> CentroidSeries:
    """Read a file written by :func:`write_series_csv`

    Parameters
    ----------
    path: str
        The CSV file
    samples: int
        The number of realizations behind the series (not stored in the file)
    """
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except OSError as e:
        raise OutputError("Could not read %s: %s" % (path, e)) from e
    if list(frame.columns) != SERIES_COLUMNS:
        raise SeriesError(
            "%s is not a centroid series. Expected the columns %s, got %s"
            % (path, SERIES_COLUMNS, list(frame.columns))
        )
    return CentroidSeries(
        frame["x_mean"].to_numpy(),
        frame["x_r"].to_numpy(),
        frame["x_l"].to_numpy(),
        frame["x_stderr"].to_numpy(),
        samples=samples,
    )


def write_table_csv(table: pd.DataFrame, path: str) -> str:
    """Write a sweep or summary table and return its checksum"""
    return _write_frame(table, path)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(key): _jsonable(val) for key, val in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(val) for val in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if np.isfinite(value) else None
    if hasattr(value, "to_dict"):
        return _jsonable(value.to_dict())
    return value


def _records(table: pd.DataFrame) -> list:
    return [_jsonable(row) for row in table.to_dict(orient="records")]


def write_summary_json(
    manifest: RunManifest, tables: dict, fits: dict, path: str
) -> str:
    """Write the JSON summary of a run

    Parameters
    ----------
    manifest: RunManifest
        The manifest of the run. Its configuration, seed and checksums are
        included. The duration is not, so the document only depends on the
        configuration
    tables: dict
        Mapping from name to :class:`pandas.DataFrame` of the sweep tables
    fits: dict
        Mapping from name to :class:`~boomerang_walk.analysis.PowerLawFit`
        (or plain dictionaries). Each entry becomes a top-level key
    path: str
        The output file

    Returns
    -------
    str
        The checksum of the written file"""
    doc = {
        "preset": manifest.preset,
        "config": manifest.config,
        "master_seed": manifest.master_seed,
    }
    if tables:
        doc["tables"] = {name: _records(t) for name, t in tables.items()}
    for name, fit in (fits or {}).items():
        doc[name] = fit
    if manifest.checksums:
        doc["checksums"] = manifest.checksums
    try:
        with open(path, "w", newline="\n") as f:
            json.dump(_jsonable(doc), f, sort_keys=True, indent=2)
            f.write("\n")
    except OSError as e:
        raise OutputError("Could not write %s: %s" % (path, e)) from e
    return file_checksum(path)


def write_manifest(manifest: RunManifest, path: str) -> str:
    """Write the plain-text (YAML) manifest of a run"""
    try:
        with open(path, "w") as f:
            yaml.safe_dump(
                _jsonable(manifest.to_dict()),
                f,
                default_flow_style=False,
                sort_keys=True,
            )
    except OSError as e:
        raise OutputError("Could not write %s: %s" % (path, e)) from e
    return file_checksum(path)


class ArtifactWriter:
    """Collect the data files of one run

    Parameters
    ----------
    output_dir: str
        The directory to write into
    formats: tuple of str
        The requested output formats. Tables are only written if ``'csv'``
        is among them"""

    def __init__(self, output_dir, formats=FORMATS):
        self.output_dir = output_dir
        self.formats = formats
        #: checksums of the written files, keyed by file name
        self.checksums = {}

    def path(self, fname):
        return osp.join(self.output_dir, fname)

    def register(self, fname, checksum):
        logger.debug("Wrote %s (%s)", self.path(fname), checksum)
        self.checksums[fname] = checksum

    def series(self, fname, series):
        if "csv" in self.formats:
            self.register(fname, write_series_csv(series, self.path(fname)))

    def table(self, fname, table):
        if "csv" in self.formats:
            self.register(fname, write_table_csv(table, self.path(fname)))

    def remove_all(self):
        """Delete every file written so far"""
        for fname in list(self.checksums):
            try:
                os.remove(self.path(fname))
            except OSError:
                logger.debug("Could not remove %s", fname, exc_info=True)
        self.checksums.clear()


# -----------------------------------------------------------------------------
# ------------------------------- presets -------------------------------------
# -----------------------------------------------------------------------------


def _label(value):
    return "%g" % round(float(value), 6)


def _deg(theta):
    return _label(np.degrees(theta)) + "deg"


def _run_conditions(base, widths, writer, prefix, tag_width, profiles=False):
    rows = []
    for w in widths:
        for name, angles in CONDITIONS.items():
            config = base.replace(
                disorder_width=w,
                alpha=angles.alpha,
                beta=angles.beta,
                mirror_disorder=name == "left",
            )
            logger.info("%s: %s start, W=%s", prefix, name, w)
            series = run_ensemble(config)
            suffix = "_W" + _label(w) if tag_width else ""
            writer.series("%s_%s%s.csv" % (prefix, name, suffix), series)
            direction = (
                Direction.LEFTWARD if name == "left" else Direction.RIGHTWARD
            )
            md = extract_x_max(series, direction)
            level, band = plateau_level(series)
            rows.append(
                dict(
                    condition=name,
                    W=w,
                    x_max=md.x_max,
                    t_max=md.t_max,
                    plateau=level,
                    plateau_band=band,
                    final_x_r=series.x_r[-1],
                    final_x_l=series.x_l[-1],
                )
            )
            if profiles and "csv" in writer.formats:
                profile = profile_ensemble(config, [config.horizon])
                fname = "%s_%s%s_profile.csv" % (prefix, name, suffix)
                writer.table(fname, profile.to_frame()[PROFILE_COLUMNS])
    table = pd.DataFrame(rows)
    writer.table("%s_summary.csv" % prefix, table)
    return table


def _run_fig1(spec, base, writer):
    widths = (0.0, 0.2)
    if "disorder_width" in spec.overrides:
        widths = tuple(dict.fromkeys((0.0, base.disorder_width)))
    return {"fig1": _run_conditions(base, widths, writer, "fig1", True)}, {}


def _run_fig2(spec, base, writer):
    table = _run_conditions(
        base, (base.disorder_width,), writer, "fig2", False, profiles=True
    )
    return {"fig2": table}, {}


#: coin angles of the fig3 time series
FIG3_THETAS = (np.pi / 9, np.pi / 4, 7 * np.pi / 18)

#: disorder widths of the fig3 and fig4a families
FAMILY_WIDTHS = (0.1, 0.2, 0.3, 0.4, 0.5)

#: coin angles of the fig4b family, within the theta**-2 regime
FIG4B_THETAS = (np.pi / 9, np.pi / 6, np.pi / 4, 16 * np.pi / 45)

#: coin angle beyond the theta**-2 regime that is checked by fig4a
BREAKDOWN_THETA = 7 * np.pi / 18


def _with_base(values, value):
    """`values` plus `value`, unless it is already among them"""
    values = [float(v) for v in values]
    if not np.any(np.isclose(values, value, rtol=1e-12, atol=0)):
        values.append(float(value))
    return sorted(values)


def _write_grid(prefix, result, writer):
    for config, series in zip(result.configs, result.series):
        writer.series(
            "%s_theta%s_W%s.csv"
            % (prefix, _deg(config.theta), _label(config.disorder_width)),
            series,
        )
    writer.table("%s.csv" % prefix, result.table)


def _family_fits(table, curve, against, fit_range):
    """One power-law fit per value of the `curve` column"""
    fits = {}
    for value, sub in table.groupby(curve, sort=True):
        fits[value] = fit_power_law(sub[against], sub["x_max"], fit_range)
        logger.info(
            "%s=%s: exponent %.3f, r^2 %.4f",
            curve,
            _label(value),
            fits[value].exponent,
            fits[value].r_squared,
        )
    return fits


def _run_fig3(spec, base, writer):
    horizons = {}
    if "horizon" not in spec.overrides:
        horizons = {
            (theta, w): 2000 if (theta, w) == (np.pi / 9, 0.1) else 500
            for theta in FIG3_THETAS
            for w in FAMILY_WIDTHS
        }
    result = sweep_grid(
        base,
        FIG3_THETAS,
        FAMILY_WIDTHS,
        horizons=horizons,
        direction=Direction.RIGHTWARD,
    )
    _write_grid("fig3", result, writer)
    return {"fig3": result.table}, {}


def _run_fig4a(spec, base, writer):
    lo, hi = rcParams["analysis.theta_fit_range"]
    thetas = list(np.geomspace(lo, hi, 8)) + [BREAKDOWN_THETA]
    widths = _with_base(FAMILY_WIDTHS, base.disorder_width)
    result = sweep_grid(
        base,
        thetas,
        widths,
        direction=Direction.RIGHTWARD,
        extend_horizon=True,
    )
    _write_grid("fig4a", result, writer)
    table = result.table
    curves = {}
    for w, fit in _family_fits(table, "W", "theta", (lo, hi)).items():
        row = table[(table["W"] == w) & (table["theta"] == BREAKDOWN_THETA)]
        x_max = float(row["x_max"].iloc[0])
        curves["W" + _label(w)] = dict(
            fit.to_dict(),
            breakdown=dict(
                theta=BREAKDOWN_THETA,
                x_max=x_max,
                ratio=breakdown_ratio(fit, BREAKDOWN_THETA, x_max),
            ),
        )
    fit_doc = dict(curves["W" + _label(base.disorder_width)], curves=curves)
    return {"fig4a": table}, {"fit": fit_doc}


def _run_fig4b(spec, base, writer):
    lo, hi = rcParams["analysis.disorder_fit_range"]
    widths = np.geomspace(lo, hi, 8)
    thetas = _with_base(FIG4B_THETAS, base.theta)
    result = sweep_grid(
        base,
        thetas,
        widths,
        direction=Direction.RIGHTWARD,
        extend_horizon=True,
    )
    _write_grid("fig4b", result, writer)
    table = result.table
    curves = {
        "theta" + _deg(theta): fit.to_dict()
        for theta, fit in _family_fits(table, "theta", "W", (lo, hi)).items()
    }
    fit_doc = dict(curves["theta" + _deg(base.theta)], curves=curves)
    return {"fig4b": table}, {"fit": fit_doc}


def _run_custom(spec, base, writer):
    series = run_ensemble(base)
    writer.series("series.csv", series)
    return {}, {}


_PIPELINES = {
    "fig1": _run_fig1,
    "fig2": _run_fig2,
    "fig3": _run_fig3,
    "fig4a": _run_fig4a,
    "fig4b": _run_fig4b,
    "custom": _run_custom,
}


@docstrings.dedent
def run_experiment(spec: ExperimentSpec) -> RunManifest:
    """
    Run a preset and write its artifacts

    Parameters
    ----------
    spec: ExperimentSpec
        The experiment to run

    Returns
    -------
    RunManifest
        The manifest that is also written to ``manifest.yml`` in the output
        directory

    Raises
    ------
    OutputError
        If the output directory is in use by another run or a file cannot be
        written. Files of the failed run are removed"""
    import boomerang_walk

    t0 = time.perf_counter()
    base = spec.base_config()
    output_dir = spec.output_dir
    try:
        os.makedirs(output_dir, exist_ok=True)
    except OSError as e:
        raise OutputError(
            "Could not create %s: %s" % (output_dir, e)
        ) from e
    lock_file = osp.join(output_dir, LOCK_FNAME)
    lock = fasteners.InterProcessLock(lock_file)
    if not lock.acquire(blocking=False):
        raise OutputError("%s is used by another run" % output_dir)
    writer = ArtifactWriter(output_dir, spec.formats)
    logger.info("Running preset %s into %s", spec.preset, output_dir)
    try:
        tables, fits = _PIPELINES[spec.preset](spec, base, writer)
        versions = boomerang_walk.get_versions()
        manifest = RunManifest(
            preset=spec.preset,
            config=base.to_dict(),
            master_seed=base.master_seed,
            version=versions["version"],
            checksums=dict(writer.checksums),
            requirements=versions["requirements"],
        )
        if "json" in spec.formats:
            writer.register(
                SUMMARY_FNAME,
                write_summary_json(
                    manifest, tables, fits, writer.path(SUMMARY_FNAME)
                ),
            )
        manifest.checksums = dict(writer.checksums)
        manifest.duration = time.perf_counter() - t0
        write_manifest(manifest, writer.path(MANIFEST_FNAME))
    except BaseException:
        logger.error("Preset %s failed, removing its output", spec.preset)
        writer.remove_all()
        raise
    finally:
        lock.release()
    logger.info(
        "Finished preset %s in %.1fs", spec.preset, manifest.duration
    )
    return manifest


def fit_table(path, column="x_max", against="theta", fit_range=None):
    """Fit a power law to two columns of a sweep table

    Parameters
    ----------
    path: str
        The CSV file of the sweep table
    column: str
        The dependent variable
    against: str
        The independent variable (``'theta'`` or ``'W'``)
    fit_range: tuple of float
        The window of `against`. If None, all rows are used

    Returns
    -------
    boomerang_walk.analysis.PowerLawFit

    Raises
    ------
    SeriesError
        If the file cannot be parsed or a column is missing or not numeric"""
    try:
        table = pd.read_csv(path, float_precision="round_trip")
    except OSError as e:
        raise OutputError("Could not read %s: %s" % (path, e)) from e
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise SeriesError("Could not parse %s: %s" % (path, e)) from e
    for key in (column, against):
        if key not in table.columns:
            raise SeriesError(
                "%s has no column %r. Available: %s"
                % (path, key, ", ".join(table.columns))
            )
        try:
            table[key] = pd.to_numeric(table[key])
        except (ValueError, TypeError) as e:
            raise SeriesError(
                "Column %r of %s is not numeric: %s" % (key, path, e)
            ) from e
    return fit_power_law(table[against], table[column], fit_range)

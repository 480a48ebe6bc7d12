"""Default management of the boomerang_walk package

This module defines the runtime parameters of the simulations, the
analysis and the output writers"""

# SPDX-FileCopyrightText: 2024 boomerang-walk developers
#
# SPDX-License-Identifier: LGPL-3.0-only

import os

import numpy as np
from matplotlib.rcsetup import (
    validate_float,
    validate_floatlist,
    validate_int,
)
from psyplot.config.rcsetup import (
    RcParams,
    psyplot_fname,
    validate_stringlist,
)

#: Environment variable that overrides the ``'ensemble.workers'`` key
WORKERS_ENV_KEY = "BOOMERANG_WALK_WORKERS"


def try_and_error(*funcs):
    """Apply multiple validation functions

    Parameters
    ----------
    ``*funcs``
        Validation functions to test

    Returns
    -------
    function"""

    def validate(value):
        exc = None
        for func in funcs:
            try:
                return func(value)
            except (ValueError, TypeError) as e:
                exc = e
        raise exc

    return validate


# -----------------------------------------------------------------------------
# ------------------------- validation functions ------------------------------
# -----------------------------------------------------------------------------


def validate_str(s):
    """Validate a string

    Parameters
    ----------
    s: str

    Returns
    -------
    str

    Raises
    ------
    ValueError"""
    if not isinstance(s, str):
        raise ValueError("Did not found string!")
    return s


def validate_none(b):
    """Validate that None is given

    Parameters
    ----------
    b: {None, 'none'}
        None or string (the case is ignored)

    Returns
    -------
    None

    Raises
    ------
    ValueError"""
    if isinstance(b, str):
        b = b.lower()
    if b is None or b == "none":
        return None
    else:
        raise ValueError('Could not convert "%s" to None' % b)


def validate_positive_int(i):
    """Validate an integer that is at least 1"""
    i = validate_int(i)
    if i < 1:
        raise ValueError("Expected an integer >= 1, got %s" % i)
    return i


def validate_fraction(f):
    """Validate a float in the half-open interval (0, 1]"""
    f = validate_float(f)
    if not 0 < f <= 1:
        raise ValueError("Expected a fraction in (0, 1], got %s" % f)
    return f


def validate_fit_range(v):
    """Validate the ``(lo, hi)`` window of a power-law fit

    Parameters
    ----------
    v: list of float
        Two positive floats with ``lo < hi``

    Returns
    -------
    list of float

    Raises
    ------
    ValueError"""
    v = validate_floatlist(v)
    if len(v) != 2:
        raise ValueError("A fit range needs exactly two values, got %s" % v)
    lo, hi = v
    if not 0 < lo < hi:
        raise ValueError("Expected 0 < lo < hi, got %s" % v)
    return [lo, hi]


def validate_seed(s):
    """Validate an unsigned 64-bit integer"""
    s = validate_int(s)
    if not 0 <= s < 2**64:
        raise ValueError(
            "Expected an unsigned 64-bit integer, got %s" % s
        )
    return s


validate_workers = try_and_error(validate_none, validate_positive_int)


class WalkRcParams(RcParams):
    """RcParams for the boomerang_walk package."""

    HEADER = RcParams.HEADER.replace(
        "psyplotrc.yml", "boomerangrc.yml"
    ).replace("PSYPLOTRC", "BOOMERANGRC")

    def load_from_file(self, fname=None):
        """
        Update rcParams from user-defined settings

        This function updates the instance with what is found in `fname`

        Parameters
        ----------
        fname: str
            Path to the yaml configuration file. Possible keys of the
            dictionary are defined by :data:`config.rcsetup.defaultParams`.
            If None, the :func:`config.rcsetup.psyplot_fname` function is used.

        See Also
        --------
        dump_to_file, psyplot_fname"""
        fname = fname or psyplot_fname(
            env_key="BOOMERANGRC", fname="boomerangrc.yml"
        )
        if fname:
            super(WalkRcParams, self).load_from_file(fname)

    def get_workers(self):
        """The number of worker processes for ensemble runs

        The :data:`WORKERS_ENV_KEY` environment variable takes precedence
        over the ``'ensemble.workers'`` key. ``None`` means one worker per
        CPU.

        Returns
        -------
        int"""
        workers = os.getenv(WORKERS_ENV_KEY)
        if workers:
            workers = validate_positive_int(workers)
        else:
            workers = self["ensemble.workers"]
        return workers or os.cpu_count() or 1


#: :class:`dict` with default values and validation functions
defaultParams = {
    "ensemble.workers": [
        1,
        validate_workers,
        "Number of worker processes for the disorder realizations of one "
        "ensemble. None uses one process per CPU. The results do not depend "
        "on this value. Overridden by the BOOMERANG_WALK_WORKERS environment "
        "variable.",
    ],
    "ensemble.chunksize": [
        16,
        validate_positive_int,
        "Number of realizations that are sent to a worker process at once",
    ],
    "presets.ensemble_size": [
        5000,
        validate_positive_int,
        "Number of disorder realizations per ensemble in the figure presets",
    ],
    "presets.master_seed": [
        42,
        validate_seed,
        "Master seed of the figure presets if no seed is given",
    ],
    "analysis.plateau_fraction": [
        0.2,
        validate_fraction,
        "Trailing fraction of the horizon that is used for the plateau level "
        "of a centroid series",
    ],
    "analysis.theta_fit_range": [
        [np.pi / 90, np.pi / 9],
        validate_fit_range,
        "Window of coin angles used for the power-law fit of the maximum mean "
        "position against theta",
    ],
    "analysis.disorder_fit_range": [
        [0.05, 0.5],
        validate_fit_range,
        "Window of disorder widths used for the power-law fit of the maximum "
        "mean position against W",
    ],
    "analysis.max_horizon": [
        16384,
        validate_positive_int,
        "Largest horizon a sweep point may be extended to when its maximum "
        "mean position is not reached before the end of the run",
    ],
    "analysis.return_fraction": [
        0.75,
        validate_fraction,
        "A sweep point counts as returned if its maximum lies in the first "
        "part of the horizon given by this fraction. Otherwise the horizon "
        "is doubled (if enabled)",
    ],
    "output.directory": [
        "boomerang-output",
        validate_str,
        "Default output directory of the experiments",
    ],
    "output.formats": [
        ["csv", "json"],
        validate_stringlist,
        "The artifacts to write. 'csv' for the data tables and 'json' for "
        "the summary document",
    ],
    "output.float_format": [
        "%.17g",
        validate_str,
        "printf-style format of floats in the CSV files. 17 significant "
        "digits reproduce doubles exactly",
    ],
}

#: :class:`~psyplot.config.rcsetup.RcParams` instance that stores the
#: configuration settings.
rcParams = WalkRcParams(defaultParams=defaultParams)
rcParams.update({key: val[0] for key, val in defaultParams.items()})
rcParams.load_from_file()

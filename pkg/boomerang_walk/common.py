"""Common functions and exceptions used throughout boomerang_walk"""

# SPDX-FileCopyrightText: 2024 boomerang-walk developers
#
# SPDX-License-Identifier: LGPL-3.0-only

import hashlib


class WalkError(Exception):
    """Base class for all errors raised by boomerang_walk"""


class ConfigurationError(WalkError, ValueError):
    """Invalid simulation or experiment parameters

    Parameters
    ----------
    msg: str
        The error message
    key: str
        The name of the offending parameter, if known"""

    def __init__(self, msg, key=None):
        super(ConfigurationError, self).__init__(msg)
        self.key = key


class DimensionError(WalkError, ValueError):
    """Arrays of a state and a disorder field do not fit together"""


class BoundaryOverflowError(WalkError, RuntimeError):
    """Amplitude reached the edge of the lattice

    The lattice is sized such that this never happens for a correctly
    configured run, so this always signals a broken invariant."""


class SeriesError(WalkError, ValueError):
    """Invalid input for the analysis of a centroid series"""


class FitError(WalkError, ValueError):
    """A power law cannot be fitted to the given data"""


class OutputError(WalkError, OSError):
    """Writing or reading an output artifact failed"""


def file_checksum(path):
    """Compute the sha256 checksum of the file at `path`

    Parameters
    ----------
    path: str
        The file to hash

    Returns
    -------
    str
        The hex digest, prefixed with ``'sha256:'``"""
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as f:
            for chunk in iter(lambda: f.read(1 << 16), b""):
                digest.update(chunk)
    except OSError as e:
        raise OutputError("Could not read %s: %s" % (path, e)) from e
    return "sha256:" + digest.hexdigest()

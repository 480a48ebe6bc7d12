# SPDX-FileCopyrightText: 2024 boomerang-walk developers
#
# SPDX-License-Identifier: LGPL-3.0-only

"""boomerang-walk

Disorder-averaged discrete-time quantum walks and the quantum boomerang
effect
"""

from __future__ import annotations

import datetime as dt
import logging

import yaml
from funcargparse import FuncArgParser

import boomerang_walk.config as config
from boomerang_walk._version import __version__
from boomerang_walk.common import ConfigurationError, WalkError
from boomerang_walk.config.rcsetup import rcParams

__license__ = "LGPL-3.0-only"

__status__ = "Development"

logger = logging.getLogger(__name__)
logger.debug(
    "%s: Initializing boomerang_walk, version %s",
    dt.datetime.now().isoformat(),
    __version__,
)
logger.debug("Logging configuration file: %s", config.logcfg_path)
logger.debug("Configuration file: %s", config.config_path)


rcParams.HEADER += "\n\nboomerang-walk version: " + __version__


def get_versions(requirements=True):
    """The version of this package and of its numerical dependencies

    Parameters
    ----------
    requirements: bool
        If True, include the versions of the required packages

    Returns
    -------
    dict
        ``'version'`` and (optionally) a ``'requirements'`` mapping"""
    ret = {"version": __version__}
    if requirements:
        req = ret["requirements"] = {}
        for modname in ["numpy", "scipy", "pandas", "xarray", "psyplot"]:
            try:
                mod = __import__(modname)
            except Exception:
                logger.error("Could not load %s!", modname, exc_info=True)
            else:
                req[modname] = mod.__version__
    return ret


def run(config_file):
    """
    Run the experiment that is described in a configuration file

    Parameters
    ----------
    config_file: str
        The path to the ``key=value`` experiment file"""
    from boomerang_walk.experiment import load_config, run_experiment

    manifest = run_experiment(load_config(config_file))
    _report(manifest)


def preset(name, seed=None, out=None):
    """
    Run one of the figure presets

    Parameters
    ----------
    name: str
        The name of the preset
    seed: int
        The master seed. If None, the ``'presets.master_seed'`` key of the
        rcParams is used
    out: str
        The output directory. If None, the ``'output.directory'`` key of the
        rcParams is used"""
    from boomerang_walk.experiment import ExperimentSpec, run_experiment

    overrides = {}
    if seed is not None:
        overrides["master_seed"] = seed
    spec = ExperimentSpec(preset=name, overrides=overrides, output_dir=out)
    _report(run_experiment(spec))


def fit(csv, column="x_max", against="theta", fit_range=None):
    """
    Fit a power law to a sweep table and print the result

    Parameters
    ----------
    csv: str
        The CSV file of a sweep
    column: str
        The column with the dependent variable
    against: str
        The column with the independent variable
    fit_range: str
        The window ``lo,hi`` of the independent variable. If None, all rows
        are used"""
    from boomerang_walk.experiment import fit_table

    if fit_range is not None:
        fit_range = _parse_range(fit_range)
    res = fit_table(csv, column, against, fit_range)
    print(yaml.safe_dump(res.to_dict(), default_flow_style=False), end="")


def _parse_range(text):
    try:
        lo, hi = map(float, text.split(","))
    except ValueError:
        raise ConfigurationError(
            "range: Expected two comma-separated numbers, got %r" % text,
            key="range",
        ) from None
    return lo, hi


def _report(manifest):
    for fname, checksum in sorted(manifest.checksums.items()):
        print("%s  %s" % (checksum, fname))


_COMMANDS = {"run": run, "preset": preset, "fit": fit}


def get_parser(create=True):
    """Return the parser of the ``boomerang-walk`` command

    Parameters
    ----------
    create: bool
        If True, the arguments are created

    Returns
    -------
    funcargparse.FuncArgParser
        The :class:`argparse.ArgumentParser` instance

    See Also
    --------
    main"""
    from boomerang_walk.experiment import PRESETS

    parser = FuncArgParser(
        prog="boomerang-walk",
        description=(
            "Simulate disorder-averaged one-dimensional quantum walks and "
            "measure the boomerang effect"
        ),
    )
    parser.add_argument(
        "-V", "--version", action="version", version=__version__
    )
    parser.add_subparsers(title="Commands", dest="command", required=True)

    sp = parser.setup_subparser(run, return_parser=True)
    sp.update_arg("config_file", metavar="config-file")

    sp = parser.setup_subparser(preset, return_parser=True)
    sp.update_arg("name", choices=[p for p in PRESETS if p != "custom"])
    sp.update_arg("seed", short=None, type=int, dest="seed")
    sp.update_arg("out", short=None, metavar="DIR", dest="out")

    sp = parser.setup_subparser(fit, return_parser=True)
    sp.update_arg("column", short=None, dest="column")
    sp.update_arg(
        "against", short=None, choices=["theta", "W"], dest="against"
    )
    sp.update_arg("fit_range", long="range", metavar="lo,hi", dest="fit_range")

    parser.epilog = """
Exit status is 0 on success, 1 for an invalid configuration and 2 for
runtime and I/O failures. The number of worker processes can be set with the
BOOMERANG_WALK_WORKERS environment variable."""

    if create:
        parser.create_arguments(subparsers=True)

    return parser


def main(args=None):
    """Run the ``boomerang-walk`` command

    Parameters
    ----------
    args: list of str
        The command line arguments. If None, :data:`sys.argv` is used

    Returns
    -------
    int
        The exit status"""
    parser = get_parser()
    try:
        kws = vars(parser.parse_args(args))
    except SystemExit as e:
        # --help and --version exit with 0
        return 1 if e.code else 0
    func = _COMMANDS[kws.pop("command")]
    try:
        func(**kws)
    except ConfigurationError as e:
        logger.error("Invalid configuration: %s", e)
        return 1
    except (WalkError, OSError) as e:
        logger.error("%s failed: %s", func.__name__, e, exc_info=True)
        return 2
    return 0

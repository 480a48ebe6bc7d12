# SPDX-FileCopyrightText: 2024 boomerang-walk developers
#
# SPDX-License-Identifier: LGPL-3.0-only

"""Configuration module for running tests with pytest

Tests marked with ``slow`` run full ensembles and are only executed with the
``--run-slow`` option."""
import pytest


def pytest_addoption(parser):
    group = parser.getgroup("boomerang_walk", "boomerang_walk options")
    group.addoption(
        "--run-slow",
        help="Run the ensemble-scale tests that take minutes",
        action="store_true",
    )


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: ensemble-scale test, needs --run-slow"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("run_slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)

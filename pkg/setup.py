# SPDX-FileCopyrightText: 2024 boomerang-walk developers
#
# SPDX-License-Identifier: CC0-1.0

"""Setup script for the boomerang-walk package."""
from setuptools import setup

setup()

# SPDX-FileCopyrightText: 2024 boomerang-walk developers
#
# SPDX-License-Identifier: LGPL-3.0-only

"""Version information of the boomerang_walk package"""

__version__ = "0.1.0"

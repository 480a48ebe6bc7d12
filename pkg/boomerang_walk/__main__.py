# SPDX-FileCopyrightText: 2024 boomerang-walk developers
#
# SPDX-License-Identifier: LGPL-3.0-only

import sys

from boomerang_walk import main

if __name__ == "__main__":
    sys.exit(main())

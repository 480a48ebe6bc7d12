# SPDX-FileCopyrightText: 2024 boomerang-walk developers
#
# SPDX-License-Identifier: LGPL-3.0-only

"""Test module for the :mod:`boomerang_walk.config.rcsetup` module"""
import os.path as osp
import unittest

import _base_testing as bt
import numpy as np
import yaml

import boomerang_walk.config.rcsetup as rcsetup
from boomerang_walk import rcParams


class RcParamsTest(bt.WalkTestCase):
    """Test the validated runtime parameters"""

    def test_defaults(self):
        self.assertEqual(rcParams["ensemble.workers"], 1)
        self.assertEqual(rcParams["presets.ensemble_size"], 5000)
        np.testing.assert_allclose(
            rcParams["analysis.theta_fit_range"], [np.pi / 90, np.pi / 9]
        )
        self.assertEqual(rcParams["output.float_format"], "%.17g")

    def test_validation(self):
        for key, value in [
            ("ensemble.workers", 0),
            ("ensemble.chunksize", -1),
            ("analysis.plateau_fraction", 1.5),
            ("analysis.disorder_fit_range", [0.5, 0.05]),
            ("analysis.disorder_fit_range", [0.05]),
            ("presets.master_seed", -1),
            ("presets.master_seed", 2**64),
        ]:
            with self.subTest(key=key, value=value):
                with self.assertRaises(ValueError):
                    rcParams[key] = value

    def test_validators(self):
        self.assertIsNone(rcsetup.validate_workers("None"))
        self.assertEqual(rcsetup.validate_workers("3"), 3)
        self.assertEqual(rcsetup.validate_fit_range("0.1, 1"), [0.1, 1.0])
        self.assertEqual(rcsetup.validate_fraction(1), 1.0)
        self.assertEqual(rcsetup.validate_seed("7"), 7)
        self.assertEqual(rcsetup.validate_seed(2**64 - 1), 2**64 - 1)
        with self.assertRaises(ValueError):
            rcsetup.validate_fraction(0)
        with self.assertRaises(ValueError):
            rcsetup.validate_str(1)

    def test_load_from_file(self):
        fname = osp.join(self.mkdtemp(), "boomerangrc.yml")
        with open(fname, "w") as f:
            yaml.dump(
                {"presets.ensemble_size": 100, "ensemble.workers": 2}, f
            )
        rcParams.load_from_file(fname)
        self.assertEqual(rcParams["presets.ensemble_size"], 100)
        self.assertEqual(rcParams.get_workers(), 2)

    def test_header(self):
        self.assertIn("boomerangrc.yml", rcParams.HEADER)


if __name__ == "__main__":
    unittest.main()

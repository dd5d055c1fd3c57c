#!/usr/bin/env python3
#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

from unittest import TestCase
from unittest.mock import MagicMock, patch

import ctrleq.suites
from ctrleq.exceptions import SuiteFailure, ValidationError
from ctrleq.sim.system import LinearSystem
from ctrleq.suites import SUITES, run_suite, run_suites


class TestQuickSuites(TestCase):
    def assertSuitePasses(self, name, seed=0):
        result = run_suite(name, scale="quick", seed=seed)
        self.assertTrue(result.passed, result.failures)
        self.assertGreater(result.cases, 0)
        return result

    def test_trajectory(self):
        result = self.assertSuitePasses("trajectory")
        self.assertLessEqual(result.worst, ctrleq.suites.TRAJECTORY_TOL)

    def test_optimal(self):
        result = self.assertSuitePasses("optimal")
        self.assertLessEqual(result.worst, ctrleq.suites.OPTIMAL_TOL)

    def test_coarsest(self):
        self.assertSuitePasses("coarsest")

    def test_drivers(self):
        self.assertSuitePasses("drivers", seed=1)

    def test_negative(self):
        result = self.assertSuitePasses("negative")
        self.assertEqual(result.cases, 2)
        # the worst value is the deviation of the partition that is no equivalence
        self.assertGreater(result.worst, ctrleq.suites.DISCRIMINATION)

    def test_characterization(self):
        self.assertSuitePasses("characterization")

    def test_reproducible(self):
        first = run_suite("trajectory", seed=7)
        second = run_suite("trajectory", seed=7)
        self.assertEqual(first.worst, second.worst)
        self.assertEqual(first.cases, second.cases)


class TestRunSuites(TestCase):
    def test_unknown_names(self):
        with self.assertRaises(ValidationError):
            run_suite("everything")
        with self.assertRaises(ValidationError):
            run_suite("drivers", scale="huge")

    def test_failure_is_raised_with_results(self):
        def broken(result, rng):
            result.cases += 1
            result.fail("always")

        with patch.dict(SUITES, {"negative": broken}):
            with self.assertLogs("ctrleq.suites", level="ERROR"):
                with self.assertRaises(SuiteFailure) as cm:
                    run_suites(["drivers", "negative"])
        names = [r.name for r in cm.exception.results]
        self.assertEqual(names, ["drivers", "negative"])
        self.assertTrue(cm.exception.results[0].passed)
        self.assertEqual(cm.exception.results[1].failures, ["always"])
        self.assertEqual(cm.exception.exit_code, 2)


class TestOptimalTolerance(TestCase):
    @patch.object(ctrleq.suites, "optimal_bangbang_value", autospec=True)
    def test_large_values_use_an_absolute_gap(self, optimal: MagicMock):
        # 1e-5 apart: within 1e-6 relative to 100 but not within 1e-6 absolute
        def value(system, *args, **kwargs):
            original = isinstance(system, LinearSystem)
            return MagicMock(value=100.0 if original else 100.0 + 1e-5)

        optimal.side_effect = value
        with self.assertLogs("ctrleq.suites", level="ERROR"):
            result = run_suite("optimal")
        self.assertFalse(result.passed)
        self.assertEqual(len(result.failures), 2 * result.cases)
        self.assertAlmostEqual(result.worst, 1e-5)

#!/usr/bin/env python3
#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

from fractions import Fraction
from unittest import TestCase

import numpy as np

from ctrleq.core.inputs import InputStructure
from ctrleq.core.partition import Partition
from ctrleq.core.sparse import SparseMatrix
from ctrleq.exceptions import (
    BoundsValidationError,
    GridMismatchError,
    NotControlEquivalenceError,
    ValidationError,
)
from ctrleq.lump import (
    ControlSignal,
    build_reduced_system,
    exchange_residual,
    expand_final_cost,
    grid_steps,
    lift_control,
    project_control,
    project_state,
    representative_state,
)

THREE_NODE = [(1, 0, "1/2"), (2, 0, "1/2"), (0, 1, "1/4"), (0, 2, "1/2")]


def three_node(exact=True):
    A = SparseMatrix.from_edges(3, THREE_NODE, exact=exact)
    inputs = InputStructure.with_bounds([1, 2], [(1, 2), (3, 4)], exact=exact)
    return A, inputs


class TestBuildReducedSystem(TestCase):
    def test_three_node_network_exact(self):
        A, inputs = three_node()
        reduced = build_reduced_system(A, inputs, Partition([[1, 2], [0]]))
        self.assertTrue(reduced.exact)
        self.assertEqual((reduced.N, reduced.n, reduced.K, reduced.k), (3, 2, 2, 1))
        self.assertEqual(
            reduced.A_hat.tolist(),
            [[Fraction(0), Fraction(3, 4)], [Fraction(1, 2), Fraction(0)]],
        )
        self.assertEqual(reduced.m_hat, (Fraction(4),))
        self.assertEqual(reduced.M_hat, (Fraction(6),))
        self.assertEqual(reduced.control_groups, ((0, 1),))
        np.testing.assert_array_equal(reduced.B_hat(), [[1.0], [0.0]])
        self.assertEqual(exchange_residual(A, reduced), 0)

    def test_three_node_network_float(self):
        A, inputs = three_node(exact=False)
        reduced = build_reduced_system(A, inputs, Partition([[1, 2], [0]]))
        np.testing.assert_allclose(reduced.A_hat_float(), [[0, 0.75], [0.5, 0]])
        np.testing.assert_array_equal(reduced.lo_array(), [4.0])
        np.testing.assert_array_equal(reduced.hi_array(), [6.0])
        self.assertEqual(reduced.A_hat_row(1), {0: 0.5})

    def test_partition_reordered_for_drivers(self):
        A, inputs = three_node()
        reduced = build_reduced_system(A, inputs, Partition([[0], [1, 2]]))
        self.assertEqual(reduced.blocks.blocks, ((1, 2), (0,)))

    def test_rejects_non_equivalence(self):
        A, inputs = three_node()
        partition = Partition.canonical([[0, 1], [2]], n=3, drivers=[1, 2])
        with self.assertRaises(NotControlEquivalenceError) as cm:
            build_reduced_system(A, inputs, partition)
        self.assertIsNotNone(cm.exception.witness)

    def test_non_equivalence_allowed_when_not_strict(self):
        A, inputs = three_node()
        partition = Partition.canonical([[0, 1], [2]], n=3, drivers=[1, 2])
        with self.assertLogs("ctrleq.lump", level="WARNING"):
            reduced = build_reduced_system(A, inputs, partition, strict=False)
        self.assertEqual(reduced.k, 2)
        self.assertGreater(exchange_residual(A, reduced), 0)

    def test_mixed_block_warns(self):
        A = SparseMatrix(3, 3)
        inputs = InputStructure.uniform([0])
        with self.assertLogs("ctrleq.lump", level="WARNING") as cm:
            reduced = build_reduced_system(A, inputs, Partition.whole(3))
        self.assertIn("mixes driver and non-driver", cm.output[0])
        self.assertEqual((reduced.n, reduced.k), (1, 1))


class TestControlSignal(TestCase):
    def test_grid(self):
        self.assertEqual(grid_steps(1.0, 0.1), 10)
        for T, dt in ((1.0, 0.3), (0.0, 0.1), (1.0, 0.0), (1.0, float("nan"))):
            with self.assertRaises(GridMismatchError):
                grid_steps(T, dt)

    def test_constant(self):
        u = ControlSignal.constant([1.5, 3.5], 1.0, 0.25, [1, 3], [2, 4])
        self.assertEqual(u.n_steps, 4)
        self.assertEqual(u.n_channels, 2)
        np.testing.assert_allclose(u.times(), [0, 0.25, 0.5, 0.75, 1.0])
        self.assertEqual(u.at_grid().shape, (5, 2))

    def test_bounds_checked(self):
        with self.assertRaises(BoundsValidationError):
            ControlSignal.constant([0.5, 3.5], 1.0, 0.25, [1, 3], [2, 4])

    def test_shape_checked(self):
        with self.assertRaises(GridMismatchError):
            ControlSignal(np.zeros((3, 1)), 0.25, 1.0, np.zeros(1), np.ones(1))
        with self.assertRaises(GridMismatchError):
            ControlSignal(np.zeros((4, 2)), 0.25, 1.0, np.zeros(1), np.ones(1))


class TestTranslations(TestCase):
    def setUp(self):
        A, inputs = three_node()
        self.reduced = build_reduced_system(A, inputs, Partition([[1, 2], [0]]))

    def test_lift_midpoint(self):
        u_hat = ControlSignal.for_reduced(
            np.full((4, 1), 5.0), 1.0, 0.25, self.reduced
        )
        u = lift_control(u_hat, self.reduced)
        self.assertFalse(u.reduced)
        np.testing.assert_allclose(u.as_float(), np.tile([1.5, 3.5], (4, 1)))

    def test_lift_exact(self):
        u_hat = ControlSignal.constant(
            [Fraction(9, 2)], 1.0, 0.5, self.reduced.m_hat, self.reduced.M_hat, True
        )
        u = lift_control(u_hat, self.reduced)
        self.assertEqual(u.values[0].tolist(), [Fraction(5, 4), Fraction(13, 4)])

    def test_project_inverts_lift(self):
        rng = np.random.default_rng(1)
        samples = rng.uniform(4.0, 6.0, size=(8, 1))
        u_hat = ControlSignal.for_reduced(samples, 1.0, 0.125, self.reduced)
        back = project_control(lift_control(u_hat, self.reduced), self.reduced)
        self.assertTrue(back.reduced)
        np.testing.assert_allclose(back.as_float(), samples)
        np.testing.assert_allclose(back.bounds_lo.astype(float), [4.0])

    def test_degenerate_macro_input(self):
        A = SparseMatrix(2, 2)
        inputs = InputStructure.uniform([0, 1], 2, 2)
        reduced = build_reduced_system(A, inputs, Partition.whole(2, drivers=[0, 1]))
        u_hat = ControlSignal.for_reduced(np.full((2, 1), 4.0), 1.0, 0.5, reduced)
        np.testing.assert_array_equal(
            lift_control(u_hat, reduced).as_float(), [[2.0, 2.0], [2.0, 2.0]]
        )

    def test_lift_wrong_channels(self):
        u = ControlSignal.constant([1.5, 3.5], 1.0, 0.5, [1, 3], [2, 4])
        with self.assertRaises(GridMismatchError):
            lift_control(u, self.reduced)
        with self.assertRaises(GridMismatchError):
            project_control(
                ControlSignal.constant([1.0], 1.0, 0.5, [0], [2]), self.reduced
            )

    def test_project_state(self):
        partition = self.reduced.blocks
        np.testing.assert_array_equal(project_state([1.0, 2.0, 3.0], partition), [5, 1])
        exact = project_state(np.asarray([Fraction(1, 3)] * 3, dtype=object), partition)
        self.assertEqual(exact.tolist(), [Fraction(2, 3), Fraction(1, 3)])
        with self.assertRaises(ValidationError):
            project_state([1.0, 2.0], partition)

    def test_costs_and_representatives(self):
        partition = self.reduced.blocks
        np.testing.assert_array_equal(
            expand_final_cost([2.0, -1.0], partition), [-1, 2, 2]
        )
        with self.assertRaises(ValidationError):
            expand_final_cost([1.0], partition)
        np.testing.assert_allclose(
            representative_state([4.0, 1.0], partition), [1, 2, 2]
        )

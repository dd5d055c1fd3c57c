#!/usr/bin/env python3
#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

import importlib
import math
from unittest import TestCase
from unittest.mock import patch

import numpy as np

from ctrleq.core.inputs import InputStructure
from ctrleq.core.partition import Partition
from ctrleq.core.sparse import SparseMatrix
from ctrleq.exceptions import DivergenceError, GridMismatchError, ValidationError
from ctrleq.generators import (
    driver_blocks,
    make_rng,
    planted_network,
    random_piecewise_control,
)
from ctrleq.lump import (
    ControlSignal,
    build_reduced_system,
    expand_final_cost,
    lift_control,
    project_control,
    project_state,
)
from ctrleq.refine import coarsest_control_equivalence, initial_partition
from ctrleq.sim import (
    CostSpec,
    LinearSystem,
    evaluate_cost,
    integrate,
    integrate_many,
    optimal_bangbang_value,
    tracking_cost,
    trajectory_deviations,
    verify_trajectory_equivalence,
)

# ctrleq.sim re-exports the integrate function under the module name
integrate_module = importlib.import_module("ctrleq.sim.integrate")

THREE_NODE = [(1, 0, 0.5), (2, 0, 0.5), (0, 1, 0.25), (0, 2, 0.5)]


def three_node():
    A = SparseMatrix.from_edges(3, THREE_NODE)
    inputs = InputStructure.with_bounds([1, 2], [(1, 2), (3, 4)])
    partition = Partition.canonical([[0], [1, 2]], n=3, drivers=[1, 2])
    return A, inputs, partition, build_reduced_system(A, inputs, partition)


class TestIntegrate(TestCase):
    def test_exponential_decay(self):
        A = SparseMatrix.from_edges(1, [(0, 0, -1.0)])
        inputs = InputStructure.uniform([0], 0, 1)
        u = ControlSignal.for_inputs(np.zeros((100, 1)), 1.0, 0.01, inputs)
        trajectory = integrate(A, u, [1.0], inputs=inputs)
        self.assertEqual(trajectory.states.shape, (101, 1))
        self.assertAlmostEqual(trajectory.final[0], math.exp(-1.0), places=9)
        self.assertFalse(trajectory.reduced)
        self.assertAlmostEqual(trajectory.times()[-1], 1.0)

    def test_constant_input(self):
        system = LinearSystem.from_dense([[0.0]], [0], [0.0], [3.0])
        u = ControlSignal.constant([2.0], 0.5, 0.1, [0.0], [3.0])
        trajectory = integrate(system, u, [0.0])
        self.assertAlmostEqual(trajectory.final[0], 1.0)

    def test_sparse_path_matches_dense(self):
        A, inputs, _, _ = three_node()
        rng = make_rng(2)
        u = random_piecewise_control(
            rng, inputs.lo_array(), inputs.hi_array(), 1.0, 0.01
        )
        dense = integrate(A, u, [1.0, 0.0, -1.0], inputs=inputs)
        system = LinearSystem.original(A, inputs)
        self.assertTrue(integrate_module.Propagator(system, 0.01).dense)
        with patch.object(integrate_module, "PROPAGATOR_LIMIT", 0):
            self.assertFalse(integrate_module.Propagator(system, 0.01).dense)
            sparse = integrate(A, u, [1.0, 0.0, -1.0], inputs=inputs)
        np.testing.assert_allclose(sparse.states, dense.states, atol=1e-12)

    def test_batch_equals_single_runs(self):
        A, inputs, _, _ = three_node()
        rng = make_rng(4)
        controls = [
            random_piecewise_control(
                rng, inputs.lo_array(), inputs.hi_array(), 1.0, 0.05
            )
            for _ in range(3)
        ]
        batch = integrate_many(A, controls, np.zeros(3), inputs=inputs)
        for u, trajectory in zip(controls, batch):
            single = integrate(A, u, np.zeros(3), inputs=inputs)
            np.testing.assert_allclose(trajectory.states, single.states)
        self.assertEqual(integrate_many(A, [], np.zeros(3), inputs=inputs), [])

    def test_lumped_recording(self):
        A, inputs, partition, _ = three_node()
        u = ControlSignal.constant([1.0, 3.0], 1.0, 0.1, [1, 3], [2, 4])
        full = integrate(A, u, [1.0, 2.0, 3.0], inputs=inputs)
        lumped = integrate(A, u, [1.0, 2.0, 3.0], inputs=inputs, lump=partition)
        self.assertTrue(lumped.reduced)
        np.testing.assert_allclose(lumped.states[0], [5.0, 1.0])
        np.testing.assert_allclose(
            lumped.final, [full.final[1] + full.final[2], full.final[0]]
        )

    def test_errors(self):
        A, inputs, _, reduced = three_node()
        u = ControlSignal.constant([1.0, 3.0], 1.0, 0.1, [1, 3], [2, 4])
        with self.assertRaises(GridMismatchError):
            integrate(A, u, np.zeros(3), T=2.0, inputs=inputs)
        with self.assertRaises(GridMismatchError):
            integrate(A, u, np.zeros(3), dt=0.05, inputs=inputs)
        with self.assertRaises(GridMismatchError):
            integrate(reduced, u, np.zeros(2))
        with self.assertRaises(ValidationError):
            integrate(A, u, np.zeros(2), inputs=inputs)
        with self.assertRaises(ValidationError):
            integrate(A, u, [0.0, float("nan"), 0.0], inputs=inputs)
        with self.assertRaises(ValidationError):
            integrate(A, u, np.zeros(3))

    def test_divergence(self):
        system = LinearSystem.from_dense([[1000.0]], [0], [0.0], [1.0])
        u = ControlSignal.constant([0.0], 100.0, 1.0, [0.0], [1.0])
        with np.errstate(over="ignore", invalid="ignore"):
            with self.assertRaises(DivergenceError) as cm:
                integrate(system, u, [1.0])
        self.assertGreater(cm.exception.step, 1)


class TestTrajectoryEquivalence(TestCase):
    def test_control_equivalence_keeps_block_sums(self):
        A, inputs, partition, reduced = three_node()
        rng = make_rng(0)
        controls = [
            random_piecewise_control(
                rng, inputs.lo_array(), inputs.hi_array(), 2.0, 0.01
            )
            for _ in range(5)
        ]
        deviations = trajectory_deviations(
            A, inputs, partition, reduced, controls, [1.0, 0.5, -0.5]
        )
        self.assertEqual(deviations.shape, (5,))
        self.assertLess(deviations.max(), 1e-9)

    def test_reduced_trajectory_is_lumped_original(self):
        A, inputs, partition, reduced = three_node()
        u = ControlSignal.constant([1.5, 3.5], 1.0, 0.01, [1, 3], [2, 4])
        original = integrate(A, u, np.zeros(3), inputs=inputs, lump=reduced.blocks)
        lumped = integrate(reduced, project_control(u, reduced), np.zeros(2))
        self.assertTrue(lumped.reduced)
        np.testing.assert_allclose(original.states, lumped.states, atol=1e-12)

    def test_other_partition_deviates(self):
        A, inputs, _, _ = three_node()
        partition = Partition.canonical([[0, 1], [2]], n=3, drivers=[1, 2])
        reduced = build_reduced_system(A, inputs, partition, strict=False)
        u = ControlSignal.constant([1.0, 3.0], 1.0, 0.01, [1, 3], [2, 4])
        deviation = verify_trajectory_equivalence(
            A, inputs, partition, reduced, u, [1.0, 0.0, 0.0]
        )
        self.assertGreater(deviation, 1e-3)

    def test_grid_checks(self):
        A, inputs, partition, reduced = three_node()
        u = ControlSignal.constant([1.0, 3.0], 1.0, 0.1, [1, 3], [2, 4])
        with self.assertRaises(GridMismatchError):
            verify_trajectory_equivalence(
                A, inputs, partition, reduced, u, np.zeros(3), T=2.0
            )
        v = ControlSignal.constant([1.0, 3.0], 1.0, 0.05, [1, 3], [2, 4])
        with self.assertRaises(GridMismatchError):
            trajectory_deviations(A, inputs, partition, reduced, [u, v], np.zeros(3))
        with self.assertRaises(ValidationError):
            trajectory_deviations(
                A, inputs, Partition.singletons(3), reduced, [u], np.zeros(3)
            )


class TestOptimalValue(TestCase):
    def test_reduced_value_matches_original(self):
        A, inputs, partition, reduced = three_node()
        c_hat = np.asarray([-1.0, 1.0])
        c = expand_final_cost(c_hat, reduced.blocks)
        np.testing.assert_array_equal(c, [1.0, -1.0, -1.0])
        for direction in ("sup", "inf"):
            original = optimal_bangbang_value(
                A, c, np.zeros(3), 1.0, 0.01, direction=direction, inputs=inputs
            )
            lumped = optimal_bangbang_value(
                reduced, c_hat, np.zeros(2), 1.0, 0.01, direction=direction
            )
            self.assertAlmostEqual(original.value, lumped.value, places=9)
        self.assertLessEqual(
            optimal_bangbang_value(reduced, c_hat, np.zeros(2), 1.0, 0.01, "inf").value,
            optimal_bangbang_value(reduced, c_hat, np.zeros(2), 1.0, 0.01, "sup").value,
        )

    def test_value_beats_constant_controls(self):
        A, inputs, _, _ = three_node()
        c = np.asarray([1.0, -1.0, -1.0])
        best = optimal_bangbang_value(A, c, np.zeros(3), 1.0, 0.01, inputs=inputs)
        self.assertEqual(best.control.n_steps, 100)
        self.assertEqual(best.adjoint.shape, (101, 3))
        np.testing.assert_allclose(best.adjoint[-1], c)
        for level in (0.0, 0.5, 1.0):
            value = [1 + level, 3 + level]
            u = ControlSignal.constant(value, 1.0, 0.01, [1, 3], [2, 4])
            final = integrate(A, u, np.zeros(3), inputs=inputs).final
            self.assertLessEqual(float(c @ final), best.value + 1e-12)

    def test_scalar_switching(self):
        # lam(t) = c exp(-(T - t)) with c > 0, the best control is always high
        system = LinearSystem.from_dense([[-1.0]], [0], [0.0], [1.0])
        result = optimal_bangbang_value(system, [1.0], [0.0], 1.0, 0.01)
        np.testing.assert_array_equal(result.control.values, np.ones((100, 1)))
        self.assertAlmostEqual(result.value, 1.0 - math.exp(-1.0), places=8)
        self.assertEqual(len(result.switching_steps()), 0)
        inf = optimal_bangbang_value(
            system, [1.0], [0.0], 1.0, 0.01, direction="inf", keep_adjoint=False
        )
        self.assertIsNone(inf.adjoint)
        self.assertAlmostEqual(inf.value, 0.0)

    def test_ties_take_lower_bound_for_sup(self):
        system = LinearSystem.from_dense([[0.0]], [0], [-1.0], [1.0])
        result = optimal_bangbang_value(system, [0.0], [0.0], 1.0, 0.5)
        np.testing.assert_array_equal(result.control.values, [[-1.0], [-1.0]])

    def test_errors(self):
        A, inputs, _, _ = three_node()
        with self.assertRaises(ValidationError):
            optimal_bangbang_value(A, [1.0], np.zeros(3), 1.0, 0.1, inputs=inputs)
        with self.assertRaises(ValidationError):
            optimal_bangbang_value(
                A, np.ones(3), np.zeros(3), 1.0, 0.1, direction="max", inputs=inputs
            )
        with self.assertRaises(GridMismatchError):
            optimal_bangbang_value(A, np.ones(3), np.zeros(3), 1.0, 0.3, inputs=inputs)


class TestCost(TestCase):
    def test_final_cost_lumped_and_reduced_agree(self):
        A, inputs, partition, reduced = three_node()
        u = ControlSignal.constant([1.5, 3.5], 1.0, 0.1, [1, 3], [2, 4])
        cost = CostSpec.for_reduced(reduced, final=[-1.0, 1.0], control_weight=0.5)
        self.assertEqual(cost.k, 1)
        self.assertFalse(cost.is_zero())
        original = evaluate_cost(integrate(A, u, np.zeros(3), inputs=inputs), u, cost)
        u_hat = project_control(u, reduced)
        lumped = evaluate_cost(integrate(reduced, u_hat, np.zeros(2)), u_hat, cost)
        self.assertAlmostEqual(original, lumped, places=9)

    def test_running_control_cost(self):
        _, _, _, reduced = three_node()
        u_hat = ControlSignal.for_reduced(np.full((10, 1), 5.0), 1.0, 0.1, reduced)
        trajectory = integrate(reduced, u_hat, np.zeros(2))
        cost = CostSpec.for_reduced(reduced, control_weight=1.0)
        # 5^2 integrated over [0, 1]
        self.assertAlmostEqual(evaluate_cost(trajectory, u_hat, cost), 25.0)
        euclidean = CostSpec.for_reduced(reduced, control_weight=1.0, norm="euclidean")
        self.assertAlmostEqual(evaluate_cost(trajectory, u_hat, euclidean), 5.0)

    def test_tracking_cost_vanishes_on_reference(self):
        A, inputs, _, reduced = three_node()
        rng = make_rng(9)
        u = random_piecewise_control(
            rng, inputs.lo_array(), inputs.hi_array(), 1.0, 0.05
        )
        reference = integrate(A, u, np.zeros(3), inputs=inputs)
        cost = tracking_cost(reference, u, reduced)
        self.assertAlmostEqual(evaluate_cost(reference, u, cost), 0.0)
        other = ControlSignal.constant([2.0, 4.0], 1.0, 0.05, [1, 3], [2, 4])
        moved = integrate(A, other, np.zeros(3), inputs=inputs)
        self.assertGreater(evaluate_cost(moved, other, cost), 0.0)

    def test_cost_errors(self):
        A, inputs, partition, reduced = three_node()
        with self.assertRaises(ValidationError):
            CostSpec.for_reduced(reduced, norm="max")
        with self.assertRaises(ValidationError):
            CostSpec.for_reduced(reduced, final=[1.0, 2.0, 3.0])
        u = ControlSignal.constant([1.5, 3.5], 1.0, 0.1, [1, 3], [2, 4])
        v = ControlSignal.constant([1.5, 3.5], 1.0, 0.05, [1, 3], [2, 4])
        trajectory = integrate(A, u, np.zeros(3), inputs=inputs)
        with self.assertRaises(GridMismatchError):
            evaluate_cost(trajectory, v, CostSpec.for_reduced(reduced))
        with self.assertRaises(ValidationError):
            tracking_cost(trajectory, u, partition)


class TestLiftedCostInvariance(TestCase):
    def test_random_planted_networks(self):
        rng = make_rng(17)
        for case in range(20):
            N = int(rng.integers(2, 30))
            A, blocks = planted_network(rng, N, max(1, N // int(rng.integers(1, 5))))
            inputs = driver_blocks(rng, blocks, int(rng.integers(1, 3)))
            partition = coarsest_control_equivalence(A, initial_partition(N, inputs))
            reduced = build_reduced_system(A, inputs, partition)

            u_hat = random_piecewise_control(
                rng, reduced.lo_array(), reduced.hi_array(), 1.0, 0.01, reduced=True
            )
            u = lift_control(u_hat, reduced)
            x0 = rng.uniform(0.0, 1.0, size=N)
            x0_hat = project_state(x0, reduced.blocks).astype(float)
            cost = CostSpec.for_reduced(
                reduced,
                final=rng.uniform(-1.0, 1.0, size=reduced.n),
                state_weight=float(rng.uniform(0.1, 1.0)),
                state_reference=rng.uniform(0.0, 1.0, size=reduced.n),
                control_weight=float(rng.uniform(0.1, 1.0)),
                norm=("squared", "euclidean")[case % 2],
            )

            original = evaluate_cost(integrate(A, u, x0, inputs=inputs), u, cost)
            lumped = evaluate_cost(integrate(reduced, u_hat, x0_hat), u_hat, cost)
            with self.subTest(case=case, N=N, n=reduced.n):
                self.assertLess(abs(original - lumped), 1e-9)

#!/usr/bin/env python3
#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

import math
import time
from fractions import Fraction
from unittest import TestCase

from ctrleq.core.equivalence import is_control_equivalence
from ctrleq.core.inputs import InputStructure
from ctrleq.core.partition import Partition
from ctrleq.core.sparse import SparseMatrix
from ctrleq.drivers import minimum_driver_set
from ctrleq.exceptions import MatrixValidationError, PartitionValidationError
from ctrleq.generators import make_rng, planted_network, random_digraph
from ctrleq.oracles import exhaustive_coarsest
from ctrleq.refine import (
    DRIVERS_SPLIT,
    coarsest_control_equivalence,
    initial_partition,
    reduce_pipeline,
    refine_with_stats,
)

THREE_NODE = [(1, 0, "1/2"), (2, 0, "1/2"), (0, 1, "1/4"), (0, 2, "1/2")]


class TestRefine(TestCase):
    def setUp(self):
        self.A = SparseMatrix.from_edges(3, THREE_NODE, exact=True)
        self.inputs = InputStructure.with_bounds([1, 2], [(1, 2), (3, 4)], exact=True)

    def test_three_node_network_from_whole(self):
        result = coarsest_control_equivalence(self.A, Partition.whole(3))
        self.assertEqual(result.as_sets(), Partition([[1, 2], [0]]).as_sets())

    def test_three_node_network_with_drivers(self):
        start = initial_partition(3, self.inputs)
        self.assertEqual(start.blocks, ((1, 2), (0,)))
        result, stats = refine_with_stats(self.A, start)
        self.assertEqual(result.blocks, ((1, 2), (0,)))
        self.assertEqual(result.n_driver_blocks, 1)
        self.assertEqual(stats.splits, 0)
        self.assertEqual(stats.initial_blocks, stats.final_blocks)

    def test_result_refines_initial(self):
        start = Partition.canonical([[0, 1], [2]], n=3)
        result = coarsest_control_equivalence(self.A, start)
        self.assertTrue(result.refines(start))
        self.assertTrue(is_control_equivalence(self.A, result))
        self.assertEqual(result.n_blocks, 3)

    def test_idempotent(self):
        once = coarsest_control_equivalence(self.A, Partition.whole(3))
        twice, stats = refine_with_stats(self.A, once)
        self.assertEqual(once, twice)
        self.assertEqual(stats.splits, 0)

    def test_edgeless_network_keeps_initial(self):
        A = SparseMatrix(4, 4)
        start = Partition.drivers_split(4, [0])
        self.assertEqual(coarsest_control_equivalence(A, start), start)

    def test_tolerance_groups_close_signatures(self):
        A = SparseMatrix.from_edges(3, [(1, 0, 0.5), (2, 0, 0.5 + 1e-12)])
        merged = coarsest_control_equivalence(A, Partition.whole(3))
        self.assertEqual(merged.n_blocks, 2)
        split = coarsest_control_equivalence(A, Partition.whole(3), tol=0.0)
        self.assertEqual(split.n_blocks, 3)

    def test_shape_errors(self):
        with self.assertRaises(MatrixValidationError):
            coarsest_control_equivalence(SparseMatrix(2, 3), Partition.whole(2))
        with self.assertRaises(PartitionValidationError):
            coarsest_control_equivalence(self.A, Partition.whole(4))

    def test_initial_partition_directives(self):
        self.assertEqual(
            initial_partition(3, self.inputs, None), initial_partition(3, self.inputs)
        )
        with self.assertRaises(PartitionValidationError):
            initial_partition(3, self.inputs, "@everything")
        given = initial_partition(3, self.inputs, Partition([[0], [1, 2]]))
        self.assertEqual(given.blocks, ((1, 2), (0,)))


class TestAgainstOracles(TestCase):
    def test_random_networks_match_exhaustive_search(self):
        rng = make_rng(3)
        for N in (2, 4, 6):
            for _ in range(4):
                A = random_digraph(rng, N, 2 * N, exact=True)
                start = Partition.whole(N)
                self.assertEqual(
                    coarsest_control_equivalence(A, start).as_sets(),
                    exhaustive_coarsest(A, start).as_sets(),
                )

    def test_planted_blocks_are_never_split(self):
        rng = make_rng(5)
        for _ in range(10):
            A, blocks = planted_network(rng, 30, 4)
            result = coarsest_control_equivalence(A, Partition.whole(30))
            self.assertTrue(Partition(blocks).refines(result))
            self.assertTrue(is_control_equivalence(A, result))


class TestScaling(TestCase):
    def test_signature_work_is_quasilinear(self):
        rng = make_rng(11)
        N, E = 5000, 25000
        A = random_digraph(rng, N, E)
        start = time.perf_counter()
        initial = initial_partition(N, minimum_driver_set(A))
        result, stats = refine_with_stats(A, initial)
        elapsed = time.perf_counter() - start

        self.assertLessEqual(stats.signature_updates, E * (math.log2(N) + 2))
        self.assertEqual(stats.final_blocks, result.n_blocks)
        self.assertLess(elapsed, 10.0)


class TestReducePipeline(TestCase):
    def test_three_node_network(self):
        A = SparseMatrix.from_edges(3, THREE_NODE, exact=True)
        inputs = InputStructure.with_bounds([1, 2], [(1, 2), (3, 4)], exact=True)
        partition, reduced = reduce_pipeline(A, inputs, DRIVERS_SPLIT)
        self.assertEqual(partition.blocks, ((1, 2), (0,)))
        self.assertEqual((reduced.n, reduced.k, reduced.K), (2, 1, 2))
        self.assertEqual(reduced.A_hat[0, 1], Fraction(3, 4))
        self.assertEqual(reduced.A_hat[1, 0], Fraction(1, 2))

    def test_drivers_computed_when_missing(self):
        A = SparseMatrix.from_edges(3, [(0, 1, 1), (1, 2, 1)])
        partition, reduced = reduce_pipeline(A)
        self.assertEqual(reduced.inputs.driver_nodes, (0,))
        self.assertEqual(partition.n_driver_blocks, 1)
        self.assertEqual(partition.n_blocks, 3)

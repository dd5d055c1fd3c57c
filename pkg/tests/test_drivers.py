#!/usr/bin/env python3
#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

import doctest
from unittest import TestCase

import ctrleq.drivers
from ctrleq.core.sparse import SparseMatrix
from ctrleq.drivers import (
    Matching,
    has_augmenting_path,
    maximum_matching,
    minimum_driver_set,
)
from ctrleq.exceptions import MatrixValidationError
from ctrleq.generators import make_rng, random_digraph
from ctrleq.oracles import brute_force_matching_size


class TestDocs(TestCase):
    def test_module_doctest(self):
        failures, _ = doctest.testmod(
            ctrleq.drivers, extraglobs={"SparseMatrix": SparseMatrix}
        )
        self.assertEqual(failures, 0)


class TestMatching(TestCase):
    def test_chain(self):
        A = SparseMatrix.from_edges(3, [(0, 1, 1), (1, 2, 1)])
        matching = maximum_matching(A)
        self.assertEqual(matching.pairs, ((0, 1), (1, 2)))
        self.assertEqual(matching.unmatched_dst(), (0,))
        self.assertTrue(matching.is_subgraph_of(A))
        self.assertFalse(has_augmenting_path(A, matching))

    def test_star_needs_all_leaves_but_one(self):
        A = SparseMatrix.from_edges(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)])
        self.assertEqual(maximum_matching(A).size, 1)
        self.assertEqual(minimum_driver_set(A).K, 3)

    def test_augmenting_path_detects_small_matching(self):
        A = SparseMatrix.from_edges(3, [(0, 1, 1), (1, 2, 1)])
        partial = Matching(pairs=((0, 1),), n_nodes=3)
        self.assertTrue(has_augmenting_path(A, partial))

    def test_node_matched_twice(self):
        with self.assertRaises(MatrixValidationError):
            Matching(pairs=((0, 1), (0, 2)), n_nodes=3)
        with self.assertRaises(MatrixValidationError):
            Matching(pairs=((0, 1), (2, 1)), n_nodes=3)

    def test_agrees_with_exhaustive_search(self):
        rng = make_rng(11)
        for N in (1, 3, 5, 7, 9):
            for n_edges in (0, N, 2 * N):
                A = random_digraph(rng, N, n_edges)
                matching = maximum_matching(A)
                self.assertTrue(matching.is_subgraph_of(A))
                self.assertEqual(matching.size, brute_force_matching_size(A))
                self.assertFalse(has_augmenting_path(A, matching))


class TestMinimumDriverSet(TestCase):
    def test_three_node_network(self):
        A = SparseMatrix.from_edges(
            3, [(1, 0, 0.5), (2, 0, 0.5), (0, 1, 0.25), (0, 2, 0.5)]
        )
        inputs = minimum_driver_set(A, lo=1, hi=2)
        self.assertEqual(inputs.K, 1)
        self.assertEqual(len(inputs.driver_nodes), 1)
        self.assertEqual(inputs.bounds_lo, (1.0,))
        self.assertEqual(inputs.bounds_hi, (2.0,))

    def test_edgeless_network_drives_everything(self):
        inputs = minimum_driver_set(SparseMatrix(5, 5))
        self.assertEqual(inputs.driver_nodes, (0, 1, 2, 3, 4))

    def test_perfect_matching_still_needs_one_driver(self):
        cycle = SparseMatrix.from_edges(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)])
        self.assertEqual(maximum_matching(cycle).size, 3)
        self.assertEqual(minimum_driver_set(cycle).driver_nodes, (0,))

    def test_empty_network(self):
        with self.assertRaises(MatrixValidationError):
            minimum_driver_set(SparseMatrix(0, 0))

    def test_reuses_given_matching(self):
        A = SparseMatrix.from_edges(3, [(0, 1, 1), (1, 2, 1)])
        matching = Matching(pairs=((1, 2),), n_nodes=3)
        inputs = minimum_driver_set(A, matching=matching, exact=True)
        self.assertEqual(inputs.driver_nodes, (0, 1))

#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
import scipy.sparse

from ctrleq.core.partition import Partition
from ctrleq.core.sparse import SparseMatrix
from ctrleq.exceptions import MatrixValidationError, PartitionValidationError
from ctrleq.utils import Weight, default_tolerance


@dataclass(frozen=True)
class AggregationPair:
    """
    The aggregation matrix L (n x N, L[i, j] = 1 iff j in H_i) and its right
    inverse Lbar (N x n, Lbar[j, i] = 1/|H_i| iff j in H_i).
    """

    partition: Partition
    L: scipy.sparse.csr_array
    Lbar: scipy.sparse.csr_array

    @property
    def n(self) -> int:
        return self.partition.n_blocks

    @property
    def N(self) -> int:
        return self.partition.n_nodes

    def Lbar_exact(self) -> np.ndarray:
        """Lbar as an object array of fractions."""
        dense = np.full((self.N, self.n), Fraction(0), dtype=object)
        for i, block in enumerate(self.partition):
            for j in block:
                dense[j, i] = Fraction(1, len(block))
        return dense

    def identity_residual(self) -> Fraction:
        """max |L Lbar - I|, computed in rational arithmetic."""
        worst = Fraction(0)
        for i, block in enumerate(self.partition):
            diagonal = sum((Fraction(1, len(block)) for _ in block), Fraction(0))
            worst = max(worst, abs(diagonal - 1))
        # off-diagonal products pair disjoint blocks and vanish identically.
        return worst


def build_aggregation(
    partition: Union[Partition, Iterable[Iterable[int]]], N: int
) -> AggregationPair:
    if not isinstance(partition, Partition):
        partition = Partition(partition, n=N)
    if partition.n_nodes != N:
        raise PartitionValidationError(
            "partition covers {} nodes, expected {}".format(partition.n_nodes, N)
        )

    rows: List[int] = []
    cols: List[int] = []
    weights: List[float] = []
    for i, block in enumerate(partition):
        for j in block:
            rows.append(i)
            cols.append(j)
            weights.append(1.0 / len(block))

    rows_arr = np.asarray(rows, dtype=np.int64)
    cols_arr = np.asarray(cols, dtype=np.int64)
    n = partition.n_blocks
    L = scipy.sparse.csr_array(
        (np.ones(len(rows), dtype=float), (rows_arr, cols_arr)), shape=(n, N)
    )
    Lbar = scipy.sparse.csr_array(
        (np.asarray(weights, dtype=float), (cols_arr, rows_arr)), shape=(N, n)
    )
    return AggregationPair(partition=partition, L=L, Lbar=Lbar)


def column_block_sum(A: SparseMatrix, block: Iterable[int], j: int) -> Weight:
    """(LA)[h, j]: total weight of the edges from node j into `block`."""
    members = block if isinstance(block, (set, frozenset)) else set(block)
    weights = [w for i, w in A.column(j) if i in members]
    if A.exact:
        return sum(weights, Fraction(0))
    return math.fsum(weights)


@dataclass(frozen=True)
class Witness:
    """
    Two nodes of the same block whose edge weight into `splitter` differs, i.e.
    a column pair where L A and L A Lbar L disagree.
    """

    block: int
    nodes: Tuple[int, int]
    splitter: int
    signatures: Tuple[Weight, Weight]

    def recheck(self, A: SparseMatrix, partition: Partition, tol: Weight = 0) -> bool:
        """re-evaluates only this triple; True if the violation is reproduced."""
        splitter = partition[self.splitter]
        first, second = (column_block_sum(A, splitter, j) for j in self.nodes)
        return abs(first - second) > tol


@dataclass(frozen=True)
class EquivalenceCheck:
    holds: bool
    residual: Weight
    tol: Weight
    witness: Optional[Witness] = None

    def __bool__(self) -> bool:
        return self.holds


def _signatures(A: SparseMatrix, members: Iterable[int]) -> Dict[int, Weight]:
    collected: Dict[int, List[Weight]] = defaultdict(list)
    for i in members:
        for j, w in A.row(i):
            collected[j].append(w)
    if A.exact:
        return {j: sum(ws, Fraction(0)) for j, ws in collected.items()}
    return {j: math.fsum(ws) for j, ws in collected.items()}


def is_control_equivalence(
    A: SparseMatrix, partition: Partition, tol: Optional[Weight] = None
) -> EquivalenceCheck:
    """
    Checks L A == L A Lbar L up to `tol` in max-norm without forming any matrix.

    Row h of L A holds the signatures sigma_h(j), the weight from node j into
    block H_h, and row h of L A Lbar L replaces every sigma_h(j) by its average
    over the block of j. The check therefore visits every edge exactly once.

    The default tolerance is 0 for exact matrices and
    1e-9 * (1 + max |A[i, j]|) otherwise.
    """

    if not A.is_square:
        raise MatrixValidationError("A must be square, got {}x{}".format(*A.shape))
    if partition.n_nodes != A.n_rows:
        raise MatrixValidationError(
            "partition covers {} nodes but A is {}x{}".format(
                partition.n_nodes, *A.shape
            )
        )
    if tol is None:
        tol = default_tolerance(A.max_abs(), A.exact)

    zero: Weight = Fraction(0) if A.exact else 0.0
    residual: Weight = zero
    witness: Optional[Witness] = None

    for h, splitter in enumerate(partition):
        by_block: Dict[int, List[Tuple[Weight, int]]] = defaultdict(list)
        for j, sigma in _signatures(A, splitter).items():
            by_block[partition.block_of(j)].append((sigma, j))

        for b in sorted(by_block):
            touched = by_block[b]
            size = len(partition[b])
            values = [sigma for sigma, _ in touched]
            if len(touched) < size:
                values.append(zero)
            high, low = max(values), min(values)
            if high == low:
                continue

            total = sum(values, zero) if A.exact else math.fsum(values)
            mean = total / size
            deviation = max(high - mean, mean - low)
            if deviation > residual:
                residual = deviation
            if deviation > tol and witness is None:
                witness = _witness(partition, b, h, touched, high, low)

    return EquivalenceCheck(
        holds=residual <= tol, residual=residual, tol=tol, witness=witness
    )


def _witness(
    partition: Partition,
    block: int,
    splitter: int,
    touched: List[Tuple[Weight, int]],
    high: Weight,
    low: Weight,
) -> Witness:
    by_value = {}
    for sigma, j in sorted(touched, key=lambda item: item[1]):
        by_value.setdefault(sigma, j)
    seen = {j for _, j in touched}
    untouched = next((j for j in partition[block] if j not in seen), None)

    def node_for(value: Weight) -> int:
        if value in by_value:
            return by_value[value]
        return untouched  # type: ignore

    first, second = node_for(high), node_for(low)
    return Witness(
        block=block,
        nodes=(first, second),
        splitter=splitter,
        signatures=(high, low),
    )

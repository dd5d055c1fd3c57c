#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
Coarsest control equivalence by partition refinement.

A partition is a control equivalence when, for every block S, the signature
sigma_S(j) (total weight of the edges from j into S) is constant on each
block. We refine the initial partition until that holds, keeping a FIFO
worklist of splitter blocks. When a block that is not waiting in the worklist
splits, all pieces except one largest become splitters: the signature against
the largest piece is the old block's signature minus the others, so it can
not split anything new. That is what keeps the total work at O(E log N).

Only A takes part in the refinement, B enters through the initial partition.
"""

import logging
from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ctrleq.core.inputs import InputStructure
from ctrleq.core.partition import Partition
from ctrleq.core.sparse import SparseMatrix
from ctrleq.drivers import minimum_driver_set
from ctrleq.exceptions import MatrixValidationError, PartitionValidationError
from ctrleq.lump import ReducedSystem, build_reduced_system
from ctrleq.utils import Weight, default_tolerance

logger = logging.getLogger(__name__)

DRIVERS_SPLIT = "@drivers-split"


@dataclass(frozen=True)
class RefinementStats:
    initial_blocks: int
    final_blocks: int
    splitters: int = 0
    splits: int = 0
    moved_nodes: int = 0
    signature_updates: int = 0


class _Refinement(object):
    """mutable partition with O(1) node moves (swap with the last member)."""

    def __init__(self, initial: Partition) -> None:
        self.block_of: List[int] = list(initial.assignment)
        self.members: List[List[int]] = [list(block) for block in initial]
        self.position: List[int] = [0] * initial.n_nodes
        for block in self.members:
            for index, node in enumerate(block):
                self.position[node] = index

        self.worklist: deque = deque(range(len(self.members)))
        self.pending = set(self.worklist)

        self.splitters = 0
        self.splits = 0
        self.moved_nodes = 0
        self.signature_updates = 0

    def enqueue(self, block: int) -> None:
        if block not in self.pending:
            self.pending.add(block)
            self.worklist.append(block)

    def move(self, node: int, target: int) -> None:
        source = self.block_of[node]
        members = self.members[source]
        index = self.position[node]
        last = members.pop()
        if last != node:
            members[index] = last
            self.position[last] = index
        self.position[node] = len(self.members[target])
        self.members[target].append(node)
        self.block_of[node] = target
        self.moved_nodes += 1

    def new_block(self) -> int:
        self.members.append([])
        return len(self.members) - 1


def _group(
    touched: List[Tuple[Weight, int]], has_rest: bool, zero: Weight, tol: Weight
) -> List[Tuple[List[int], bool]]:
    """
    Cuts the sorted signatures at gaps larger than `tol`. Every group comes
    back with its nodes and whether the untouched remainder (sigma = 0) falls
    into it.
    """
    entries: List[Tuple[Weight, int]] = sorted(touched)
    if has_rest:
        entries.append((zero, -1))
        entries.sort()

    groups: List[Tuple[List[int], bool]] = []
    previous: Optional[Weight] = None
    for sigma, node in entries:
        if previous is None or sigma - previous > tol:
            groups.append(([], False))
        nodes, rest = groups[-1]
        if node == -1:
            groups[-1] = (nodes, True)
        else:
            nodes.append(node)
        previous = sigma
    return groups


def _largest(pieces: Sequence[int], state: _Refinement) -> int:
    return min(
        pieces, key=lambda b: (-len(state.members[b]), min(state.members[b]))
    )


def refine_with_stats(
    A: SparseMatrix, initial: Partition, tol: Optional[Weight] = None
) -> Tuple[Partition, RefinementStats]:
    """
    Computes the coarsest control equivalence refining `initial`.

    Options:
        tol: signatures closer than this end up in the same block. The default
            is 0 for exact matrices and 1e-9 * (1 + max |A[i, j]|) otherwise.
            Groups are cut at gaps, so a chain of close values stays together.
    """
    if not A.is_square:
        raise MatrixValidationError("A must be square, got {}x{}".format(*A.shape))
    if initial.n_nodes != A.n_rows:
        raise PartitionValidationError(
            "initial partition covers {} nodes but A is {}x{}".format(
                initial.n_nodes, *A.shape
            )
        )
    if tol is None:
        tol = default_tolerance(A.max_abs(), A.exact)
    zero: Weight = Fraction(0) if A.exact else 0.0

    state = _Refinement(initial)
    while state.worklist:
        splitter = state.worklist.popleft()
        state.pending.discard(splitter)
        state.splitters += 1

        signature: Dict[int, Weight] = {}
        for i in list(state.members[splitter]):
            for j, w in A.row(i):
                signature[j] = signature.get(j, zero) + w
                state.signature_updates += 1

        by_block: Dict[int, List[Tuple[Weight, int]]] = defaultdict(list)
        for j, sigma in signature.items():
            by_block[state.block_of[j]].append((sigma, j))

        for block in sorted(by_block):
            touched = by_block[block]
            has_rest = len(touched) < len(state.members[block])
            groups = _group(touched, has_rest, zero, tol)
            if len(groups) == 1:
                continue

            keeper = next((g for g in groups if g[1]), None)
            if keeper is None:
                keeper = min(groups, key=lambda g: (-len(g[0]), min(g[0])))

            pieces = [block]
            for nodes, _ in groups:
                if nodes is keeper[0]:
                    continue
                target = state.new_block()
                for node in nodes:
                    state.move(node, target)
                pieces.append(target)
            state.splits += 1

            if block in state.pending:
                for piece in pieces[1:]:
                    state.enqueue(piece)
            else:
                largest = _largest(pieces, state)
                for piece in pieces:
                    if piece != largest:
                        state.enqueue(piece)

    result = Partition.canonical(
        state.members, n=initial.n_nodes, drivers=initial.drivers
    )
    stats = RefinementStats(
        initial_blocks=initial.n_blocks,
        final_blocks=result.n_blocks,
        splitters=state.splitters,
        splits=state.splits,
        moved_nodes=state.moved_nodes,
        signature_updates=state.signature_updates,
    )
    logger.info(
        "refine: N=%d E=%d initial=%d blocks=%d splitters=%d splits=%d",
        A.n_rows,
        A.nnz,
        stats.initial_blocks,
        stats.final_blocks,
        stats.splitters,
        stats.splits,
    )
    return result, stats


def coarsest_control_equivalence(
    A: SparseMatrix, initial: Partition, tol: Optional[Weight] = None
) -> Partition:
    partition, _ = refine_with_stats(A, initial, tol=tol)
    return partition


def initial_partition(
    N: int,
    inputs: InputStructure,
    initial: Union[Partition, str, None] = DRIVERS_SPLIT,
) -> Partition:
    """`@drivers-split` (or None) separates the drivers from everything else."""
    if initial is None or initial == DRIVERS_SPLIT:
        return Partition.drivers_split(N, inputs.driver_nodes)
    if isinstance(initial, str):
        raise PartitionValidationError("unknown partition directive {!r}".format(initial))
    return initial.with_drivers(inputs.driver_nodes)


def reduce_pipeline(
    A: SparseMatrix,
    inputs: Optional[InputStructure] = None,
    initial: Union[Partition, str, None] = DRIVERS_SPLIT,
    tol: Optional[Weight] = None,
    strict: bool = True,
) -> Tuple[Partition, ReducedSystem]:
    """
    initial partition -> coarsest control equivalence -> reduced system.

    Options:
        inputs: driver nodes and bounds, computed by `minimum_driver_set` when
            omitted.
        initial: a Partition, or the `@drivers-split` directive.
        strict: see `ctrleq.lump.build_reduced_system`.
    """
    if inputs is None:
        inputs = minimum_driver_set(A, exact=A.exact)
    start = initial_partition(A.n_rows, inputs, initial)
    partition = coarsest_control_equivalence(A, start, tol=tol)
    reduced = build_reduced_system(A, inputs, partition, tol=tol, strict=strict)
    return partition, reduced

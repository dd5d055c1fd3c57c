#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
Slow, obviously correct counterparts of the fast algorithms, for small inputs
only: dense L A == L A Lbar L, matchings by exhaustive search, and the
coarsest control equivalence by enumerating every refinement.
"""

import itertools
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ctrleq.core.partition import Partition
from ctrleq.core.sparse import SparseMatrix
from ctrleq.exceptions import ValidationError

ORACLE_TOL = 1e-9
ENUMERATION_LIMIT = 10


def aggregation_matrices(partition: Partition) -> Tuple[np.ndarray, np.ndarray]:
    """dense L (n x N) and Lbar (N x n)."""
    L = np.zeros((partition.n_blocks, partition.n_nodes))
    for h, block in enumerate(partition):
        L[h, list(block)] = 1.0
    Lbar = L.T / L.sum(axis=1)
    return L, Lbar


def dense_residual(A: SparseMatrix, partition: Partition) -> float:
    """max |L A - L A Lbar L|, from the matrices themselves."""
    L, Lbar = aggregation_matrices(partition)
    LA = L @ A.to_dense().astype(float)
    return float(np.abs(LA - LA @ Lbar @ L).max(initial=0.0))


def dense_is_control_equivalence(
    A: SparseMatrix, partition: Partition, tol: float = ORACLE_TOL
) -> bool:
    return dense_residual(A, partition) <= tol


def brute_force_matching_size(A: SparseMatrix) -> int:
    """largest set of edges with pairwise distinct sources and destinations."""
    N = A.n_rows
    if N > ENUMERATION_LIMIT:
        raise ValidationError(
            "brute force matching is limited to N <= {}".format(ENUMERATION_LIMIT)
        )
    sources: List[List[int]] = [[] for _ in range(N)]
    for src, dst, _ in A.edges():
        sources[dst].append(src)

    best = 0

    def search(dst: int, used: int, size: int) -> None:
        nonlocal best
        if size + (N - dst) <= best:
            return
        if dst == N:
            best = size
            return
        for src in sources[dst]:
            if not used & (1 << src):
                search(dst + 1, used | (1 << src), size + 1)
        search(dst + 1, used, size)

    search(0, 0, 0)
    return best


def set_partitions(items: Sequence[int]) -> Iterator[List[List[int]]]:
    """every partition of `items` (restricted growth strings)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        yield [[first]] + smaller
        for index in range(len(smaller)):
            yield smaller[:index] + [[first] + smaller[index]] + smaller[index + 1 :]


def refinements(initial: Partition) -> Iterator[Partition]:
    """every partition refining `initial`, drivers carried over."""
    for pieces in itertools.product(*(set_partitions(block) for block in initial)):
        blocks = [block for split in pieces for block in split]
        yield Partition.canonical(
            blocks, n=initial.n_nodes, drivers=initial.drivers
        )


def exhaustive_coarsest(
    A: SparseMatrix, initial: Partition, tol: float = ORACLE_TOL
) -> Optional[Partition]:
    """
    The control equivalence refining `initial` with the fewest blocks. The
    discrete partition always qualifies, so None only comes back for N = 0.
    """
    if A.n_rows > ENUMERATION_LIMIT:
        raise ValidationError(
            "exhaustive enumeration is limited to N <= {}".format(ENUMERATION_LIMIT)
        )
    candidates = sorted(refinements(initial), key=lambda p: p.n_blocks)
    best: Optional[Partition] = None
    for candidate in candidates:
        if best is not None and candidate.n_blocks > best.n_blocks:
            break
        if dense_is_control_equivalence(A, candidate, tol):
            if best is not None:
                raise ValidationError(
                    "two coarsest refinements: {} and {}".format(best, candidate)
                )
            best = candidate
    return best

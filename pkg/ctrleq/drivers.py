#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
Minimum driver sets through structural controllability.

Every directed edge j -> i becomes a bipartite edge between the left copy of j
(out-endpoint) and the right copy of i (in-endpoint). A maximum matching of
that graph leaves some right copies unmatched, and those nodes are exactly the
ones that need their own control input.

    >>> A = SparseMatrix.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    >>> minimum_driver_set(A).driver_nodes
    (0,)
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import maximum_bipartite_matching

from ctrleq.core.inputs import DEFAULT_BOUNDS, InputStructure
from ctrleq.core.sparse import SparseMatrix
from ctrleq.exceptions import MatrixValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Matching:
    """pairs of (src, dst) such that every pair is an edge src -> dst."""

    pairs: Tuple[Tuple[int, int], ...]
    n_nodes: int

    def __post_init__(self) -> None:
        srcs = [src for src, _ in self.pairs]
        dsts = [dst for _, dst in self.pairs]
        if len(set(srcs)) != len(srcs) or len(set(dsts)) != len(dsts):
            raise MatrixValidationError("a node is matched twice: {}".format(self.pairs))

    @property
    def size(self) -> int:
        return len(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def mate_of_src(self) -> Dict[int, int]:
        return dict(self.pairs)

    def mate_of_dst(self) -> Dict[int, int]:
        return {dst: src for src, dst in self.pairs}

    def unmatched_dst(self) -> Tuple[int, ...]:
        matched = self.mate_of_dst()
        return tuple(i for i in range(self.n_nodes) if i not in matched)

    def is_subgraph_of(self, A: SparseMatrix) -> bool:
        return all(A.get(dst, src) != 0 for src, dst in self.pairs)


def _biadjacency(A: SparseMatrix) -> scipy.sparse.csr_matrix:
    # rows are the out-endpoints (src), columns the in-endpoints (dst).
    srcs, dsts = [], []
    for src, dst, _ in A.edges():
        srcs.append(src)
        dsts.append(dst)
    return scipy.sparse.csr_matrix(
        (
            np.ones(len(srcs), dtype=np.int8),
            (np.asarray(srcs, dtype=np.int32), np.asarray(dsts, dtype=np.int32)),
        ),
        shape=A.shape,
    )


def maximum_matching(A: SparseMatrix) -> Matching:
    """
    Hopcroft-Karp on the bipartite split of the network. Edges are handed over
    in canonical (src, dst) order so the result is reproducible.
    """
    if not A.is_square:
        raise MatrixValidationError("A must be square, got {}x{}".format(*A.shape))

    N = A.n_rows
    if N == 0 or A.nnz == 0:
        return Matching(pairs=(), n_nodes=N)

    src_of_dst = maximum_bipartite_matching(_biadjacency(A), perm_type="row")
    pairs = tuple(
        sorted(
            (int(src), dst) for dst, src in enumerate(src_of_dst) if src >= 0
        )
    )
    logger.debug("matching: N=%d E=%d size=%d", N, A.nnz, len(pairs))
    return Matching(pairs=pairs, n_nodes=N)


def minimum_driver_set(
    A: SparseMatrix,
    lo: object = DEFAULT_BOUNDS[0],
    hi: object = DEFAULT_BOUNDS[1],
    exact: bool = False,
    matching: Optional[Matching] = None,
) -> InputStructure:
    """
    The right-unmatched nodes of a maximum matching, each with bounds [lo, hi].

    A perfect matching still needs one control, so we then return the single
    lowest-index node, i.e. K = max(N - |matching|, 1).
    """
    if A.n_rows == 0:
        raise MatrixValidationError("cannot pick drivers for an empty network")
    if matching is None:
        matching = maximum_matching(A)
    drivers = matching.unmatched_dst() or (0,)
    logger.info(
        "drivers: N=%d matching=%d K=%d", A.n_rows, matching.size, len(drivers)
    )
    return InputStructure.uniform(drivers, lo, hi, exact=exact)


def has_augmenting_path(A: SparseMatrix, matching: Matching) -> bool:
    """
    One breadth-first search over alternating paths, starting at the unmatched
    src copies. Reaching an unmatched dst copy means `matching` is not maximum.
    """
    mate_of_src = matching.mate_of_src()
    mate_of_dst = matching.mate_of_dst()

    queue = deque(j for j in range(A.n_cols) if j not in mate_of_src)
    seen_src = set(queue)
    while queue:
        src = queue.popleft()
        for dst, _ in A.column(src):
            if mate_of_src.get(src) == dst:
                continue
            if dst not in mate_of_dst:
                return True
            nxt = mate_of_dst[dst]
            if nxt not in seen_src:
                seen_src.add(nxt)
                queue.append(nxt)
    return False

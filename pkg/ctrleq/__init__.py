#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""

Coarse-graining of linear network dynamics dx/dt = A x + B u that keeps
optimal control costs. A partition of the nodes is a control equivalence when
the block sums of the state evolve on their own; ctrleq finds the coarsest
one, builds the reduced system and checks the result numerically.

Usage in interactive mode:

    In [1]: from ctrleq.io import parse_network
    In [2]: net = parse_network("tests/data/three_node.tsv", exact=True)
    In [3]: from ctrleq.core import Partition
    In [4]: from ctrleq.refine import reduce_pipeline
    In [5]: from ctrleq.core import InputStructure
    In [6]: inputs = InputStructure.with_bounds([1, 2], [(1, 2), (3, 4)], exact=True)

    In [7]: partition, reduced = reduce_pipeline(
       ...:     net.matrix, inputs, initial=Partition.whole(3))

    In [8]: partition
    Out[8]: <Partition N=3 n=2 k=1 [[1, 2], [0]]>

    In [9]: reduced.A_hat
    Out[9]:
    array([[Fraction(0, 1), Fraction(3, 4)],
           [Fraction(1, 2), Fraction(0, 1)]], dtype=object)

    In [10]: reduced.m_hat, reduced.M_hat
    Out[10]: ((Fraction(4, 1),), (Fraction(6, 1),))

Note a few things:
  1.- Edges are stored as A[dst, src], node indices are 0-based and the
      labels of the input file are kept on the side (`net.labels`).
  2.- Driver blocks come first in every partition the library returns, the
      reduced inputs uhat_l drive exactly those blocks.
  3.- `exact=True` switches to Fraction arithmetic, the default is float
      with a tolerance of 1e-9 * (1 + max |A[i, j]|).

The same pipeline from the command line:

    $ ctrleq drivers network.mtx
    $ ctrleq reduce network.mtx --drivers-split --exact
    $ ctrleq verify --scale quick
    $ ctrleq report manifest.csv --timings
"""

from ctrleq import __version__, core, io, lump, refine, sim
from ctrleq.core import InputStructure, Partition, SparseMatrix
from ctrleq.refine import coarsest_control_equivalence, reduce_pipeline

__all__ = [
    "InputStructure",
    "Partition",
    "SparseMatrix",
    "__version__",
    "coarsest_control_equivalence",
    "core",
    "io",
    "lump",
    "reduce_pipeline",
    "refine",
    "sim",
]

#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

import math
from collections import defaultdict
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

import numpy as np
import scipy.sparse

from ctrleq.exceptions import MatrixValidationError
from ctrleq.utils import Weight, x2weight

Adjacency = Tuple[Tuple[int, Weight], ...]


class SparseMatrix(object):
    """
    Immutable sparse matrix with row and column adjacency views.

    We follow the network convention of the dynamics `dx/dt = A x + B u`: the
    entry `A[i, j]` is the weight of the edge `j -> i`, so `column(j)` lists the
    out-edges of node `j` and `row(i)` lists the in-edges of node `i`.

    Duplicate (row, col) pairs are summed at build time and entries that sum to
    zero are dropped. With `exact=True` every weight is a `Fraction`.
    """

    __slots__ = ("_n_rows", "_n_cols", "_exact", "_rows", "_cols", "_nnz")

    def __init__(
        self,
        n_rows: int,
        n_cols: int,
        entries: Iterable[Tuple[int, int, object]] = (),
        exact: bool = False,
    ) -> None:
        if n_rows < 0 or n_cols < 0:
            raise MatrixValidationError(
                "negative dimensions {}x{}".format(n_rows, n_cols)
            )

        acc: Dict[Tuple[int, int], List[Weight]] = defaultdict(list)
        for row, col, weight in entries:
            if not (0 <= row < n_rows and 0 <= col < n_cols):
                raise MatrixValidationError(
                    "entry ({}, {}) outside a {}x{} matrix".format(
                        row, col, n_rows, n_cols
                    )
                )
            try:
                acc[(row, col)].append(x2weight(weight, exact))
            except (TypeError, ValueError) as e:
                raise MatrixValidationError(
                    "bad weight at ({}, {}): {}".format(row, col, e)
                ) from e

        cols: List[List[Tuple[int, Weight]]] = [[] for _ in range(n_cols)]
        rows: List[List[Tuple[int, Weight]]] = [[] for _ in range(n_rows)]
        nnz = 0
        for (row, col), weights in sorted(acc.items(), key=lambda kv: kv[0][::-1]):
            weight = sum(weights, Fraction(0)) if exact else math.fsum(weights)
            if weight == 0:
                continue
            cols[col].append((row, weight))
            rows[row].append((col, weight))
            nnz += 1

        self._n_rows = n_rows
        self._n_cols = n_cols
        self._exact = exact
        self._cols: Tuple[Adjacency, ...] = tuple(tuple(c) for c in cols)
        self._rows: Tuple[Adjacency, ...] = tuple(tuple(r) for r in rows)
        self._nnz = nnz

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[object]], exact: bool = False):
        n_rows = len(dense)
        n_cols = len(dense[0]) if n_rows else 0
        entries = (
            (i, j, value)
            for i, row in enumerate(dense)
            for j, value in enumerate(row)
            if value != 0
        )
        return cls(n_rows, n_cols, entries, exact=exact)

    @classmethod
    def from_edges(
        cls, n: int, edges: Iterable[Tuple[int, int, object]], exact: bool = False
    ):
        """builds the N x N matrix of `(src, dst, weight)` records, A[dst, src]."""
        return cls(n, n, ((dst, src, w) for src, dst, w in edges), exact=exact)

    def __repr__(self) -> str:
        return "<SparseMatrix {}x{} nnz={}{}>".format(
            self._n_rows, self._n_cols, self._nnz, " exact" if self._exact else ""
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._cols == other._cols

    def __hash__(self) -> int:
        return hash((self.shape, self._cols))

    @property
    def n_rows(self) -> int:
        return self._n_rows

    @property
    def n_cols(self) -> int:
        return self._n_cols

    @property
    def shape(self) -> Tuple[int, int]:
        return (self._n_rows, self._n_cols)

    @property
    def nnz(self) -> int:
        return self._nnz

    @property
    def exact(self) -> bool:
        return self._exact

    @property
    def is_square(self) -> bool:
        return self._n_rows == self._n_cols

    def column(self, j: int) -> Adjacency:
        return self._cols[j]

    def row(self, i: int) -> Adjacency:
        return self._rows[i]

    def get(self, i: int, j: int) -> Weight:
        for row, weight in self._cols[j]:
            if row == i:
                return weight
        return Fraction(0) if self._exact else 0.0

    def entries(self) -> Iterator[Tuple[int, int, Weight]]:
        """(row, col, weight) in canonical (col, row) order."""
        for col, adjacency in enumerate(self._cols):
            for row, weight in adjacency:
                yield row, col, weight

    def edges(self) -> Iterator[Tuple[int, int, Weight]]:
        """(src, dst, weight) in canonical (src, dst) order."""
        for col, adjacency in enumerate(self._cols):
            for row, weight in adjacency:
                yield col, row, weight

    def max_abs(self) -> Weight:
        return max((abs(w) for _, _, w in self.entries()), default=0)

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(
            self._n_cols,
            self._n_rows,
            ((col, row, w) for row, col, w in self.entries()),
            exact=self._exact,
        )

    def symmetrized(self) -> "SparseMatrix":
        """A + A^T with the diagonal counted once (`--symmetrize`)."""
        if not self.is_square:
            raise MatrixValidationError("only square matrices can be symmetrized")
        mirrored = ((col, row, w) for row, col, w in self.entries() if row != col)
        return SparseMatrix(
            self._n_rows,
            self._n_cols,
            list(self.entries()) + list(mirrored),
            exact=self._exact,
        )

    def as_float(self) -> "SparseMatrix":
        if not self._exact:
            return self
        return SparseMatrix(
            self._n_rows,
            self._n_cols,
            ((r, c, float(w)) for r, c, w in self.entries()),
        )

    def to_scipy(self) -> scipy.sparse.csr_array:
        rows, cols, data = [], [], []
        for row, col, weight in self.entries():
            rows.append(row)
            cols.append(col)
            data.append(float(weight))
        return scipy.sparse.csr_array(
            (
                np.asarray(data, dtype=float),
                (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)),
            ),
            shape=self.shape,
        )

    def to_dense(self) -> np.ndarray:
        """float64 array, or an object array of fractions in exact mode."""
        if self._exact:
            dense = np.full(self.shape, Fraction(0), dtype=object)
        else:
            dense = np.zeros(self.shape, dtype=float)
        for row, col, weight in self.entries():
            dense[row, col] = weight
        return dense

#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
import scipy.sparse

from ctrleq.core.inputs import InputStructure
from ctrleq.core.sparse import SparseMatrix
from ctrleq.exceptions import ValidationError
from ctrleq.lump import ReducedSystem


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """
    d/dt x = A x + B u in float64, where column l of B is the unit vector of
    state `driver_states[l]` and u_l is bounded by [lo[l], hi[l]].

    `reduced` systems live in block-sum coordinates.
    """

    A: scipy.sparse.csr_array
    driver_states: Tuple[int, ...]
    lo: np.ndarray
    hi: np.ndarray
    reduced: bool = False
    label: str = "original"

    @classmethod
    def original(cls, A: SparseMatrix, inputs: InputStructure) -> "LinearSystem":
        if not A.is_square:
            raise ValidationError("A must be square, got {}x{}".format(*A.shape))
        for node in inputs.driver_nodes:
            if not 0 <= node < A.n_rows:
                raise ValidationError(
                    "driver {} outside 0..{}".format(node, A.n_rows - 1)
                )
        return cls(
            A=A.to_scipy(),
            driver_states=tuple(inputs.driver_nodes),
            lo=inputs.lo_array(),
            hi=inputs.hi_array(),
        )

    @classmethod
    def from_reduced(cls, reduced: ReducedSystem) -> "LinearSystem":
        if isinstance(reduced.A_hat, SparseMatrix):
            A = reduced.A_hat.to_scipy()
        else:
            A = scipy.sparse.csr_array(reduced.A_hat_float())
        return cls(
            A=A,
            driver_states=tuple(range(reduced.k)),
            lo=reduced.lo_array(),
            hi=reduced.hi_array(),
            reduced=True,
            label="reduced",
        )

    @classmethod
    def from_dense(
        cls,
        A: np.ndarray,
        driver_states,
        lo,
        hi,
        reduced: bool = False,
    ) -> "LinearSystem":
        return cls(
            A=scipy.sparse.csr_array(np.asarray(A, dtype=float)),
            driver_states=tuple(driver_states),
            lo=np.asarray(lo, dtype=float),
            hi=np.asarray(hi, dtype=float),
            reduced=reduced,
            label="reduced" if reduced else "original",
        )

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def n_controls(self) -> int:
        return len(self.driver_states)

    def B(self) -> np.ndarray:
        B = np.zeros((self.n_states, self.n_controls), dtype=float)
        B[list(self.driver_states), np.arange(self.n_controls)] = 1.0
        return B

    def apply_B(self, u: np.ndarray) -> np.ndarray:
        """B u for u of shape (K,) or (K, batch)."""
        out = np.zeros((self.n_states,) + u.shape[1:], dtype=float)
        np.add.at(out, list(self.driver_states), u)
        return out


Model = Union[LinearSystem, ReducedSystem]


def as_system(model: Model, inputs: Optional[InputStructure] = None) -> LinearSystem:
    """accepts a LinearSystem, a ReducedSystem, or a SparseMatrix plus inputs."""
    if isinstance(model, LinearSystem):
        return model
    if isinstance(model, ReducedSystem):
        return LinearSystem.from_reduced(model)
    if isinstance(model, SparseMatrix):
        if inputs is None:
            raise ValidationError("an InputStructure is needed next to A")
        return LinearSystem.original(model, inputs)
    raise TypeError("cannot simulate {!r}".format(model))


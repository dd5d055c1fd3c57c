#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

from dataclasses import dataclass, field
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from ctrleq.exceptions import BoundsValidationError, ValidationError
from ctrleq.utils import Weight, x2weight

DEFAULT_BOUNDS = (0, 1)


@dataclass(frozen=True)
class InputStructure:
    """
    The input matrix B, given by its K driver nodes (column l of B is the unit
    vector of `driver_nodes[l]`), and the control cube [m; M].
    """

    driver_nodes: Tuple[int, ...]
    bounds_lo: Tuple[Weight, ...]
    bounds_hi: Tuple[Weight, ...]
    _index: Dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "driver_nodes", tuple(self.driver_nodes))
        object.__setattr__(self, "bounds_lo", tuple(self.bounds_lo))
        object.__setattr__(self, "bounds_hi", tuple(self.bounds_hi))

        if len(set(self.driver_nodes)) != len(self.driver_nodes):
            raise ValidationError(
                "driver nodes must be pairwise distinct: {}".format(self.driver_nodes)
            )
        if not len(self.bounds_lo) == len(self.bounds_hi) == len(self.driver_nodes):
            raise BoundsValidationError(
                "expected {} bounds, got {} lower and {} upper".format(
                    len(self.driver_nodes), len(self.bounds_lo), len(self.bounds_hi)
                )
            )
        for l, (lo, hi) in enumerate(zip(self.bounds_lo, self.bounds_hi)):
            if lo > hi:
                raise BoundsValidationError(
                    "control {}: lower bound {} exceeds upper bound {}".format(l, lo, hi)
                )
        object.__setattr__(
            self, "_index", {node: l for l, node in enumerate(self.driver_nodes)}
        )

    @classmethod
    def uniform(
        cls,
        driver_nodes: Iterable[int],
        lo: object = DEFAULT_BOUNDS[0],
        hi: object = DEFAULT_BOUNDS[1],
        exact: bool = False,
    ) -> "InputStructure":
        drivers = tuple(driver_nodes)
        lo, hi = x2weight(lo, exact), x2weight(hi, exact)
        return cls(drivers, (lo,) * len(drivers), (hi,) * len(drivers))

    @classmethod
    def with_bounds(
        cls,
        driver_nodes: Iterable[int],
        bounds: Sequence[Tuple[object, object]],
        exact: bool = False,
    ) -> "InputStructure":
        return cls(
            tuple(driver_nodes),
            tuple(x2weight(lo, exact) for lo, _ in bounds),
            tuple(x2weight(hi, exact) for _, hi in bounds),
        )

    @property
    def K(self) -> int:
        return len(self.driver_nodes)

    def control_of(self, node: int) -> int:
        """index l of the control that drives `node`."""
        return self._index[node]

    def is_driver(self, node: int) -> bool:
        return node in self._index

    def lo_array(self) -> np.ndarray:
        return np.asarray([float(v) for v in self.bounds_lo], dtype=float)

    def hi_array(self) -> np.ndarray:
        return np.asarray([float(v) for v in self.bounds_hi], dtype=float)

    def to_dense(self, n: int) -> np.ndarray:
        B = np.zeros((n, self.K), dtype=float)
        for l, node in enumerate(self.driver_nodes):
            B[node, l] = 1.0
        return B

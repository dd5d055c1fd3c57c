#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
Reduced systems and the translation of states and controls between a network
and its lumped version.

Given a control equivalence H_1..H_n whose first k blocks hold the drivers,
the reduced system is

    d/dt xhat = Ahat xhat + Bhat uhat,    Ahat = L A Lbar,

where column l of Bhat is the unit vector of block l, and the macro-input
uhat_l is the sum of the original controls steering the drivers of H_l. Its
bounds are the sums of theirs.

Usage:

    In [1]: from ctrleq import lump
    In [2]: reduced = lump.build_reduced_system(A, inputs, partition)
    In [3]: uhat = lump.project_control(u, reduced)
    In [4]: u2 = lump.lift_control(uhat, reduced)   # u2 stays inside [m; M]
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ctrleq.core.equivalence import is_control_equivalence
from ctrleq.core.inputs import InputStructure
from ctrleq.core.partition import Partition
from ctrleq.core.sparse import SparseMatrix
from ctrleq.exceptions import (
    BoundsValidationError,
    GridMismatchError,
    NotControlEquivalenceError,
    ValidationError,
)
from ctrleq.utils import Weight, weight_sum

logger = logging.getLogger(__name__)

# above this many blocks Ahat is kept as a SparseMatrix.
DENSE_LIMIT = 10_000

# relative slack when checking float samples against their bounds.
BOUNDS_SLACK = 1e-12

ControlGroups = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True, eq=False)
class ReducedSystem:
    A_hat: Union[np.ndarray, SparseMatrix]
    k: int
    m_hat: Tuple[Weight, ...]
    M_hat: Tuple[Weight, ...]
    blocks: Partition
    control_groups: ControlGroups
    inputs: InputStructure
    exact: bool = False

    @property
    def n(self) -> int:
        return self.blocks.n_blocks

    @property
    def N(self) -> int:
        return self.blocks.n_nodes

    @property
    def K(self) -> int:
        return self.inputs.K

    @property
    def is_dense(self) -> bool:
        return isinstance(self.A_hat, np.ndarray)

    def B_hat(self) -> np.ndarray:
        """n x k, column l is the unit vector of block l."""
        B = np.zeros((self.n, self.k), dtype=float)
        B[np.arange(self.k), np.arange(self.k)] = 1.0
        return B

    def A_hat_row(self, h: int) -> Dict[int, Weight]:
        """nonzero entries of row h of Ahat."""
        if isinstance(self.A_hat, SparseMatrix):
            return dict(self.A_hat.row(h))
        row = self.A_hat[h]
        return {b: row[b] for b in range(self.n) if row[b] != 0}

    def A_hat_float(self) -> np.ndarray:
        """dense float64 copy of Ahat."""
        if isinstance(self.A_hat, SparseMatrix):
            return self.A_hat.as_float().to_dense()
        return np.asarray(self.A_hat, dtype=float)

    def lo_array(self) -> np.ndarray:
        return np.asarray([float(v) for v in self.m_hat], dtype=float)

    def hi_array(self) -> np.ndarray:
        return np.asarray([float(v) for v in self.M_hat], dtype=float)


@dataclass(frozen=True, eq=False)
class ControlSignal:
    """
    Piecewise constant control on the uniform grid 0, dt, .., T: `values[s]`
    is applied on [s dt, (s + 1) dt). `reduced` tells whether the channels are
    macro-inputs.
    """

    values: np.ndarray
    dt: float
    T: float
    bounds_lo: np.ndarray
    bounds_hi: np.ndarray
    reduced: bool = False
    n_steps: int = field(init=False)

    def __post_init__(self) -> None:
        n_steps = grid_steps(self.T, self.dt)
        values = np.asarray(self.values)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2 or values.shape[0] != n_steps:
            raise GridMismatchError(
                "expected {} samples for T={} dt={}, got {}".format(
                    n_steps, self.T, self.dt, values.shape[0]
                )
            )
        lo = np.asarray(self.bounds_lo)
        hi = np.asarray(self.bounds_hi)
        if lo.shape != (values.shape[1],) or hi.shape != (values.shape[1],):
            raise GridMismatchError(
                "{} channels but {} lower and {} upper bounds".format(
                    values.shape[1], lo.size, hi.size
                )
            )
        _check_inside(values, lo, hi)

        object.__setattr__(self, "values", values)
        object.__setattr__(self, "bounds_lo", lo)
        object.__setattr__(self, "bounds_hi", hi)
        object.__setattr__(self, "n_steps", n_steps)

    @classmethod
    def constant(
        cls,
        value: Sequence[Weight],
        T: float,
        dt: float,
        bounds_lo: Sequence[Weight],
        bounds_hi: Sequence[Weight],
        reduced: bool = False,
    ) -> "ControlSignal":
        n_steps = grid_steps(T, dt)
        row = np.asarray(list(value), dtype=_dtype_of(value))
        values = np.tile(row, (n_steps, 1))
        return cls(values, dt, T, _as_array(bounds_lo), _as_array(bounds_hi), reduced)

    @classmethod
    def for_inputs(
        cls, values: np.ndarray, T: float, dt: float, inputs: InputStructure
    ) -> "ControlSignal":
        return cls(
            values, dt, T, _as_array(inputs.bounds_lo), _as_array(inputs.bounds_hi)
        )

    @classmethod
    def for_reduced(
        cls, values: np.ndarray, T: float, dt: float, reduced: ReducedSystem
    ) -> "ControlSignal":
        return cls(
            values,
            dt,
            T,
            _as_array(reduced.m_hat),
            _as_array(reduced.M_hat),
            reduced=True,
        )

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt

    def at_grid(self) -> np.ndarray:
        """one row per grid point, the last one repeating the final sample."""
        return np.concatenate([self.values, self.values[-1:]], axis=0)

    def as_float(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def grid_steps(T: float, dt: float) -> int:
    if not (dt > 0 and math.isfinite(dt)):
        raise GridMismatchError("dt must be positive, got {}".format(dt))
    if not (T > 0 and math.isfinite(T)):
        raise GridMismatchError("T must be positive, got {}".format(T))
    steps = int(round(T / dt))
    if steps < 1 or abs(steps * dt - T) > 1e-9 * max(1.0, T):
        raise GridMismatchError("T={} is not a multiple of dt={}".format(T, dt))
    return steps


def _dtype_of(values: Sequence[Weight]) -> type:
    return object if any(isinstance(v, Fraction) for v in values) else float


def _as_array(values: Sequence[Weight]) -> np.ndarray:
    values = list(values)
    return np.asarray(values, dtype=_dtype_of(values))


def _check_inside(values: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> None:
    if values.dtype == object:
        below = values < lo
        above = values > hi
    else:
        lo_f, hi_f = lo.astype(float), hi.astype(float)
        slack_lo = BOUNDS_SLACK * (1.0 + np.abs(lo_f))
        slack_hi = BOUNDS_SLACK * (1.0 + np.abs(hi_f))
        below = values < lo_f - slack_lo
        above = values > hi_f + slack_hi
    bad = np.argwhere(np.asarray(below | above, dtype=bool))
    if bad.size:
        step, channel = (int(v) for v in bad[0])
        raise BoundsValidationError(
            "sample {} of channel {} is {}, outside [{}, {}]".format(
                step, channel, values[step, channel], lo[channel], hi[channel]
            )
        )


def _block_pair_sums(
    A: SparseMatrix, partition: Partition
) -> Dict[Tuple[int, int], Weight]:
    collected: Dict[Tuple[int, int], List[Weight]] = defaultdict(list)
    block_of = partition.assignment
    for i, j, w in A.entries():
        collected[(block_of[i], block_of[j])].append(w)
    return {key: weight_sum(ws) for key, ws in collected.items()}


def build_reduced_system(
    A: SparseMatrix,
    inputs: InputStructure,
    partition: Partition,
    tol: Optional[Weight] = None,
    strict: bool = True,
) -> ReducedSystem:
    """
    Options:
        strict: when True (the default) a partition that is not a control
            equivalence raises NotControlEquivalenceError. Pass False to log a
            warning and build Ahat = L A Lbar anyway (research use, e.g. the
            negative controls of the verification suites).
        tol: tolerance handed to `is_control_equivalence`.
    """

    drivers = frozenset(inputs.driver_nodes)
    if partition.drivers != drivers:
        partition = partition.with_drivers(drivers)

    check = is_control_equivalence(A, partition, tol)
    if not check:
        msg = "partition is not a control equivalence (residual {})".format(
            check.residual
        )
        if strict:
            raise NotControlEquivalenceError(msg, witness=check.witness)
        logger.warning("%s, witness=%s", msg, check.witness)

    for index in partition.mixed_blocks():
        logger.warning(
            "block %d mixes driver and non-driver nodes: %s",
            index,
            list(partition[index]),
        )

    n, k = partition.n_blocks, partition.n_driver_blocks
    sizes = partition.sizes()
    sums = _block_pair_sums(A, partition)
    if n <= DENSE_LIMIT:
        if A.exact:
            A_hat = np.full((n, n), Fraction(0), dtype=object)
        else:
            A_hat = np.zeros((n, n), dtype=float)
        for (h, b), total in sums.items():
            A_hat[h, b] = total / sizes[b]
    else:
        A_hat = SparseMatrix(
            n, n, ((h, b, total / sizes[b]) for (h, b), total in sums.items()), A.exact
        )

    groups: List[Tuple[int, ...]] = []
    for index in range(k):
        groups.append(
            tuple(
                sorted(
                    inputs.control_of(node)
                    for node in partition[index]
                    if inputs.is_driver(node)
                )
            )
        )

    m_hat = tuple(weight_sum(inputs.bounds_lo[l] for l in group) for group in groups)
    M_hat = tuple(weight_sum(inputs.bounds_hi[l] for l in group) for group in groups)

    logger.info("lump: N=%d n=%d K=%d k=%d", partition.n_nodes, n, inputs.K, k)
    return ReducedSystem(
        A_hat=A_hat,
        k=k,
        m_hat=m_hat,
        M_hat=M_hat,
        blocks=partition,
        control_groups=tuple(groups),
        inputs=inputs,
        exact=A.exact,
    )


def project_state(x: Sequence[Weight], partition: Partition) -> np.ndarray:
    """block sums L x."""
    x = np.asarray(x)
    if x.shape[0] != partition.n_nodes:
        raise ValidationError(
            "state has {} entries, partition covers {}".format(
                x.shape[0], partition.n_nodes
            )
        )
    if x.dtype == object:
        return np.asarray(
            [weight_sum(x[j] for j in block) for block in partition], dtype=object
        )
    return np.bincount(
        np.asarray(partition.assignment, dtype=np.int64),
        weights=x.astype(float),
        minlength=partition.n_blocks,
    )


def _groups_of(
    control_groups: Union[ReducedSystem, Sequence[Sequence[int]]]
) -> ControlGroups:
    if isinstance(control_groups, ReducedSystem):
        return control_groups.control_groups
    return tuple(tuple(group) for group in control_groups)


def project_control(
    u: ControlSignal, control_groups: Union[ReducedSystem, Sequence[Sequence[int]]]
) -> ControlSignal:
    """uhat_l = sum of u_l' over the controls l' grouped into macro-input l."""
    groups = _groups_of(control_groups)
    n_controls = sum(len(g) for g in groups)
    if u.n_channels != n_controls:
        raise GridMismatchError(
            "signal has {} channels, the control groups cover {}".format(
                u.n_channels, n_controls
            )
        )

    def lumped(columns: np.ndarray) -> np.ndarray:
        return np.stack(
            [columns[..., list(g)].sum(axis=-1) for g in groups], axis=-1
        ) if groups else np.zeros(columns.shape[:-1] + (0,), dtype=columns.dtype)

    return ControlSignal(
        values=lumped(u.values),
        dt=u.dt,
        T=u.T,
        bounds_lo=lumped(u.bounds_lo),
        bounds_hi=lumped(u.bounds_hi),
        reduced=True,
    )


def lift_control(u_hat: ControlSignal, reduced: ReducedSystem) -> ControlSignal:
    """
    The canonical affine lifting: inside macro-input l every original control
    l' moves from m_l' towards M_l' by the same fraction that uhat_l moved from
    mhat_l towards Mhat_l. A degenerate macro-input (mhat_l = Mhat_l) lifts to
    u_l' = m_l'.
    """
    if u_hat.n_channels != reduced.k:
        raise GridMismatchError(
            "signal has {} channels, the reduced system has k={}".format(
                u_hat.n_channels, reduced.k
            )
        )
    m_hat, M_hat = _as_array(reduced.m_hat), _as_array(reduced.M_hat)
    _check_inside(u_hat.values, m_hat, M_hat)

    inputs = reduced.inputs
    exact = u_hat.values.dtype == object or reduced.exact
    dtype = object if exact else float
    lifted = np.empty((u_hat.n_steps, inputs.K), dtype=dtype)
    for l, group in enumerate(reduced.control_groups):
        column = u_hat.values[:, l]
        width = M_hat[l] - m_hat[l]
        for l2 in group:
            lo, hi = inputs.bounds_lo[l2], inputs.bounds_hi[l2]
            if width == 0:
                lifted[:, l2] = lo
            elif exact:
                lifted[:, l2] = [lo + (hi - lo) / width * (v - m_hat[l]) for v in column]
            else:
                lifted[:, l2] = np.clip(
                    float(lo)
                    + (float(hi) - float(lo)) / float(width) * (column - float(m_hat[l])),
                    float(lo),
                    float(hi),
                )

    return ControlSignal(
        values=lifted,
        dt=u_hat.dt,
        T=u_hat.T,
        bounds_lo=_as_array(inputs.bounds_lo),
        bounds_hi=_as_array(inputs.bounds_hi),
    )


def exchange_residual(A: SparseMatrix, reduced: ReducedSystem) -> Weight:
    """max |L A - Ahat L|, zero (up to round-off) exactly for control equivalences."""
    partition = reduced.blocks
    sizes = partition.sizes()
    zero: Weight = Fraction(0) if A.exact else 0.0
    worst: Weight = zero
    for h, block in enumerate(partition):
        signature: Dict[int, List[Weight]] = defaultdict(list)
        for i in block:
            for j, w in A.row(i):
                signature[j].append(w)
        row = reduced.A_hat_row(h)
        touched: Dict[int, int] = defaultdict(int)
        for j, ws in signature.items():
            b = partition.block_of(j)
            touched[b] += 1
            worst = max(worst, abs(weight_sum(ws) - row.get(b, zero)))
        for b, value in row.items():
            if touched[b] < sizes[b]:
                worst = max(worst, abs(value))
    return worst


def expand_final_cost(c_hat: Sequence[Weight], partition: Partition) -> np.ndarray:
    """c = L^T chat: every node gets the coefficient of its block."""
    c_hat = np.asarray(c_hat)
    if c_hat.shape[0] != partition.n_blocks:
        raise ValidationError(
            "{} coefficients for {} blocks".format(c_hat.shape[0], partition.n_blocks)
        )
    return c_hat[np.asarray(partition.assignment, dtype=np.int64)]


def representative_state(x_hat: Sequence[Weight], partition: Partition) -> np.ndarray:
    """
    Lbar xhat, the state spreading every block sum uniformly over its block.
    One of many states with L x = xhat; meant for plotting only.
    """
    x_hat = np.asarray(x_hat, dtype=float)
    sizes = np.asarray(partition.sizes(), dtype=float)
    assignment = np.asarray(partition.assignment, dtype=np.int64)
    return (x_hat / sizes)[assignment]

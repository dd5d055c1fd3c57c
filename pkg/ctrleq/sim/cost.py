#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
Costs that are constant on a partition: they only look at block sums L x of
the state and at the macro-inputs uhat of the control, so evaluating them on
an original (trajectory, control) pair and on the matching reduced pair goes
through exactly the same code once both are lumped.

    J = F(x(T)) + integral_0^T S(t, L x(t)) + Q(t, uhat(t)) dt

with F(x) = sum_i chat_i (L x)_i, S a (squared or plain Euclidean) distance of
L x to a reference, and Q the same for uhat. The integral is a trapezoidal sum
over the grid.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ctrleq.core.equivalence import build_aggregation
from ctrleq.core.partition import Partition
from ctrleq.exceptions import GridMismatchError, ValidationError
from ctrleq.lump import ControlSignal, ReducedSystem, project_control
from ctrleq.sim.integrate import Trajectory

NORMS = ("squared", "euclidean")


@dataclass(frozen=True, eq=False)
class CostSpec:
    """
    Options:
        final: chat, one coefficient per block (None for no final cost).
        state_weight, state_reference: the S term, weight times the distance
            of the block sums to the reference (a vector, or one row per grid
            point).
        control_weight, control_reference: the Q term on the macro-inputs.
        norm: "squared" for ||.||^2, "euclidean" for ||.||.
    """

    partition: Partition
    control_groups: tuple
    final: Optional[np.ndarray] = None
    state_weight: float = 0.0
    state_reference: Optional[np.ndarray] = None
    control_weight: float = 0.0
    control_reference: Optional[np.ndarray] = None
    norm: str = "squared"

    def __post_init__(self) -> None:
        if self.norm not in NORMS:
            raise ValidationError("norm must be one of {}".format(NORMS))
        if self.final is not None:
            final = np.asarray(self.final, dtype=float)
            if final.shape != (self.partition.n_blocks,):
                raise ValidationError(
                    "final cost has {} coefficients for {} blocks".format(
                        final.size, self.partition.n_blocks
                    )
                )
            object.__setattr__(self, "final", final)

    @classmethod
    def for_reduced(cls, reduced: ReducedSystem, **kwargs) -> "CostSpec":
        return cls(
            partition=reduced.blocks, control_groups=reduced.control_groups, **kwargs
        )

    @property
    def n_blocks(self) -> int:
        return self.partition.n_blocks

    @property
    def k(self) -> int:
        return len(self.control_groups)

    def is_zero(self) -> bool:
        return (
            (self.final is None or not np.any(self.final))
            and self.state_weight == 0
            and self.control_weight == 0
        )


def _lumped_states(trajectory: Trajectory, cost: CostSpec) -> np.ndarray:
    if trajectory.reduced:
        if trajectory.n_states != cost.n_blocks:
            raise ValidationError(
                "reduced trajectory has {} states for {} blocks".format(
                    trajectory.n_states, cost.n_blocks
                )
            )
        return trajectory.states
    L = build_aggregation(cost.partition, trajectory.n_states).L
    return (L @ trajectory.states.T).T


def _lumped_controls(u: ControlSignal, cost: CostSpec) -> np.ndarray:
    if not u.reduced:
        u = project_control(u, cost.control_groups)
    if u.n_channels != cost.k:
        raise GridMismatchError(
            "control has {} macro-inputs, the cost expects {}".format(
                u.n_channels, cost.k
            )
        )
    return np.asarray(u.at_grid(), dtype=float)


def _distance(
    values: np.ndarray, reference: Optional[np.ndarray], norm: str
) -> np.ndarray:
    diff = values if reference is None else values - np.asarray(reference, dtype=float)
    squared = np.sum(diff * diff, axis=1)
    return squared if norm == "squared" else np.sqrt(squared)


def trapezoid(samples: np.ndarray, dt: float) -> float:
    if samples.shape[0] < 2:
        return 0.0
    return float(dt * (samples.sum() - 0.5 * (samples[0] + samples[-1])))


def evaluate_cost(
    trajectory: Trajectory, u: ControlSignal, cost: CostSpec
) -> float:
    if abs(trajectory.dt - u.dt) > 1e-12 or trajectory.n_steps != u.n_steps:
        raise GridMismatchError(
            "trajectory grid ({}, {}) does not match control grid ({}, {})".format(
                trajectory.T, trajectory.dt, u.T, u.dt
            )
        )

    states = _lumped_states(trajectory, cost)
    value = 0.0
    if cost.final is not None:
        value += float(cost.final @ states[-1])

    running = np.zeros(states.shape[0], dtype=float)
    if cost.state_weight:
        running += cost.state_weight * _distance(states, cost.state_reference, cost.norm)
    if cost.control_weight:
        controls = _lumped_controls(u, cost)
        running += cost.control_weight * _distance(
            controls, cost.control_reference, cost.norm
        )
    return value + trapezoid(running, trajectory.dt)


def tracking_cost(
    reference: Trajectory,
    reference_control: ControlSignal,
    partition: Union[Partition, ReducedSystem],
    control_groups: Optional[Sequence[Sequence[int]]] = None,
    weight: float = 1.0,
) -> CostSpec:
    """
    ||L x - L x_ref(t)|| + ||uhat - uhat_ref(t)||: zero along the reference
    pair and positive elsewhere. On a partition that is not a control
    equivalence the reduced system can not follow the lumped reference, which
    makes the reduced cost of the matched control strictly positive.
    """
    if isinstance(partition, ReducedSystem):
        control_groups = partition.control_groups
        partition = partition.blocks
    if control_groups is None:
        raise ValidationError("tracking a control needs its control groups")

    cost = CostSpec(
        partition=partition, control_groups=tuple(tuple(g) for g in control_groups)
    )
    states = _lumped_states(reference, cost)
    controls = _lumped_controls(reference_control, cost)
    return CostSpec(
        partition=partition,
        control_groups=cost.control_groups,
        state_weight=weight,
        state_reference=states,
        control_weight=weight,
        control_reference=controls,
        norm="euclidean",
    )

#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

import logging
from typing import Optional, Sequence

import numpy as np

from ctrleq.core.equivalence import build_aggregation
from ctrleq.core.inputs import InputStructure
from ctrleq.core.partition import Partition
from ctrleq.core.sparse import SparseMatrix
from ctrleq.exceptions import DivergenceError, GridMismatchError, ValidationError
from ctrleq.lump import ControlSignal, ReducedSystem, project_control, project_state
from ctrleq.sim.integrate import Propagator
from ctrleq.sim.system import LinearSystem

logger = logging.getLogger(__name__)


def trajectory_deviations(
    A: SparseMatrix,
    inputs: InputStructure,
    partition: Partition,
    reduced: ReducedSystem,
    controls: Sequence[ControlSignal],
    x0: Sequence[float],
) -> np.ndarray:
    """
    max_t ||L x^u(t) - xhat^uhat(t)||_inf for every u in `controls`, with
    xhat(0) = L x0 and uhat = project_control(u). Both systems are stepped side
    by side, so nothing but the running maximum is kept.
    """
    if partition.n_nodes != A.n_rows or reduced.N != A.n_rows:
        raise ValidationError("partition, reduced system and A disagree on N")
    if partition.as_sets() != reduced.blocks.as_sets():
        raise ValidationError("the reduced system was built from another partition")
    # block order of the reduced coordinates
    partition = reduced.blocks
    if not controls:
        return np.zeros(0)

    dt, n_steps = controls[0].dt, controls[0].n_steps
    for u in controls:
        if u.n_steps != n_steps or abs(u.dt - dt) > 1e-12:
            raise GridMismatchError("all controls must share one grid")

    original = LinearSystem.original(A, inputs)
    lumped = LinearSystem.from_reduced(reduced)
    L = build_aggregation(partition, A.n_rows).L

    x0 = np.asarray(x0, dtype=float)
    batch = len(controls)
    x = np.repeat(x0[:, None], batch, axis=1)
    x_hat = np.repeat(project_state(x0, partition)[:, None], batch, axis=1)
    us = np.stack([u.as_float() for u in controls], axis=2)
    us_hat = np.stack(
        [project_control(u, reduced).as_float() for u in controls], axis=2
    )

    forward = Propagator(original, dt)
    forward_hat = Propagator(lumped, dt)
    worst = np.abs(L @ x - x_hat).max(axis=0)
    for s in range(n_steps):
        x = forward.step(x, us[s])
        x_hat = forward_hat.step(x_hat, us_hat[s])
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(x_hat))):
            raise DivergenceError("trajectory diverged", step=s + 1)
        np.maximum(worst, np.abs(L @ x - x_hat).max(axis=0), out=worst)

    logger.debug(
        "verify: N=%d n=%d controls=%d steps=%d max_deviation=%.3g",
        A.n_rows,
        reduced.n,
        batch,
        n_steps,
        float(worst.max()),
    )
    return worst


def verify_trajectory_equivalence(
    A: SparseMatrix,
    inputs: InputStructure,
    partition: Partition,
    reduced: ReducedSystem,
    u: ControlSignal,
    x0: Sequence[float],
    T: Optional[float] = None,
    dt: Optional[float] = None,
) -> float:
    """
    max over the grid of ||L x^u(t) - xhat^uhat(t)||_inf. Zero up to the
    integration error when `partition` is a control equivalence.
    """
    if T is not None and abs(T - u.T) > 1e-9 * max(1.0, T):
        raise GridMismatchError("control ends at T={}, asked for T={}".format(u.T, T))
    if dt is not None and abs(dt - u.dt) > 1e-12:
        raise GridMismatchError("control step is {}, asked for dt={}".format(u.dt, dt))
    return float(trajectory_deviations(A, inputs, partition, reduced, [u], x0)[0])

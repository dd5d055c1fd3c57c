#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
Exact optimal values for a linear final cost and no running cost.

With the RK4 step x+ = P x + Q u the final state is affine in the samples u_s:

    c^T x_S = c^T P^S x0 + sum_s g_s^T u_s,    g_s = Q^T lam_{s+1},

where the adjoint lam_S = c, lam_s = P^T lam_{s+1} is the discrete version of
d/dt lam = -A^T lam integrated backwards from lam(T) = c. The switching values
g_s decide every sample on their own: sup puts u_l at M_l where g_l > 0 and at
m_l otherwise, inf does the opposite. So the bang-bang control is the exact
optimum of the discretized problem, and on a control equivalence the original
and the reduced system produce the same value up to round-off.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ctrleq.exceptions import DivergenceError, ValidationError
from ctrleq.lump import ControlSignal, grid_steps
from ctrleq.sim.integrate import DEFAULT_DT, Propagator, Trajectory, integrate
from ctrleq.sim.system import Model, as_system

logger = logging.getLogger(__name__)

DIRECTIONS = ("sup", "inf")


@dataclass(frozen=True, eq=False)
class OptimalValueResult:
    value: float
    direction: str
    control: ControlSignal
    adjoint: Optional[np.ndarray]
    switching: np.ndarray
    trajectory: Trajectory

    def switching_steps(self) -> np.ndarray:
        """(step, channel) pairs whose switching value changes sign on the next step."""
        signs = np.sign(self.switching)
        return np.argwhere(signs[1:] != signs[:-1])


def optimal_bangbang_value(
    model: Model,
    c: Sequence[float],
    x0: Sequence[float],
    T: float,
    dt: float = DEFAULT_DT,
    direction: str = "sup",
    inputs=None,
    keep_adjoint: bool = True,
) -> OptimalValueResult:
    """
    V^sup or V^inf of c^T x(T) over all controls inside the bounds of `model`.

    Options:
        model: a LinearSystem, a ReducedSystem, or a SparseMatrix together
            with `inputs`.
        c: final cost coefficients, one per state of `model`. On an original
            system the cost has to be constant on the partition, i.e.
            c = L^T chat (see `ctrleq.lump.expand_final_cost`).
        keep_adjoint: store lam on the whole grid in the result.
    """
    if direction not in DIRECTIONS:
        raise ValidationError("direction must be one of {}".format(DIRECTIONS))

    system = as_system(model, inputs)
    c = np.asarray(c, dtype=float)
    if c.shape != (system.n_states,):
        raise ValidationError(
            "{} cost coefficients for {} states".format(c.size, system.n_states)
        )
    n_steps = grid_steps(T, dt)

    propagator = Propagator(system, dt)
    switching = np.empty((n_steps, system.n_controls), dtype=float)
    adjoint = None
    if keep_adjoint:
        adjoint = np.empty((n_steps + 1, system.n_states), dtype=float)

    lam = c.copy()
    if adjoint is not None:
        adjoint[n_steps] = lam
    for s in range(n_steps - 1, -1, -1):
        lam, switching[s] = propagator.adjoint_step(lam)
        if not np.all(np.isfinite(lam)):
            raise DivergenceError("adjoint diverged", step=s)
        if adjoint is not None:
            adjoint[s] = lam

    positive = switching > 0
    if direction == "sup":
        values = np.where(positive, system.hi, system.lo)
    else:
        values = np.where(positive, system.lo, system.hi)
    control = ControlSignal(
        values=values,
        dt=dt,
        T=T,
        bounds_lo=system.lo,
        bounds_hi=system.hi,
        reduced=system.reduced,
    )

    trajectory = integrate(system, control, x0)
    value = float(c @ trajectory.final)
    logger.info(
        "optimal: system=%s direction=%s n=%d K=%d steps=%d value=%.12g",
        system.label,
        direction,
        system.n_states,
        system.n_controls,
        n_steps,
        value,
    )
    return OptimalValueResult(
        value=value,
        direction=direction,
        control=control,
        adjoint=adjoint,
        switching=switching,
        trajectory=trajectory,
    )

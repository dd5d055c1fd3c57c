#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
Classical fixed-step fourth order Runge-Kutta for d/dt x = A x + B u with u
constant on every step.

For linear dynamics one RK4 step with step size h is exactly

    x+ = T4(hA) x + h S(hA) B u,
    T4(z) = 1 + z + z^2/2 + z^3/6 + z^4/24,   S(z) = 1 + z/2 + z^2/6 + z^3/24,

so for up to PROPAGATOR_LIMIT states we precompute P = T4(hA) and
Q = h S(hA) B once and every step becomes two dense products. Larger systems
evaluate the polynomials with Horner's scheme on sparse products.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse

from ctrleq.core.equivalence import build_aggregation
from ctrleq.core.partition import Partition
from ctrleq.exceptions import DivergenceError, GridMismatchError, ValidationError
from ctrleq.lump import ControlSignal, grid_steps
from ctrleq.sim.system import LinearSystem, Model, as_system

logger = logging.getLogger(__name__)

DEFAULT_DT = 1e-3

# above this many states the step is evaluated with sparse Horner products.
PROPAGATOR_LIMIT = 2_000


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    States on the grid 0, dt, .., T (n_steps + 1 rows). `reduced` trajectories
    are in block-sum coordinates, either because they come from a reduced
    system or because they were lumped while integrating.
    """

    dt: float
    T: float
    states: np.ndarray
    reduced: bool = False
    n_steps: int = field(init=False)

    def __post_init__(self) -> None:
        n_steps = grid_steps(self.T, self.dt)
        if self.states.shape[0] != n_steps + 1:
            raise GridMismatchError(
                "expected {} states, got {}".format(n_steps + 1, self.states.shape[0])
            )
        object.__setattr__(self, "n_steps", n_steps)

    @property
    def n_states(self) -> int:
        return self.states.shape[1]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt


class Propagator(object):
    """one RK4 step of a LinearSystem, forwards (`step`) and adjoint (`adjoint_step`)."""

    def __init__(self, system: LinearSystem, dt: float) -> None:
        self.system = system
        self.dt = dt
        self.dense = system.n_states <= PROPAGATOR_LIMIT
        if self.dense:
            self.P, self.Q = self._matrices(system, dt)
        else:
            self.hA = (dt * system.A).tocsr()
            self.hAT = self.hA.T.tocsr()

    @staticmethod
    def _matrices(system: LinearSystem, dt: float) -> Tuple[np.ndarray, np.ndarray]:
        n = system.n_states
        hA = dt * system.A.toarray()
        identity = np.eye(n)
        hA2 = hA @ hA
        hA3 = hA2 @ hA
        hA4 = hA3 @ hA
        P = identity + hA + hA2 / 2.0 + hA3 / 6.0 + hA4 / 24.0
        S = identity + hA / 2.0 + hA2 / 6.0 + hA3 / 24.0
        Q = dt * S[:, list(system.driver_states)]
        return P, Q

    @staticmethod
    def _t4(z: scipy.sparse.csr_array, x: np.ndarray) -> np.ndarray:
        y = x + (z @ x) / 4.0
        y = x + (z @ y) / 3.0
        y = x + (z @ y) / 2.0
        return x + z @ y

    @staticmethod
    def _s(z: scipy.sparse.csr_array, v: np.ndarray) -> np.ndarray:
        y = v + (z @ v) / 4.0
        y = v + (z @ y) / 3.0
        return v + (z @ y) / 2.0

    def step(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """x of shape (n,) or (n, batch), u of shape (K,) or (K, batch)."""
        if self.dense:
            return self.P @ x + self.Q @ u
        return self._t4(self.hA, x) + self.dt * self._s(self.hA, self.system.apply_B(u))

    def adjoint_step(self, lam: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(P^T lam, Q^T lam): the previous adjoint and the step's switching values."""
        if self.dense:
            return self.P.T @ lam, self.Q.T @ lam
        previous = self._t4(self.hAT, lam)
        switching = self.dt * self._s(self.hAT, lam)[list(self.system.driver_states)]
        return previous, switching


def _grid(
    u: ControlSignal, T: Optional[float], dt: Optional[float]
) -> Tuple[float, float]:
    if T is not None and abs(T - u.T) > 1e-9 * max(1.0, T):
        raise GridMismatchError("control ends at T={}, asked for T={}".format(u.T, T))
    if dt is not None and abs(dt - u.dt) > 1e-12 * max(1.0, dt):
        raise GridMismatchError("control step is {}, asked for dt={}".format(u.dt, dt))
    return u.T, u.dt


def _x0_array(x0: Sequence[float], n: int) -> np.ndarray:
    x = np.asarray(x0, dtype=float)
    if x.shape[0] != n:
        raise ValidationError("x0 has {} entries, the system {}".format(x.shape[0], n))
    if not np.all(np.isfinite(x)):
        raise ValidationError("x0 must be finite")
    return x


def integrate(
    model: Model,
    u: ControlSignal,
    x0: Sequence[float],
    T: Optional[float] = None,
    dt: Optional[float] = None,
    inputs=None,
    lump: Optional[Partition] = None,
) -> Trajectory:
    """
    Options:
        model: a LinearSystem, a ReducedSystem, or a SparseMatrix together
            with `inputs`.
        T, dt: default to the grid of `u`, a different grid raises
            GridMismatchError.
        lump: record the block sums of this partition instead of the states.
    """
    return integrate_many(model, [u], x0, T=T, dt=dt, inputs=inputs, lump=lump)[0]


def integrate_many(
    model: Model,
    controls: Sequence[ControlSignal],
    x0: Sequence[float],
    T: Optional[float] = None,
    dt: Optional[float] = None,
    inputs=None,
    lump: Optional[Partition] = None,
) -> List[Trajectory]:
    """
    Integrates every control in `controls` from the same x0 as one batch,
    sharing the propagator. All controls must live on the same grid.
    """
    system = as_system(model, inputs)
    if not controls:
        return []
    T, dt = _grid(controls[0], T, dt)
    for u in controls[1:]:
        _grid(u, T, dt)
    for u in controls:
        if u.n_channels != system.n_controls:
            raise GridMismatchError(
                "control has {} channels, the system {}".format(
                    u.n_channels, system.n_controls
                )
            )

    n_steps = controls[0].n_steps
    batch = len(controls)
    x = np.repeat(_x0_array(x0, system.n_states)[:, None], batch, axis=1)
    # (n_steps, K, batch)
    us = np.stack([u.as_float() for u in controls], axis=2)

    if lump is not None:
        L = build_aggregation(lump, system.n_states).L
        observe = lambda state: L @ state  # noqa: E731
        width = lump.n_blocks
    else:
        observe = lambda state: state  # noqa: E731
        width = system.n_states

    recorded = np.empty((n_steps + 1, width, batch), dtype=float)
    recorded[0] = observe(x)
    propagator = Propagator(system, dt)
    for s in range(n_steps):
        x = propagator.step(x, us[s])
        if not np.all(np.isfinite(x)):
            raise DivergenceError("state diverged", step=s + 1)
        recorded[s + 1] = observe(x)

    logger.debug(
        "integrate: system=%s n=%d K=%d steps=%d batch=%d dense=%s",
        system.label,
        system.n_states,
        system.n_controls,
        n_steps,
        batch,
        propagator.dense,
    )
    reduced = system.reduced or lump is not None
    return [
        Trajectory(dt=dt, T=T, states=recorded[:, :, b].copy(), reduced=reduced)
        for b in range(batch)
    ]

#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
Acceptance suites, shared by `ctrleq verify` and the tests.

    trajectory        L x^u(t) == xhat^uhat(t) on refined partitions
    optimal           V^sup/V^inf of block-constant final costs agree
    coarsest          refinement == exhaustive search for the coarsest partition
    drivers           matching size == brute force, K == max(N - |M|, 1)
    negative          a partition that is no control equivalence is caught
    characterization  tracking costs tell control equivalences apart

Each suite runs at the "quick" scale (seconds, used by the tests) or the
"full" scale (the published acceptance sizes).
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ctrleq.core.equivalence import is_control_equivalence
from ctrleq.core.inputs import InputStructure
from ctrleq.core.partition import Partition
from ctrleq.core.sparse import SparseMatrix
from ctrleq.drivers import has_augmenting_path, maximum_matching, minimum_driver_set
from ctrleq.exceptions import SuiteFailure, ValidationError
from ctrleq.generators import (
    driver_blocks,
    make_rng,
    planted_network,
    planted_partition,
    random_digraph,
    random_piecewise_control,
)
from ctrleq.lump import (
    ReducedSystem,
    build_reduced_system,
    expand_final_cost,
    project_control,
    project_state,
)
from ctrleq.oracles import (
    brute_force_matching_size,
    dense_is_control_equivalence,
    exhaustive_coarsest,
)
from ctrleq.refine import coarsest_control_equivalence, initial_partition
from ctrleq.sim.cost import evaluate_cost, tracking_cost
from ctrleq.sim.integrate import integrate
from ctrleq.sim.optimal import optimal_bangbang_value
from ctrleq.sim.system import LinearSystem
from ctrleq.sim.verify import trajectory_deviations

logger = logging.getLogger(__name__)

QUICK = "quick"
FULL = "full"
SCALES = (QUICK, FULL)

TRAJECTORY_TOL = 1e-6
OPTIMAL_TOL = 1e-6
DISCRIMINATION = 1e-3

# (src, dst, weight): the three node example, 0-based
THREE_NODE_EDGES = ((1, 0, 0.5), (2, 0, 0.5), (0, 1, 0.25), (0, 2, 0.5))
THREE_NODE_DRIVERS = (1, 2)
THREE_NODE_BOUNDS = ((1, 2), (3, 4))


@dataclass
class SuiteResult:
    name: str
    scale: str
    seed: int
    cases: int = 0
    failures: List[str] = field(default_factory=list)
    worst: float = 0.0
    elapsed_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, message: str) -> None:
        logger.error("suite: name=%s %s", self.name, message)
        self.failures.append(message)

    def record(self, value: float) -> None:
        if value > self.worst:
            self.worst = float(value)


def three_node_network() -> SparseMatrix:
    return SparseMatrix.from_edges(3, THREE_NODE_EDGES)


def three_node_inputs() -> InputStructure:
    return InputStructure.with_bounds(THREE_NODE_DRIVERS, THREE_NODE_BOUNDS)


def _planted_instance(rng: np.random.Generator, max_N: int, max_edges: int):
    N = int(rng.integers(2, max_N + 1))
    n_blocks = max(2, N // int(rng.integers(2, 6)))
    A, blocks = planted_network(rng, N, n_blocks, max_edges=max_edges)
    inputs = driver_blocks(rng, blocks, int(rng.integers(1, 3)))
    initial = initial_partition(N, inputs)
    partition = coarsest_control_equivalence(A, initial)
    reduced = build_reduced_system(A, inputs, partition)
    return A, blocks, inputs, reduced


def trajectory_suite(result: SuiteResult, rng: np.random.Generator) -> None:
    full = result.scale == FULL
    cases, max_N, max_edges = (50, 200, 2000) if full else (4, 30, 300)
    n_controls, T, dt = (10, 10.0, 1e-3) if full else (3, 1.0, 1e-2)

    for case in range(cases):
        A, blocks, inputs, reduced = _planted_instance(rng, max_N, max_edges)
        planted = planted_partition(blocks, A.n_rows, inputs)
        if not planted.refines(reduced.blocks):
            result.fail("case {}: finer than the planted partition".format(case))
        controls = [
            random_piecewise_control(rng, inputs.lo_array(), inputs.hi_array(), T, dt)
            for _ in range(n_controls)
        ]
        x0 = rng.uniform(0.0, 1.0, size=A.n_rows)
        deviations = trajectory_deviations(
            A, inputs, reduced.blocks, reduced, controls, x0
        )
        worst = float(deviations.max())
        result.record(worst)
        result.cases += 1
        if worst > TRAJECTORY_TOL:
            result.fail(
                "case {}: N={} n={} deviation {:.3g}".format(
                    case, A.n_rows, reduced.n, worst
                )
            )


def optimal_suite(result: SuiteResult, rng: np.random.Generator) -> None:
    full = result.scale == FULL
    cases, max_N, max_edges = (20, 100, 1000) if full else (3, 20, 200)
    T, dt = (1.0, 1e-3) if full else (0.5, 1e-2)

    for case in range(cases):
        A, _, inputs, reduced = _planted_instance(rng, max_N, max_edges)
        c_hat = rng.uniform(-1.0, 1.0, size=reduced.n)
        c = expand_final_cost(c_hat, reduced.blocks)
        x0 = rng.uniform(0.0, 1.0, size=A.n_rows)
        x0_hat = project_state(x0, reduced.blocks)
        original = LinearSystem.original(A, inputs)
        for direction in ("sup", "inf"):
            value = optimal_bangbang_value(original, c, x0, T, dt, direction).value
            value_hat = optimal_bangbang_value(
                reduced, c_hat, x0_hat, T, dt, direction
            ).value
            gap = abs(value - value_hat)
            result.record(gap)
            if gap > OPTIMAL_TOL:
                result.fail(
                    "case {}: V^{} {:.12g} vs reduced {:.12g}".format(
                        case, direction, value, value_hat
                    )
                )
        result.cases += 1


def coarsest_suite(result: SuiteResult, rng: np.random.Generator) -> None:
    cases, max_N = (200, 8) if result.scale == FULL else (30, 6)

    for case in range(cases):
        N = int(rng.integers(1, max_N + 1))
        n_edges = int(rng.integers(0, N * N // 2 + 2))
        A = random_digraph(rng, N, n_edges, exact=True)
        inputs = minimum_driver_set(A, exact=True)
        initial = initial_partition(N, inputs)
        refined = coarsest_control_equivalence(A, initial)
        expected = exhaustive_coarsest(A, initial)
        result.cases += 1
        if expected is None or refined.as_sets() != expected.as_sets():
            result.fail(
                "case {}: N={} E={} refine {} oracle {}".format(
                    case, N, A.nnz, refined, expected
                )
            )
        elif not dense_is_control_equivalence(A, refined):
            result.fail("case {}: {} fails the dense check".format(case, refined))


def drivers_suite(result: SuiteResult, rng: np.random.Generator) -> None:
    cases, max_N = (200, 7) if result.scale == FULL else (40, 6)

    for case in range(cases):
        N = int(rng.integers(1, max_N + 1))
        A = random_digraph(rng, N, int(rng.integers(0, N * N + 1)))
        matching = maximum_matching(A)
        brute = brute_force_matching_size(A)
        inputs = minimum_driver_set(A, matching=matching)
        result.cases += 1
        if matching.size != brute:
            result.fail(
                "case {}: matching {} vs brute force {}".format(
                    case, matching.size, brute
                )
            )
        if inputs.K != max(N - matching.size, 1):
            result.fail(
                "case {}: K={} for N={} |M|={}".format(case, inputs.K, N, matching.size)
            )
        if not matching.is_subgraph_of(A) or has_augmenting_path(A, matching):
            result.fail("case {}: matching is not a maximum matching of A".format(case))


def _three_node_reduction(partition: Partition) -> ReducedSystem:
    return build_reduced_system(
        three_node_network(), three_node_inputs(), partition, strict=False
    )


def negative_suite(result: SuiteResult, rng: np.random.Generator) -> None:
    A, inputs = three_node_network(), three_node_inputs()
    T, dt = (1.0, 1e-3) if result.scale == FULL else (1.0, 1e-2)
    x0 = np.array([1.0, 0.0, 0.0])
    u = random_piecewise_control(rng, inputs.lo_array(), inputs.hi_array(), T, dt)

    for blocks, should_hold in (([[0, 1], [2]], False), ([[0], [1, 2]], True)):
        partition = Partition.canonical(blocks, n=3, drivers=inputs.driver_nodes)
        holds = bool(is_control_equivalence(A, partition))
        reduced = _three_node_reduction(partition)
        deviation = float(
            trajectory_deviations(A, inputs, partition, reduced, [u], x0)[0]
        )
        result.cases += 1
        if holds != should_hold:
            result.fail("{}: equivalence check said {}".format(partition, holds))
        if should_hold and deviation > TRAJECTORY_TOL:
            result.fail("{}: deviation {:.3g}".format(partition, deviation))
        if not should_hold:
            result.record(deviation)
            if deviation <= DISCRIMINATION:
                result.fail(
                    "{}: deviation {:.3g} does not exceed {}".format(
                        partition, deviation, DISCRIMINATION
                    )
                )


def _tracking_gap(
    A: SparseMatrix,
    inputs: InputStructure,
    reduced: ReducedSystem,
    rng: np.random.Generator,
    T: float,
    dt: float,
) -> float:
    """reduced cost of following the lumped trajectory of a random control."""
    u = random_piecewise_control(rng, inputs.lo_array(), inputs.hi_array(), T, dt)
    x0 = rng.uniform(0.0, 1.0, size=A.n_rows)
    reference = integrate(LinearSystem.original(A, inputs), u, x0)
    cost = tracking_cost(reference, u, reduced)
    u_hat = project_control(u, reduced)
    lumped = integrate(reduced, u_hat, project_state(x0, reduced.blocks))
    return evaluate_cost(lumped, u_hat, cost)


def characterization_suite(result: SuiteResult, rng: np.random.Generator) -> None:
    full = result.scale == FULL
    cases, max_N, max_edges = (10, 50, 500) if full else (3, 15, 100)
    T, dt = (2.0, 1e-3) if full else (1.0, 1e-2)

    for case in range(cases):
        A, _, inputs, reduced = _planted_instance(rng, max_N, max_edges)
        gap = _tracking_gap(A, inputs, reduced, rng, T, dt)
        result.record(gap)
        result.cases += 1
        if gap > TRAJECTORY_TOL:
            result.fail(
                "case {}: tracking cost {:.3g} on an equivalence".format(case, gap)
            )

    partition = Partition.canonical([[0, 1], [2]], n=3, drivers=THREE_NODE_DRIVERS)
    reduced = _three_node_reduction(partition)
    gap = _tracking_gap(three_node_network(), three_node_inputs(), reduced, rng, T, dt)
    result.cases += 1
    if gap <= DISCRIMINATION:
        result.fail("tracking cost {:.3g} does not expose {}".format(gap, partition))


SUITES: Dict[str, Callable[[SuiteResult, np.random.Generator], None]] = {
    "trajectory": trajectory_suite,
    "optimal": optimal_suite,
    "coarsest": coarsest_suite,
    "drivers": drivers_suite,
    "negative": negative_suite,
    "characterization": characterization_suite,
}


def run_suite(name: str, scale: str = QUICK, seed: int = 0) -> SuiteResult:
    if name not in SUITES:
        raise ValidationError(
            "unknown suite {!r}, pick one of {}".format(name, sorted(SUITES))
        )
    if scale not in SCALES:
        raise ValidationError("scale must be one of {}".format(SCALES))

    result = SuiteResult(name=name, scale=scale, seed=seed)
    start = time.perf_counter()
    SUITES[name](result, make_rng(seed))
    result.elapsed_ms = (time.perf_counter() - start) * 1000.0
    logger.info(
        "suite: name=%s scale=%s seed=%d cases=%d failures=%d worst=%.3g ms=%.1f",
        name,
        scale,
        seed,
        result.cases,
        len(result.failures),
        result.worst,
        result.elapsed_ms,
    )
    return result


def run_suites(
    names: Optional[Sequence[str]] = None, scale: str = QUICK, seed: int = 0
) -> List[SuiteResult]:
    """runs the suites in order, raising SuiteFailure when any of them failed."""
    results = [run_suite(name, scale, seed) for name in (names or list(SUITES))]
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise SuiteFailure(
            "failed suites: {}".format(", ".join(failed)), results=results
        )
    return results

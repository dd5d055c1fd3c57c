#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
Seeded random test instances. Every function takes a numpy Generator, so a
suite seeded once reproduces the same networks, partitions and controls.
"""

from typing import List, Optional, Tuple

import numpy as np

from ctrleq.core.inputs import InputStructure
from ctrleq.core.partition import Partition
from ctrleq.core.sparse import SparseMatrix
from ctrleq.lump import ControlSignal

# keeps every planted column sum inside [-DECAY, 1 - DECAY]
DECAY = 0.5


def make_rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_digraph(
    rng: np.random.Generator,
    N: int,
    n_edges: int,
    max_weight: int = 3,
    self_loops: bool = True,
    exact: bool = False,
) -> SparseMatrix:
    """n_edges distinct edges with integer weights in 1..max_weight."""
    slots = N * N if self_loops else N * (N - 1)
    n_edges = min(n_edges, slots)
    picked = rng.choice(slots, size=n_edges, replace=False)
    edges = []
    for slot in picked:
        src, dst = divmod(int(slot), N if self_loops else N - 1)
        if not self_loops and dst >= src:
            dst += 1
        edges.append((src, dst, int(rng.integers(1, max_weight + 1))))
    return SparseMatrix.from_edges(N, edges, exact=exact)


def random_blocks(rng: np.random.Generator, N: int, n_blocks: int) -> List[List[int]]:
    """a random partition of range(N) into exactly n_blocks non empty blocks."""
    n_blocks = max(1, min(n_blocks, N))
    order = rng.permutation(N)
    cuts = np.sort(rng.choice(np.arange(1, N), size=n_blocks - 1, replace=False))
    return [sorted(int(i) for i in part) for part in np.split(order, cuts)]


def planted_network(
    rng: np.random.Generator,
    N: int,
    n_blocks: int,
    density: float = 0.3,
    max_edges: Optional[int] = None,
) -> Tuple[SparseMatrix, List[List[int]]]:
    """
    A network for which the returned blocks form a control equivalence: for
    every pair of blocks (H, B) all nodes of B send the same total weight into
    H, spread over a random non empty subset of H. Every node also gets a self
    loop of -DECAY so that long horizons stay bounded.

    Options:
        density: probability that a block pair is connected at all.
        max_edges: stop planting new block pairs once this many edges exist.
    """
    blocks = random_blocks(rng, N, n_blocks)
    edges: List[Tuple[int, int, float]] = [(i, i, -DECAY) for i in range(N)]
    scale = 1.0 / len(blocks)
    for target in blocks:
        for source in blocks:
            if rng.random() >= density:
                continue
            if max_edges is not None and len(edges) >= max_edges:
                break
            total = scale * rng.uniform(0.2, 1.0)
            for j in source:
                size = int(rng.integers(1, len(target) + 1))
                receivers = rng.choice(target, size=size, replace=False)
                shares = rng.uniform(0.1, 1.0, size=size)
                shares *= total / shares.sum()
                edges.extend(
                    (j, int(i), float(w)) for i, w in zip(receivers, shares)
                )
    return SparseMatrix.from_edges(N, edges), blocks


def driver_blocks(
    rng: np.random.Generator,
    blocks: List[List[int]],
    n_driver_blocks: int = 1,
    bounds: Tuple[float, float] = (0.0, 1.0),
) -> InputStructure:
    """every node of n_driver_blocks random blocks becomes a driver."""
    n_driver_blocks = max(1, min(n_driver_blocks, len(blocks)))
    chosen = rng.choice(len(blocks), size=n_driver_blocks, replace=False)
    drivers = sorted(node for b in chosen for node in blocks[int(b)])
    lo, hi = bounds
    per_driver = []
    for _ in drivers:
        a, b = sorted(rng.uniform(lo, hi, size=2))
        per_driver.append((float(a), float(b)) if b > a else (lo, hi))
    return InputStructure.with_bounds(drivers, per_driver)


def planted_partition(
    blocks: List[List[int]], N: int, inputs: InputStructure
) -> Partition:
    return Partition.canonical(blocks, n=N, drivers=inputs.driver_nodes)


def random_piecewise_control(
    rng: np.random.Generator,
    lo: np.ndarray,
    hi: np.ndarray,
    T: float,
    dt: float,
    n_pieces: int = 5,
    reduced: bool = False,
) -> ControlSignal:
    """n_pieces constant stretches, random switch points, levels uniform in [lo, hi]."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    n_steps = int(round(T / dt))
    n_pieces = max(1, min(n_pieces, n_steps))
    switches = np.sort(
        rng.choice(np.arange(1, n_steps), size=n_pieces - 1, replace=False)
    )
    levels = rng.uniform(lo, hi, size=(n_pieces, lo.size))
    piece = np.searchsorted(switches, np.arange(n_steps), side="right")
    return ControlSignal(
        values=levels[piece], dt=dt, T=T, bounds_lo=lo, bounds_hi=hi, reduced=reduced
    )

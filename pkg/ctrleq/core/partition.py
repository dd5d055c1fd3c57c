#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from ctrleq.exceptions import PartitionValidationError

Block = Tuple[int, ...]


class Partition(object):
    """
    Ordered blocks H_1..H_n of the node indices {0..N-1}.

    Blocks are kept in the order they were given (the aggregation matrix L has
    one row per block, in that order), members inside a block are sorted. A
    partition optionally knows the driver nodes of the system it belongs to;
    in that case the blocks holding at least one driver must come first and
    `n_driver_blocks` is the number k of such blocks.

    Use `Partition.canonical` to get the canonical ordering: driver blocks
    first, then by lowest member index.
    """

    __slots__ = ("_blocks", "_assignment", "_drivers", "_n_driver_blocks")

    def __init__(
        self,
        blocks: Iterable[Iterable[int]],
        n: Optional[int] = None,
        drivers: Iterable[int] = (),
    ) -> None:
        normalized: Tuple[Block, ...] = tuple(tuple(sorted(b)) for b in blocks)
        if n is None:
            n = sum(len(b) for b in normalized)

        assignment: List[int] = [-1] * n
        duplicates = set()
        for index, block in enumerate(normalized):
            if not block:
                raise PartitionValidationError("block {} is empty".format(index))
            for node in block:
                if not 0 <= node < n:
                    raise PartitionValidationError(
                        "node {} is outside 0..{}".format(node, n - 1)
                    )
                if assignment[node] != -1:
                    duplicates.add(node)
                assignment[node] = index

        if duplicates:
            raise PartitionValidationError(
                "nodes appear in more than one block: {}".format(sorted(duplicates)),
                duplicates=sorted(duplicates),
            )
        missing = [node for node, index in enumerate(assignment) if index == -1]
        if missing:
            raise PartitionValidationError(
                "nodes not covered by any block: {}".format(missing[:20]),
                missing=missing,
            )

        driver_set = frozenset(drivers)
        for node in driver_set:
            if not 0 <= node < n:
                raise PartitionValidationError(
                    "driver {} is outside 0..{}".format(node, n - 1)
                )

        n_driver_blocks = len({assignment[d] for d in driver_set})
        for index in {assignment[d] for d in driver_set}:
            if index >= n_driver_blocks:
                raise PartitionValidationError(
                    "driver blocks must come first, block {} holds a driver".format(
                        index
                    )
                )

        self._blocks = normalized
        self._assignment = tuple(assignment)
        self._drivers = driver_set
        self._n_driver_blocks = n_driver_blocks

    @classmethod
    def canonical(
        cls,
        blocks: Iterable[Iterable[int]],
        n: Optional[int] = None,
        drivers: Iterable[int] = (),
    ) -> "Partition":
        driver_set = frozenset(drivers)
        ordered = sorted(
            (tuple(sorted(b)) for b in blocks),
            key=lambda b: (0 if driver_set.intersection(b) else 1, b[0] if b else -1),
        )
        return cls(ordered, n=n, drivers=driver_set)

    @classmethod
    def singletons(cls, n: int, drivers: Iterable[int] = ()) -> "Partition":
        return cls.canonical(([i] for i in range(n)), n=n, drivers=drivers)

    @classmethod
    def whole(cls, n: int, drivers: Iterable[int] = ()) -> "Partition":
        return cls([range(n)] if n else [], n=n, drivers=drivers)

    @classmethod
    def drivers_split(cls, n: int, drivers: Iterable[int]) -> "Partition":
        """two blocks: the driver nodes and everything else (`@drivers-split`)."""
        driver_set = frozenset(drivers)
        rest = [i for i in range(n) if i not in driver_set]
        return cls.canonical(
            [b for b in (sorted(driver_set), rest) if b], n=n, drivers=driver_set
        )

    def __repr__(self) -> str:
        return "<Partition N={} n={} k={} {}>".format(
            self.n_nodes,
            self.n_blocks,
            self._n_driver_blocks,
            [list(b) for b in self._blocks[:8]] + (["..."] if self.n_blocks > 8 else []),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self._blocks == other._blocks and self.n_nodes == other.n_nodes

    def __hash__(self) -> int:
        return hash(self._blocks)

    def __len__(self) -> int:
        return len(self._blocks)

    def __iter__(self) -> Iterator[Block]:
        return iter(self._blocks)

    def __getitem__(self, index: int) -> Block:
        return self._blocks[index]

    @property
    def blocks(self) -> Tuple[Block, ...]:
        return self._blocks

    @property
    def assignment(self) -> Tuple[int, ...]:
        """node -> block index."""
        return self._assignment

    @property
    def n_nodes(self) -> int:
        return len(self._assignment)

    @property
    def n_blocks(self) -> int:
        return len(self._blocks)

    @property
    def drivers(self) -> FrozenSet[int]:
        return self._drivers

    @property
    def n_driver_blocks(self) -> int:
        return self._n_driver_blocks

    def block_of(self, node: int) -> int:
        return self._assignment[node]

    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(b) for b in self._blocks)

    def as_sets(self) -> FrozenSet[FrozenSet[int]]:
        """order-insensitive view, handy for comparisons."""
        return frozenset(frozenset(b) for b in self._blocks)

    def with_drivers(self, drivers: Iterable[int]) -> "Partition":
        return Partition.canonical(self._blocks, n=self.n_nodes, drivers=drivers)

    def refines(self, other: "Partition") -> bool:
        """True if every block of self sits inside a single block of `other`."""
        if other.n_nodes != self.n_nodes:
            return False
        outer = other.assignment
        return all(len({outer[node] for node in block}) == 1 for block in self._blocks)

    def isolate(self, nodes: Iterable[int]) -> "Partition":
        """
        splits every node in `nodes` into its own singleton block, so that it
        stays observable after refinement.
        """
        isolated = set(nodes)
        blocks: List[Sequence[int]] = []
        for block in self._blocks:
            rest = [node for node in block if node not in isolated]
            if rest:
                blocks.append(rest)
            blocks.extend([node] for node in block if node in isolated)
        return Partition.canonical(blocks, n=self.n_nodes, drivers=self._drivers)

    def mixed_blocks(self) -> Tuple[int, ...]:
        """indices of driver blocks that also hold non-driver nodes."""
        return tuple(
            index
            for index in range(self._n_driver_blocks)
            if any(node not in self._drivers for node in self._blocks[index])
        )

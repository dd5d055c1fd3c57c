#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
Partition and driver list files.

A partition file has one block per line, made of whitespace separated node
labels as they appear in the network file. `#` and `%` start comments. The
single directive line `@drivers-split` stands for the two blocks {drivers} and
{everything else}.

A driver file lists driver labels separated by whitespace or commas, in
control order.
"""

from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

from ctrleq.core.partition import Partition
from ctrleq.exceptions import CtrleqIOError, PartitionParseError
from ctrleq.io.network import NetworkFile, PathLike, read_lines
from ctrleq.refine import DRIVERS_SPLIT


def _content_lines(path: Path) -> List[Tuple[int, str]]:
    lines = []
    for lineno, line in read_lines(path, PartitionParseError):
        text = line.split("#", 1)[0].strip()
        if text and not text.startswith("%"):
            lines.append((lineno, text))
    return lines


def _lookup(network: NetworkFile, label: str, path: Path, lineno: int) -> int:
    if not network.has_label(label):
        raise PartitionParseError("unknown node {!r}".format(label), path, lineno)
    return network.index_of(label)


def parse_partition(
    path: PathLike,
    network: NetworkFile,
    drivers: Optional[Iterable[int]] = None,
) -> Partition:
    """
    Options:
        drivers: driver node indices. Needed by `@drivers-split`; when given
            the blocks are put in canonical order (driver blocks first).
    """
    path = Path(path)
    lines = _content_lines(path)
    if len(lines) == 1 and lines[0][1] == DRIVERS_SPLIT:
        if drivers is None:
            raise PartitionParseError(
                "{} needs a driver set".format(DRIVERS_SPLIT), path, lines[0][0]
            )
        return Partition.drivers_split(network.N, drivers)

    blocks: List[List[int]] = []
    for lineno, text in lines:
        if text.startswith("@"):
            raise PartitionParseError(
                "unknown directive {!r}".format(text), path, lineno
            )
        blocks.append([_lookup(network, label, path, lineno) for label in text.split()])

    if drivers is None:
        return Partition(blocks, n=network.N)
    return Partition.canonical(blocks, n=network.N, drivers=drivers)


def parse_drivers(path: PathLike, network: NetworkFile) -> Tuple[int, ...]:
    path = Path(path)
    drivers: List[int] = []
    seen = set()
    for lineno, text in _content_lines(path):
        for label in text.replace(",", " ").split():
            index = _lookup(network, label, path, lineno)
            if index in seen:
                raise PartitionParseError(
                    "driver {!r} listed twice".format(label), path, lineno
                )
            seen.add(index)
            drivers.append(index)
    if not drivers:
        raise PartitionParseError("no driver nodes listed", path)
    return tuple(drivers)


def write_partition(
    partition: Partition, path: PathLike, labels: Optional[Sequence[str]] = None
) -> None:
    """one block per line, in block order, with the original labels."""
    try:
        with open(path, "w", encoding="utf-8") as f:
            for block in partition:
                f.write(
                    " ".join(labels[i] if labels else str(i) for i in block) + "\n"
                )
    except OSError as e:
        raise CtrleqIOError(
            e.errno, "cannot write {}: {}".format(path, e.strerror)
        ) from e

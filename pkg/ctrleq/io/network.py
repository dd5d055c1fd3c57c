#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
Network readers.

Two formats are understood, both made of `src dst [weight]` edge records that
end up as A[dst, src] += weight:

  * KONECT style edge lists (`tsv`): whitespace separated columns, `%` and
    `#` comment lines, arbitrary node labels, extra columns (timestamps)
    ignored, weight 1 when missing.
  * Matrix Market coordinate files (`matrix-market`), 1-based indices, with
    `real`, `integer` or `pattern` fields and `general` or `symmetric`
    symmetry. The header's entry count is enforced.
"""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Type, Union

from ctrleq.core.sparse import SparseMatrix
from ctrleq.exceptions import (
    CtrleqIOError,
    MatrixValidationError,
    NetworkParseError,
    ParseError,
)
from ctrleq.utils import natural_key, x2weight

logger = logging.getLogger(__name__)

MATRIX_MARKET = "matrix-market"
TSV = "tsv"
FORMATS = (MATRIX_MARKET, TSV)

MM_BANNER = "%%MatrixMarket"
MM_EXTENSIONS = (".mtx", ".mm")

PathLike = Union[str, "os.PathLike[str]"]


@dataclass(frozen=True)
class NetworkFile:
    """the parsed matrix plus the index -> original label table."""

    path: Path
    format: str
    matrix: SparseMatrix
    labels: Tuple[str, ...]
    n_records: int
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_index", {label: i for i, label in enumerate(self.labels)}
        )

    @property
    def N(self) -> int:
        return self.matrix.n_rows

    @property
    def name(self) -> str:
        return self.path.stem

    def index_of(self, label: str) -> int:
        return self._index[label]

    def has_label(self, label: str) -> bool:
        return label in self._index

    def remap(self) -> Dict[str, int]:
        return dict(self._index)


def read_lines(
    path: Path, error: Type[ParseError] = NetworkParseError
) -> Iterator[Tuple[int, str]]:
    """(lineno, line) pairs; undecodable bytes raise `error` at their line."""
    try:
        with open(path, "rb") as f:
            for lineno, raw in enumerate(f, 1):
                try:
                    line = raw.decode("utf-8")
                except UnicodeDecodeError as e:
                    raise error(
                        "not valid UTF-8 ({})".format(e.reason), path, lineno
                    ) from e
                yield lineno, line.rstrip("\r\n")
    except OSError as e:
        raise CtrleqIOError(e.errno, "cannot read {}: {}".format(path, e.strerror)) from e


def detect_format(path: PathLike) -> str:
    """by extension first, then by looking for the Matrix Market banner."""
    path = Path(path)
    if path.suffix.lower() in MM_EXTENSIONS:
        return MATRIX_MARKET
    for _, line in read_lines(path):
        if line.strip():
            return MATRIX_MARKET if line.startswith(MM_BANNER) else TSV
    return TSV


def _weight(token: str, exact: bool, path: Path, lineno: int):
    try:
        return x2weight(token, exact)
    except (TypeError, ValueError) as e:
        raise NetworkParseError(
            "weight {!r} is not a finite number".format(token), path, lineno
        ) from e


def _parse_tsv(path: Path, exact: bool):
    records: List[Tuple[str, str, object]] = []
    for lineno, line in read_lines(path):
        stripped = line.strip()
        if not stripped or stripped[0] in "%#":
            continue
        tokens = stripped.split()
        if len(tokens) < 2:
            raise NetworkParseError(
                "expected 'src dst [weight]', got {!r}".format(stripped), path, lineno
            )
        weight = _weight(tokens[2], exact, path, lineno) if len(tokens) > 2 else 1
        records.append((tokens[0], tokens[1], weight))

    labels = sorted(
        {src for src, _, _ in records} | {dst for _, dst, _ in records}, key=natural_key
    )
    index = {label: i for i, label in enumerate(labels)}
    edges = [(index[src], index[dst], w) for src, dst, w in records]
    return labels, edges


def _parse_matrix_market(path: Path, exact: bool):
    lines = read_lines(path)
    try:
        lineno, banner = next(lines)
    except StopIteration:
        raise NetworkParseError("empty file", path, 1)

    parts = banner.split()
    if len(parts) != 5 or parts[0] != MM_BANNER:
        raise NetworkParseError("missing %%MatrixMarket banner", path, lineno)
    _, obj, fmt, value_field, symmetry = (p.lower() for p in parts)
    if obj != "matrix" or fmt != "coordinate":
        raise NetworkParseError(
            "only 'matrix coordinate' files are supported", path, lineno
        )
    if value_field not in ("real", "integer", "pattern"):
        raise NetworkParseError(
            "unsupported field {!r}".format(value_field), path, lineno
        )
    if symmetry not in ("general", "symmetric"):
        raise NetworkParseError(
            "unsupported symmetry {!r}".format(symmetry), path, lineno
        )

    size: Optional[Tuple[int, int, int]] = None
    edges: List[Tuple[int, int, object]] = []
    count = 0
    for lineno, line in lines:
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        tokens = stripped.split()
        if size is None:
            try:
                rows, cols, nnz = (int(t) for t in tokens[:3])
            except ValueError as e:
                raise NetworkParseError(
                    "bad size line {!r}".format(stripped), path, lineno
                ) from e
            if len(tokens) != 3:
                raise NetworkParseError(
                    "bad size line {!r}".format(stripped), path, lineno
                )
            if rows != cols:
                raise NetworkParseError(
                    "adjacency matrices are square, got {}x{}".format(rows, cols),
                    path,
                    lineno,
                )
            size = (rows, cols, nnz)
            continue

        count += 1
        if count > size[2]:
            raise NetworkParseError(
                "more entries than the {} announced".format(size[2]), path, lineno
            )
        need = 2 if value_field == "pattern" else 3
        if len(tokens) < need:
            raise NetworkParseError(
                "expected {} columns, got {!r}".format(need, stripped), path, lineno
            )
        try:
            src, dst = int(tokens[0]) - 1, int(tokens[1]) - 1
        except ValueError as e:
            raise NetworkParseError(
                "bad indices in {!r}".format(stripped), path, lineno
            ) from e
        if not (0 <= src < size[0] and 0 <= dst < size[0]):
            raise NetworkParseError(
                "index outside 1..{}".format(size[0]), path, lineno
            )
        if value_field == "pattern":
            weight = 1
        else:
            weight = _weight(tokens[2], exact, path, lineno)
        edges.append((src, dst, weight))
        if symmetry == "symmetric" and src != dst:
            edges.append((dst, src, weight))

    if size is None:
        raise NetworkParseError("missing size line", path, None)
    if count != size[2]:
        raise NetworkParseError(
            "header announces {} entries, found {}".format(size[2], count), path, None
        )
    labels = [str(i + 1) for i in range(size[0])]
    return labels, edges


def parse_network(
    path: PathLike,
    format: Optional[str] = None,
    exact: bool = False,
    symmetrize: bool = False,
) -> NetworkFile:
    """
    Reads a network into A[dst, src] = weight, summing duplicate records.

    Options:
        format: "matrix-market" or "tsv", detected when None.
        exact: weights become Fractions.
        symmetrize: add the reverse of every edge (A + A^T, diagonal once),
            for undirected inputs.
    """
    path = Path(path)
    if format is None:
        format = detect_format(path)
    if format not in FORMATS:
        raise NetworkParseError("unknown format {!r}".format(format), path)

    if format == MATRIX_MARKET:
        labels, edges = _parse_matrix_market(path, exact)
    else:
        labels, edges = _parse_tsv(path, exact)
    if not labels:
        raise NetworkParseError("empty graph", path)

    try:
        matrix = SparseMatrix.from_edges(len(labels), edges, exact=exact)
    except MatrixValidationError as e:
        raise NetworkParseError(str(e), path) from e
    if symmetrize:
        matrix = matrix.symmetrized()

    logger.info(
        "parse: path=%s format=%s N=%d records=%d E=%d",
        path,
        format,
        matrix.n_rows,
        len(edges),
        matrix.nnz,
    )
    return NetworkFile(
        path=path,
        format=format,
        matrix=matrix,
        labels=tuple(labels),
        n_records=len(edges),
    )

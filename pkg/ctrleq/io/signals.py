#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
CSV files for control signals (`t,u1..uK`) and trajectories (`t,x1..xN`),
one row per grid point. The last row of a control signal repeats the final
sample, it has no step of its own.
"""

import csv
from pathlib import Path
from typing import List, Optional, Sequence, TextIO, Union

import numpy as np

from ctrleq.exceptions import (
    CtrleqIOError,
    GridMismatchError,
    ParseError,
    ValidationError,
)
from ctrleq.io.network import PathLike
from ctrleq.lump import ControlSignal
from ctrleq.sim.integrate import Trajectory
from ctrleq.utils import format_weight, parse_numbers, x2weight

GRID_SLACK = 1e-9


def _open(path: PathLike, mode: str):
    try:
        return open(path, mode, encoding="utf-8", newline="")
    except OSError as e:
        raise CtrleqIOError(e.errno, "cannot open {}: {}".format(path, e.strerror)) from e


def _write_rows(
    path: Union[PathLike, TextIO], header: List[str], times: np.ndarray, rows
) -> None:
    if hasattr(path, "write"):
        _dump_rows(path, header, times, rows)  # type: ignore
        return
    with _open(path, "w") as f:  # type: ignore
        _dump_rows(f, header, times, rows)


def _dump_rows(f: TextIO, header: List[str], times: np.ndarray, rows) -> None:
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(header)
    for t, row in zip(times, rows):
        writer.writerow([repr(float(t))] + [format_weight(v) for v in row])


def write_control_signal(u: ControlSignal, path: Union[PathLike, TextIO]) -> None:
    header = ["t"] + ["u{}".format(l + 1) for l in range(u.n_channels)]
    _write_rows(path, header, u.times(), u.at_grid())


def write_trajectory(trajectory: Trajectory, path: Union[PathLike, TextIO]) -> None:
    header = ["t"] + ["x{}".format(i + 1) for i in range(trajectory.n_states)]
    _write_rows(path, header, trajectory.times(), trajectory.states)


def read_control_signal(
    path: PathLike,
    bounds_lo: Optional[Sequence] = None,
    bounds_hi: Optional[Sequence] = None,
    exact: bool = False,
    reduced: bool = False,
) -> ControlSignal:
    """
    Options:
        bounds_lo, bounds_hi: channel bounds; unbounded when omitted.
        exact: samples become Fractions.
    """
    with _open(path, "r") as f:
        try:
            rows = [row for row in csv.reader(f) if row and not row[0].startswith("#")]
        except UnicodeDecodeError as e:
            raise ParseError("not valid UTF-8 ({})".format(e.reason), path) from e
    if len(rows) < 3:
        raise ParseError("a control signal needs a header and two grid points", path)

    header, body = rows[0], rows[1:]
    width = len(header)
    if header[0].strip() != "t" or width < 2:
        raise ParseError("header must be t,u1..uK", path, 1)
    times: List[float] = []
    samples = []
    for lineno, row in enumerate(body, 2):
        if len(row) != width:
            raise ParseError(
                "expected {} columns, got {}".format(width, len(row)), path, lineno
            )
        try:
            times.append(float(row[0]))
            samples.append([x2weight(v, exact) for v in row[1:]])
        except ValueError as e:
            raise ParseError(str(e), path, lineno) from e

    dt = times[1] - times[0]
    if abs(times[0]) > GRID_SLACK or dt <= 0:
        raise GridMismatchError("grid must start at 0 and increase")
    for s, t in enumerate(times):
        if abs(t - s * dt) > GRID_SLACK * max(1.0, abs(t)):
            raise GridMismatchError(
                "{}: grid point {} is {}, expected {}".format(path, s, t, s * dt)
            )

    K = width - 1
    lo = np.full(K, -np.inf) if bounds_lo is None else np.asarray(bounds_lo)
    hi = np.full(K, np.inf) if bounds_hi is None else np.asarray(bounds_hi)
    values = np.asarray(samples[:-1], dtype=object if exact else float)
    return ControlSignal(
        values=values, dt=dt, T=times[-1], bounds_lo=lo, bounds_hi=hi, reduced=reduced
    )


def read_vector(
    path: PathLike, n: Optional[int] = None, exact: bool = False
) -> np.ndarray:
    """numbers separated by commas or whitespace (an x0 or a cost vector)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ParseError("not valid UTF-8 ({})".format(e.reason), path) from e
    except OSError as e:
        raise CtrleqIOError(e.errno, "cannot read {}: {}".format(path, e.strerror)) from e
    try:
        values = [x2weight(token, exact) for token in parse_numbers(text)]
    except ValueError as e:
        raise ParseError(str(e), path) from e
    if n is not None and len(values) != n:
        raise ValidationError(
            "{}: expected {} values, got {}".format(path, n, len(values))
        )
    return np.asarray(values, dtype=object if exact else float)

#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
ReducedSystem as JSON.

    {
      "n": 2, "k": 1, "N": 3, "K": 2, "exact": true,
      "A_hat": [[0, 0.75], [0.5, 0]],
      "B_hat_driver_blocks": [0],
      "m_hat": [4], "M_hat": [6],
      "blocks": [["2", "3"], ["1"]],
      "control_groups": [["2", "3"]],
      "drivers": [{"node": "2", "lo": 1, "hi": 2}, {"node": "3", "lo": 3, "hi": 4}],
      "labels": ["1", "2", "3"]
    }

Node ids are the original labels. `A_hat` is dense and row-major, unless the
system was built with a sparse Ahat, then it is
`{"shape": [n, n], "entries": [[row, col, weight], ...]}`. Weights keep their
shortest round-tripping repr, fractions that are no float become "p/q". Keys
are sorted so the output is byte-stable.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ctrleq.core.inputs import InputStructure
from ctrleq.core.partition import Partition
from ctrleq.core.sparse import SparseMatrix
from ctrleq.exceptions import CtrleqIOError, ParseError
from ctrleq.io.network import PathLike
from ctrleq.lump import ReducedSystem
from ctrleq.utils import json2weight, weight2json


def reduced_system_to_dict(
    reduced: ReducedSystem, labels: Optional[Sequence[str]] = None
) -> Dict[str, Any]:
    if labels is None:
        labels = [str(i) for i in range(reduced.N)]
    inputs = reduced.inputs

    if isinstance(reduced.A_hat, SparseMatrix):
        A_hat: Any = {
            "shape": list(reduced.A_hat.shape),
            "entries": [
                [row, col, weight2json(w)] for row, col, w in reduced.A_hat.entries()
            ],
        }
    else:
        A_hat = [[weight2json(w) for w in row] for row in reduced.A_hat]

    return {
        "n": reduced.n,
        "k": reduced.k,
        "N": reduced.N,
        "K": reduced.K,
        "exact": reduced.exact,
        "A_hat": A_hat,
        "B_hat_driver_blocks": list(range(reduced.k)),
        "m_hat": [weight2json(v) for v in reduced.m_hat],
        "M_hat": [weight2json(v) for v in reduced.M_hat],
        "blocks": [[labels[i] for i in block] for block in reduced.blocks],
        "control_groups": [
            [labels[inputs.driver_nodes[l]] for l in group]
            for group in reduced.control_groups
        ],
        "drivers": [
            {"node": labels[node], "lo": weight2json(lo), "hi": weight2json(hi)}
            for node, lo, hi in zip(
                inputs.driver_nodes, inputs.bounds_lo, inputs.bounds_hi
            )
        ],
        "labels": list(labels),
    }


def dumps_reduced_system(
    reduced: ReducedSystem, labels: Optional[Sequence[str]] = None
) -> str:
    return json.dumps(
        reduced_system_to_dict(reduced, labels), indent=2, sort_keys=True
    ) + "\n"


def write_reduced_system(
    reduced: ReducedSystem, path: PathLike, labels: Optional[Sequence[str]] = None
) -> None:
    text = dumps_reduced_system(reduced, labels)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise CtrleqIOError(
            e.errno, "cannot write {}: {}".format(path, e.strerror)
        ) from e


def reduced_system_from_dict(data: Dict[str, Any], path=None) -> ReducedSystem:
    try:
        exact = bool(data["exact"])
        labels: List[str] = [str(label) for label in data["labels"]]
        index = {label: i for i, label in enumerate(labels)}

        def weight(value: Any):
            return json2weight(value, exact)

        blocks = [[index[str(label)] for label in block] for block in data["blocks"]]
        drivers = data["drivers"]
        inputs = InputStructure(
            tuple(index[str(d["node"])] for d in drivers),
            tuple(weight(d["lo"]) for d in drivers),
            tuple(weight(d["hi"]) for d in drivers),
        )
        partition = Partition(blocks, n=len(labels), drivers=inputs.driver_nodes)
        n = partition.n_blocks
        if n != data["n"] or partition.n_driver_blocks != data["k"]:
            raise ParseError("n/k do not match the blocks", path)

        raw = data["A_hat"]
        if isinstance(raw, dict):
            A_hat: Any = SparseMatrix(
                n, n, ((r, c, weight(w)) for r, c, w in raw["entries"]), exact=exact
            )
        else:
            A_hat = np.asarray(
                [[weight(w) for w in row] for row in raw],
                dtype=object if exact else float,
            ).reshape(n, n)

        control_groups = tuple(
            tuple(sorted(inputs.control_of(index[str(label)]) for label in group))
            for group in data["control_groups"]
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError("malformed reduced system: {}".format(e), path) from e

    return ReducedSystem(
        A_hat=A_hat,
        k=partition.n_driver_blocks,
        m_hat=tuple(weight(v) for v in data["m_hat"]),
        M_hat=tuple(weight(v) for v in data["M_hat"]),
        blocks=partition,
        control_groups=control_groups,
        inputs=inputs,
        exact=exact,
    )


def read_reduced_system(path: PathLike) -> ReducedSystem:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ParseError("not valid UTF-8 ({})".format(e.reason), path) from e
    except OSError as e:
        raise CtrleqIOError(e.errno, "cannot read {}: {}".format(path, e.strerror)) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path, e.lineno) from e
    return reduced_system_from_dict(data, path)

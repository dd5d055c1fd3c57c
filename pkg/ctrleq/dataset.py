#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

import logging
import time
from pathlib import Path
from typing import Dict, Optional, Tuple

from ctrleq.core.inputs import DEFAULT_BOUNDS, InputStructure
from ctrleq.core.sparse import SparseMatrix
from ctrleq.drivers import minimum_driver_set
from ctrleq.io.network import NetworkFile, PathLike, parse_network
from ctrleq.io.partition import parse_drivers
from ctrleq.io.report import ManifestEntry
from ctrleq.utils import Weight, unwrap

logger = logging.getLogger(__name__)


def elapsed_ms(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


class Dataset(object):
    """
    A network together with its driver nodes and bounds, loaded on first use:

        with Dataset("seagrass.tsv") as ds:
            ds.A, ds.inputs

    Options:
        format: network format, detected when None.
        drivers_path: file listing the driver nodes. Without it the drivers
            come from a maximum matching.
        bounds: (lo, hi) for every driver, [0, 1] by default.
        exact: parse weights as Fractions.
        symmetrize: treat the edge list as undirected.
    """

    def __init__(
        self,
        path: PathLike,
        format: Optional[str] = None,
        drivers_path: Optional[PathLike] = None,
        bounds: Optional[Tuple[Weight, Weight]] = None,
        name: Optional[str] = None,
        exact: bool = False,
        symmetrize: bool = False,
        _autoload: bool = False,
    ) -> None:
        self.path = Path(path)
        self.format = format
        self.drivers_path = Path(drivers_path) if drivers_path else None
        self.bounds = bounds or DEFAULT_BOUNDS
        self.name = name or self.path.stem
        self.exact = exact
        self.symmetrize = symmetrize

        self.timings: Dict[str, float] = {}
        self._network: Optional[NetworkFile] = None
        self._inputs: Optional[InputStructure] = None
        self._loaded = False

        if _autoload:
            self.load()

    @classmethod
    def from_entry(cls, entry: ManifestEntry, **kwargs) -> "Dataset":
        return cls(
            entry.path,
            format=entry.format,
            drivers_path=entry.drivers_path,
            bounds=entry.bounds,
            name=entry.name,
            **kwargs,
        )

    def __repr__(self) -> str:
        return "<Dataset {} ({})>".format(
            self.name, "loaded" if self._loaded else "not loaded"
        )

    def __enter__(self) -> "Dataset":
        self.load()
        return self

    def __exit__(self, exception_type, exception_value, traceback):
        pass

    def load(self, force: bool = False) -> None:
        if self._loaded and not force:
            return

        start = time.perf_counter()
        network = parse_network(
            self.path, self.format, exact=self.exact, symmetrize=self.symmetrize
        )
        self.timings["parse_ms"] = elapsed_ms(start)

        start = time.perf_counter()
        lo, hi = self.bounds
        if self.drivers_path is not None:
            inputs = InputStructure.uniform(
                parse_drivers(self.drivers_path, network), lo, hi, exact=self.exact
            )
        else:
            inputs = minimum_driver_set(network.matrix, lo, hi, exact=self.exact)
        self.timings["drivers_ms"] = elapsed_ms(start)

        self._network, self._inputs = network, inputs
        self._loaded = True
        logger.debug(
            "dataset: name=%s N=%d K=%d parse_ms=%.3f drivers_ms=%.3f",
            self.name,
            network.N,
            inputs.K,
            self.timings["parse_ms"],
            self.timings["drivers_ms"],
        )

    @property
    def network(self) -> NetworkFile:
        self.load()
        return unwrap(self._network)

    @property
    def A(self) -> SparseMatrix:
        return self.network.matrix

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.network.labels

    @property
    def inputs(self) -> InputStructure:
        self.load()
        return unwrap(self._inputs)

    @property
    def N(self) -> int:
        return self.network.N

    @property
    def K(self) -> int:
        return self.inputs.K

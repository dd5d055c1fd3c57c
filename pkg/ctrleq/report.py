#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
Reduction reports: for every network of a manifest (or dataset directory),
drivers -> `@drivers-split` -> coarsest control equivalence -> lumping, one
CSV row with N, n, K, k and the ratios between them.

Rows are computed in a process pool and written in manifest order. A network
that fails to parse or reduce gets a failed row, the others are unaffected.
"""

import functools
import logging
import time
from typing import List, Optional

from ctrleq import reference
from ctrleq.dataset import Dataset, elapsed_ms
from ctrleq.exceptions import CtrleqError
from ctrleq.futures import map_ordered, peak_rss_mb
from ctrleq.io.network import PathLike
from ctrleq.io.report import ManifestEntry, ReportRow, discover
from ctrleq.lump import build_reduced_system
from ctrleq.refine import initial_partition, refine_with_stats
from ctrleq.utils import Weight

logger = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_FAILED = "failed"


def reduce_dataset(dataset: Dataset, tol: Optional[Weight] = None) -> ReportRow:
    """runs the pipeline on an already configured dataset, errors propagate."""
    dataset.load()
    timings = dict(dataset.timings)

    start = time.perf_counter()
    initial = initial_partition(dataset.N, dataset.inputs)
    partition, stats = refine_with_stats(dataset.A, initial, tol=tol)
    timings["refine_ms"] = elapsed_ms(start)

    start = time.perf_counter()
    reduced = build_reduced_system(dataset.A, dataset.inputs, partition, tol=tol)
    timings["lump_ms"] = elapsed_ms(start)

    row = ReportRow(
        name=dataset.name,
        N=reduced.N,
        n=reduced.n,
        K=reduced.K,
        k=reduced.k,
        timings=timings,
        rss_mb=peak_rss_mb(),
    )
    logger.info(
        "report: name=%s N=%d n=%d K=%d k=%d splitters=%d refine_ms=%.3f",
        row.name,
        row.N,
        row.n,
        row.K,
        row.k,
        stats.splitters,
        timings["refine_ms"],
    )
    reference.check_row(row.name, reduced.N, reduced.n, reduced.K, reduced.k)
    return row


def build_report_row(
    entry: ManifestEntry,
    exact: bool = False,
    symmetrize: bool = False,
    tol: Optional[Weight] = None,
) -> ReportRow:
    """
    Never raises for a bad network: the error ends up in the row instead.

    Options:
        exact: Fraction arithmetic all the way through.
        symmetrize: read every network as undirected.
        tol: refinement tolerance, see `ctrleq.refine.refine_with_stats`.
    """
    dataset = Dataset.from_entry(entry, exact=exact, symmetrize=symmetrize)
    try:
        return reduce_dataset(dataset, tol=tol)
    except CtrleqError as e:
        logger.error("report: name=%s failed: %s", entry.name, e)
        error = str(e)
    except Exception as e:
        logger.exception("report: name=%s crashed", entry.name)
        error = "{}: {}".format(type(e).__name__, e)
    return ReportRow(
        name=entry.name,
        status=STATUS_FAILED,
        error=error,
        timings=dict(dataset.timings),
    )


def run_report(
    source: PathLike,
    max_workers: Optional[int] = None,
    exact: bool = False,
    symmetrize: bool = False,
    tol: Optional[Weight] = None,
) -> List[ReportRow]:
    entries = discover(source)
    if not entries:
        logger.warning("report: no networks found in %s", source)
    job = functools.partial(
        build_report_row, exact=exact, symmetrize=symmetrize, tol=tol
    )
    rows = map_ordered(job, entries, max_workers=max_workers)
    failed = sum(1 for row in rows if row.failed)
    logger.info("report: networks=%d failed=%d", len(rows), failed)
    return rows

#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
Reduction reports and the manifests that drive them.

A manifest is a CSV file `name,path,format[,drivers_path][,bounds]`, with an
optional header row. Relative paths are resolved against the manifest's
directory, an empty format means auto-detection, and bounds are written
`lo;hi` (or a quoted `"lo,hi"`).
"""

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, TextIO, Tuple, Union

from ctrleq.exceptions import CtrleqIOError, ManifestParseError
from ctrleq.io.network import FORMATS, MM_EXTENSIONS, PathLike
from ctrleq.utils import percent, str2bounds

REPORT_COLUMNS = ("name", "N", "n", "n_over_N", "K", "k", "k_over_K", "K_over_N")
TIMING_COLUMNS = ("status", "parse_ms", "drivers_ms", "refine_ms", "lump_ms", "rss_mb")
NETWORK_SUFFIXES = MM_EXTENSIONS + (".tsv", ".txt", ".edges", ".el")
MANIFEST_NAME = "manifest.csv"


@dataclass(frozen=True)
class ReportRow:
    """one reduced network. Failed rows only know their name and the error."""

    name: str
    N: Optional[int] = None
    n: Optional[int] = None
    K: Optional[int] = None
    k: Optional[int] = None
    status: str = "ok"
    error: Optional[str] = None
    timings: Dict[str, float] = field(default_factory=dict)
    rss_mb: Optional[float] = None

    @property
    def failed(self) -> bool:
        return self.status != "ok"

    @property
    def rho(self) -> Optional[float]:
        return None if self.failed or not self.N else self.n / self.N

    @property
    def rho_D(self) -> Optional[float]:
        return None if self.failed or not self.K else self.k / self.K

    @property
    def density(self) -> Optional[float]:
        return None if self.failed or not self.N else self.K / self.N

    def counts(self) -> Tuple[Optional[int], ...]:
        return (self.N, self.n, self.K, self.k)

    def as_csv(self, timings: bool = False) -> List[str]:
        if self.failed:
            row = [self.name] + [""] * (len(REPORT_COLUMNS) - 1)
        else:
            row = [
                self.name,
                str(self.N),
                str(self.n),
                percent(self.n, self.N),
                str(self.K),
                str(self.k),
                percent(self.k, self.K),
                percent(self.K, self.N),
            ]
        if timings:
            row.append(self.status)
            for stage in TIMING_COLUMNS[1:-1]:
                value = self.timings.get(stage)
                row.append("" if value is None else "{:.3f}".format(value))
            row.append("" if self.rss_mb is None else "{:.1f}".format(self.rss_mb))
        return row


def format_report(rows: Iterable[ReportRow], timings: bool = False) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS + (TIMING_COLUMNS if timings else ()))
    for row in rows:
        writer.writerow(row.as_csv(timings))
    return buffer.getvalue()


def write_report(
    rows: Iterable[ReportRow], path: Union[PathLike, TextIO], timings: bool = False
) -> None:
    """
    Options:
        timings: add the status, per-stage milliseconds and peak memory
            columns. Without it the CSV has exactly the reduction columns.
    """
    text = format_report(rows, timings)
    if hasattr(path, "write"):
        path.write(text)  # type: ignore
        return
    try:
        Path(path).write_text(text, encoding="utf-8")  # type: ignore
    except OSError as e:
        raise CtrleqIOError(
            e.errno, "cannot write {}: {}".format(path, e.strerror)
        ) from e


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    path: Path
    format: Optional[str] = None
    drivers_path: Optional[Path] = None
    bounds: Optional[Tuple[float, float]] = None


def read_manifest(path: PathLike) -> List[ManifestEntry]:
    path = Path(path)
    base = path.parent
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
    except UnicodeDecodeError as e:
        raise ManifestParseError("not valid UTF-8 ({})".format(e.reason), path) from e
    except OSError as e:
        raise CtrleqIOError(e.errno, "cannot read {}: {}".format(path, e.strerror)) from e

    entries: List[ManifestEntry] = []
    names = set()
    for lineno, row in enumerate(rows, 1):
        row = [cell.strip() for cell in row]
        if not row or not row[0] or row[0].startswith("#"):
            continue
        if lineno == 1 and row[0] == "name":
            continue
        if len(row) < 2 or len(row) > 5:
            raise ManifestParseError(
                "expected name,path,format[,drivers_path][,bounds]", path, lineno
            )
        name, network = row[0], row[1]
        fmt = row[2] if len(row) > 2 and row[2] else None
        if fmt is not None and fmt not in FORMATS:
            raise ManifestParseError("unknown format {!r}".format(fmt), path, lineno)
        drivers = row[3] if len(row) > 3 and row[3] else None
        bounds = None
        if len(row) > 4 and row[4]:
            try:
                bounds = str2bounds(row[4])
            except ValueError as e:
                raise ManifestParseError(str(e), path, lineno) from e
        if name in names:
            raise ManifestParseError("duplicate name {!r}".format(name), path, lineno)
        names.add(name)
        entries.append(
            ManifestEntry(
                name=name,
                path=base / network,
                format=fmt,
                drivers_path=base / drivers if drivers else None,
                bounds=bounds,
            )
        )
    return entries


def discover(source: PathLike) -> List[ManifestEntry]:
    """a manifest file, a directory holding `manifest.csv`, or a directory of networks."""
    source = Path(source)
    if source.is_dir():
        manifest = source / MANIFEST_NAME
        if manifest.exists():
            return read_manifest(manifest)
        return [
            ManifestEntry(name=p.stem, path=p)
            for p in sorted(source.iterdir())
            if p.is_file() and p.suffix.lower() in NETWORK_SUFFIXES
        ]
    if not source.exists():
        raise CtrleqIOError(2, "no such manifest or directory: {}".format(source))
    return read_manifest(source)

#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

from .network import NetworkFile, detect_format, parse_network
from .partition import parse_drivers, parse_partition, write_partition
from .reduced import read_reduced_system, write_reduced_system
from .report import ManifestEntry, ReportRow, read_manifest, write_report
from .signals import (
    read_control_signal,
    read_vector,
    write_control_signal,
    write_trajectory,
)

__all__ = [
    "ManifestEntry",
    "NetworkFile",
    "ReportRow",
    "detect_format",
    "parse_drivers",
    "parse_network",
    "parse_partition",
    "read_control_signal",
    "read_manifest",
    "read_reduced_system",
    "read_vector",
    "write_control_signal",
    "write_partition",
    "write_reduced_system",
    "write_report",
    "write_trajectory",
]

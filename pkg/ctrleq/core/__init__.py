#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

from .equivalence import (
    AggregationPair,
    EquivalenceCheck,
    Witness,
    build_aggregation,
    column_block_sum,
    is_control_equivalence,
)
from .inputs import InputStructure
from .partition import Partition
from .sparse import SparseMatrix

__all__ = [
    "AggregationPair",
    "EquivalenceCheck",
    "InputStructure",
    "Partition",
    "SparseMatrix",
    "Witness",
    "build_aggregation",
    "column_block_sum",
    "is_control_equivalence",
]

#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

from .cost import CostSpec, evaluate_cost, tracking_cost
from .integrate import DEFAULT_DT, Trajectory, integrate, integrate_many
from .optimal import OptimalValueResult, optimal_bangbang_value
from .system import LinearSystem
from .verify import trajectory_deviations, verify_trajectory_equivalence

__all__ = [
    "CostSpec",
    "DEFAULT_DT",
    "LinearSystem",
    "OptimalValueResult",
    "Trajectory",
    "evaluate_cost",
    "integrate",
    "integrate_many",
    "optimal_bangbang_value",
    "tracking_cost",
    "trajectory_deviations",
    "verify_trajectory_equivalence",
]

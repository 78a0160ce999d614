# Copyright 2026 The paylane Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Lane-change bargaining on a two-lane cellular automaton."""

from paylane._core import (
    BimatrixGame,
    ConfigError,
    JointAction,
    NtuOutcome,
    SimConfig,
    Simulation,
    SpeedScenario,
    TuOutcome,
    ZeroSumSolution,
    __version__,
    build_utility_matrix,
    parse_config,
    run_point,
    solve_ntu,
    solve_tu,
    solve_zero_sum_2x2,
    time_difference,
)

__all__ = [
    "BimatrixGame",
    "ConfigError",
    "JointAction",
    "NtuOutcome",
    "SimConfig",
    "Simulation",
    "SpeedScenario",
    "TuOutcome",
    "ZeroSumSolution",
    "build_utility_matrix",
    "parse_config",
    "run_point",
    "solve_ntu",
    "solve_tu",
    "solve_zero_sum_2x2",
    "time_difference",
]

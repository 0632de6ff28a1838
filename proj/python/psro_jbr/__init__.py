# Copyright 2026 The psro-jbr Authors
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

"""PSRO with independent, joint and safe joint best-response oracles."""

from ._core import (
    Game,
    __version__,
    build_game,
    exact_best_response,
    expected_payoff,
    matrix_game,
    nashconv,
    prd_matrix,
    run_psro,
    theory_check,
)

__all__ = [
    "Game",
    "__version__",
    "build_game",
    "exact_best_response",
    "expected_payoff",
    "matrix_game",
    "nashconv",
    "prd_matrix",
    "run_psro",
    "theory_check",
]

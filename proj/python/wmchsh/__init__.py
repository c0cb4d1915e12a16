# Copyright 2026 The wmchsh Authors

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Weak-measurement CHSH toolkit: analytic tables, simulation and analysis."""

import json

from ._core import (
    BobSetting,
    ChshOutcome,
    CountRecord,
    DensityMatrix,
    Error,
    IoError,
    NumericError,
    PointerConfig,
    ScanConfig,
    SourceConfig,
    ValidationError,
    WeakBasis,
    __version__,
    analytic_outcome,
    analyze_json,
    compensated_pair,
    concurrence,
    fidelity_singlet,
    run_cli,
    simulate,
    singlet,
    tangle,
    theta_for_tangle,
    transient_outcome,
    transients,
    weak_joint_one_sided,
    weak_joint_table,
    werner,
    werner_visibility_for_tangle,
)


def analyze(records, weighted=False):
    """Analysis of count records as a dict (same layout as the CLI's JSON)."""
    return json.loads(analyze_json(records, weighted))


__all__ = [
    "BobSetting",
    "ChshOutcome",
    "CountRecord",
    "DensityMatrix",
    "Error",
    "IoError",
    "NumericError",
    "PointerConfig",
    "ScanConfig",
    "SourceConfig",
    "ValidationError",
    "WeakBasis",
    "__version__",
    "analytic_outcome",
    "analyze",
    "analyze_json",
    "compensated_pair",
    "concurrence",
    "fidelity_singlet",
    "run_cli",
    "simulate",
    "singlet",
    "tangle",
    "theta_for_tangle",
    "transient_outcome",
    "transients",
    "weak_joint_one_sided",
    "weak_joint_table",
    "werner",
    "werner_visibility_for_tangle",
]

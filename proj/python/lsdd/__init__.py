# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Multi-speaker direction-of-arrival estimation for moving microphone arrays."""

from ._lsdd import (
    FormatError,
    IoError,
    LsddError,
    ParameterError,
    Scene,
    SteeringSet,
    Udm,
    build_udm,
    cluster_interval,
    cosine_similarity,
    direction_grid,
    estimate,
    free_field_steering,
    pipeline_config,
    ring,
    simulate,
)

__all__ = [
    "FormatError",
    "IoError",
    "LsddError",
    "ParameterError",
    "Scene",
    "SteeringSet",
    "Udm",
    "build_udm",
    "cluster_interval",
    "cosine_similarity",
    "direction_grid",
    "estimate",
    "free_field_steering",
    "pipeline_config",
    "ring",
    "simulate",
]

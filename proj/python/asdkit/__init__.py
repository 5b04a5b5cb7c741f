# Copyright (c) 2026 The asdkit Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Anomalous sound detection with pseudo-attribute labels."""

from asdkit._core import (
    AsdkitError,
    adjusted_rand_index,
    aggregate,
    auc,
    aux_parameter_count,
    band_bins,
    cluster_gmm_bic,
    config_hash,
    extract_features,
    featex_label,
    format_mean_std,
    hmean,
    official_score,
    pauc,
    run_experiment,
    scac_loss,
    write_synthetic,
)

__all__ = [
    "AsdkitError",
    "adjusted_rand_index",
    "aggregate",
    "auc",
    "aux_parameter_count",
    "band_bins",
    "cluster_gmm_bic",
    "config_hash",
    "extract_features",
    "featex_label",
    "format_mean_std",
    "hmean",
    "official_score",
    "pauc",
    "run_experiment",
    "scac_loss",
    "write_synthetic",
]

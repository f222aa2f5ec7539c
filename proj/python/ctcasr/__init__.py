# Copyright 2026 The ctcasr Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""CTC speech recognition: features, acoustic models, prefix beam search."""

from ._core import (
    Alphabet,
    DimensionError,
    Error,
    FormatError,
    Model,
    __version__,
    cer,
    compute_features,
    ctc_log_likelihood,
    ctc_loss_and_gradient,
    greedy_decode,
    lr_at_epoch,
    num_parameters,
    prefix_beam_search,
    read_wav,
    wer,
)

__all__ = [
    "Alphabet",
    "DimensionError",
    "Error",
    "FormatError",
    "Model",
    "__version__",
    "cer",
    "compute_features",
    "ctc_log_likelihood",
    "ctc_loss_and_gradient",
    "greedy_decode",
    "lr_at_epoch",
    "num_parameters",
    "prefix_beam_search",
    "read_wav",
    "wer",
]

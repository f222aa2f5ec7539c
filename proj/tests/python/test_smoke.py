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

import itertools
import math

import numpy as np
import pytest

import ctcasr


def _grid(rng, t, k):
    g = np.exp(rng.normal(size=(t, k)))
    return g / g.sum(axis=1, keepdims=True)


def _enumerate(probs, labels):
    t, k = probs.shape
    total = 0.0
    for path in itertools.product(range(k), repeat=t):
        collapsed, prev = [], None
        for s in path:
            if s != prev and s != 0:
                collapsed.append(s)
            prev = s
        if collapsed == labels:
            total += math.prod(probs[i, s] for i, s in enumerate(path))
    return total


def test_version():
    assert ctcasr.__version__


def test_ctc_matches_enumeration():
    rng = np.random.default_rng(0)
    probs = _grid(rng, 5, 3)
    for labels in ([], [1], [1, 2], [2, 2]):
        got = math.exp(ctcasr.ctc_log_likelihood(probs, labels))
        assert got == pytest.approx(_enumerate(probs, labels), abs=1e-12)


def test_gradient_rows_sum_to_zero():
    rng = np.random.default_rng(1)
    log_probs = np.log(_grid(rng, 6, 4))
    nll, grad = ctcasr.ctc_loss_and_gradient(log_probs, [1, 3])
    assert nll > 0
    assert grad.shape == (6, 4)
    assert np.abs(grad.sum(axis=1)).max() < 1e-12


def test_decoding():
    alphabet = ctcasr.Alphabet.default()
    probs = np.full((6, len(alphabet)), 1e-3)
    for t, ch in enumerate("_cc_at"):
        probs[t, alphabet.symbols.index(ch)] = 1.0
    probs /= probs.sum(axis=1, keepdims=True)
    assert ctcasr.greedy_decode(probs) == "cat"
    beam = ctcasr.prefix_beam_search(probs, alpha=0.0, beam_width=8)
    assert beam[0][0] == "cat"
    constrained = ctcasr.prefix_beam_search(probs, lexicon=["dog", "cat"], end_of_utterance=True)
    assert constrained[0][0] == "cat"
    for text, _ in constrained:
        assert all(w in ("dog", "cat") for w in text.split())


def test_features_and_metrics():
    t = np.arange(8000) / 16000.0
    feats = ctcasr.compute_features(np.sin(2 * np.pi * 440 * t), context_radius=1)
    assert feats.shape[1] == 69
    assert np.isfinite(feats).all()
    assert ctcasr.wer("the cat sat", "the cat") == pytest.approx(1 / 3)
    assert ctcasr.cer("abc", "abd") == pytest.approx(1 / 3)


def test_parameter_count_and_schedule():
    assert ctcasr.num_parameters("brdnn") == pytest.approx(20.9e6, abs=0.05e6)
    assert ctcasr.lr_at_epoch(1) == 1e-5 / 1.2
    with pytest.raises(RuntimeError):
        ctcasr.num_parameters("lstm")

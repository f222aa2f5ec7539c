// Copyright 2026 The ctcasr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CTCASR_SYNTHETIC_H_
#define CTCASR_SYNTHETIC_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ctcasr/alphabet.h"
#include "ctcasr/lm.h"
#include "ctcasr/trainer.h"

namespace ctcasr::synthetic {

// A small read-speech stand-in: sentences from a fixed 20-word grammar
// ("the [adj] animal verb prep a object [now]"), each character rendered as
// a few noisy frames around a per-character prototype. Characters come in
// confusable clusters, and some words differ only within a cluster
// (cat/bat, dog/log/fog, hat/mat), so that spelling alone cannot
// disambiguate them but the word history can.
struct TaskConfig {
  std::uint64_t data_seed = 20141208;
  int num_train = 500;
  int num_dev = 100;
  int num_test = 100;
  int feature_dim = 23;
  int context_radius = 1;
  double cluster_spread = 1.0;   // distance scale between cluster centres
  double within_cluster = 0.45;  // distance scale inside a cluster
  double noise = 1.25;           // per-value Gaussian noise
  double coarticulation = 0.3;   // blend of neighbour prototype at edges
};

struct Task {
  TaskConfig config;
  Alphabet alphabet = Alphabet::Default();
  std::vector<std::string> vocabulary;
  std::vector<TrainingExample> train, dev, test;
  std::string bigram_arpa;  // estimated from the training transcripts

  int input_dim() const { return config.feature_dim * (2 * config.context_radius + 1); }
};

const std::vector<std::string>& Vocabulary();

// Draws one sentence from the grammar.
std::string SampleSentence(std::mt19937_64& rng);

// Builds the full task deterministically from config.data_seed.
Task MakeTask(const TaskConfig& config = {});

// Bigram ARPA text from sentences (with <s> and </s>), using absolute
// discounting with backoff to the unigram distribution.
std::string EstimateBigramArpa(const std::vector<std::string>& sentences, double discount = 0.5);

}  // namespace ctcasr::synthetic

#endif  // CTCASR_SYNTHETIC_H_

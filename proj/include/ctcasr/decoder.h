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

#ifndef CTCASR_DECODER_H_
#define CTCASR_DECODER_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ctcasr/alphabet.h"
#include "ctcasr/lm.h"
#include "ctcasr/network.h"

namespace ctcasr {

struct DecodeParams {
  double alpha = 1.0;  // language model weight
  double beta = 0.0;   // exponent on the number of complete words
  int beam_width = 200;
  // Non-blank symbols with p(c | x_t) below this are not proposed.
  double prune_threshold = 0.0;
  // At the last frame, score each prefix's trailing partial word as a
  // completed word and add the sentence-end probability.
  bool end_of_utterance = false;

  // Throws Error on beam_width < 1, negative alpha, or a threshold outside
  // [0, 1).
  void Validate() const;
};

// Best path: argmax at every frame (lowest index wins ties), uncollapsed.
// GreedyDecode collapses and renders it.
LabelSequence GreedyPath(const PosteriorGrid& grid);
std::string GreedyDecode(const PosteriorGrid& grid, const Alphabet& alphabet);

// log((p_b + p_nb) * |W|^beta) from log-domain inputs; zero complete words
// contribute a factor of 1.
double PrefixScore(double log_pb, double log_pnb, std::size_t num_words, double beta);

struct Hypothesis {
  LabelSequence labels;
  std::string text;
  double log_pb = 0.0;   // natural log, blank-ending mass
  double log_pnb = 0.0;  // natural log, non-blank-ending mass
  double score = 0.0;    // prefix score used for ranking
};

struct BeamSearchResult {
  // Final beam ordered by descending score, ties by ascending label
  // sequence. Empty only when every prefix lost all probability mass.
  std::vector<Hypothesis> hypotheses;

  const Hypothesis* best() const { return hypotheses.empty() ? nullptr : &hypotheses.front(); }
  std::string text() const { return hypotheses.empty() ? std::string() : hypotheses.front().text; }
};

// Prefix beam search over a posterior grid, with an optional word-level
// language model applied whenever a space is appended (nullptr means no
// model). Rows need not be normalized but must be finite and non-negative.
// Throws Error on an empty grid, invalid params, or a grid whose width does
// not match the alphabet.
BeamSearchResult PrefixBeamSearch(const PosteriorGrid& grid, const LanguageModel* lm,
                                  const DecodeParams& params, const Alphabet& alphabet);

// Forward pass followed by prefix beam search.
BeamSearchResult DecodeUtterance(const NetworkParams& net, const NetworkConfig& config,
                                 const FeatureMatrix& features, const LanguageModel* lm,
                                 const DecodeParams& params, const Alphabet& alphabet);

// CTCP binary: "CTCP", u32 T, u32 K, alphabet block (u32 blank index,
// u32 space index, K length-prefixed UTF-8 symbols), T*K f32 row-major.
void WritePosteriorGrid(std::ostream& out, const PosteriorGrid& grid, const Alphabet& alphabet);
std::pair<PosteriorGrid, Alphabet> ReadPosteriorGrid(std::istream& in);
void SavePosteriorGrid(const std::filesystem::path& path, const PosteriorGrid& grid,
                       const Alphabet& alphabet);
std::pair<PosteriorGrid, Alphabet> LoadPosteriorGrid(const std::filesystem::path& path);

}  // namespace ctcasr

#endif  // CTCASR_DECODER_H_

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

#include "ctcasr/decoder.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "ctcasr/binary_io.h"
#include "ctcasr/error.h"
#include "ctcasr/log_math.h"

namespace ctcasr {
namespace {

// Prefixes are label strings; one char32_t per alphabet index. The string's
// own ordering gives the lexicographic tie-break.
using Prefix = std::u32string;

struct Mass {
  double pb = kLogZero;
  double pnb = kLogZero;
  double total() const { return LogAdd(pb, pnb); }
};

struct Candidate {
  const Prefix* prefix;
  Mass mass;
  double score;
};

bool Better(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return *a.prefix < *b.prefix;
}

LabelSequence ToLabels(const Prefix& p) { return LabelSequence(p.begin(), p.end()); }

std::size_t CountWords(const Prefix& p, int space) {
  return static_cast<std::size_t>(std::count(p.begin(), p.end(), static_cast<char32_t>(space)));
}

void Accumulate(double& slot, double value) { slot = LogAdd(slot, value); }

// Caches alpha * log p(last word of W(prefix + space) | earlier words).
class WordScorer {
 public:
  WordScorer(const LanguageModel* lm, double alpha, const Alphabet& alphabet)
      : lm_(alpha > 0 ? lm : nullptr), alpha_(alpha), alphabet_(alphabet) {}

  double OnSpace(const Prefix& extended) {
    if (!lm_) return 0.0;
    auto it = cache_.find(extended);
    if (it != cache_.end()) return it->second;
    const LabelSequence labels = ToLabels(extended);
    std::vector<std::string> words = WordsOf(labels, alphabet_);
    const std::string word = std::move(words.back());
    words.pop_back();
    const double s = Weighted(lm_->WordLogProb(words, word));
    cache_.emplace(extended, s);
    return s;
  }

  // Score for completing the utterance after `prefix`, plus the word count
  // the completed transcript has.
  std::pair<double, std::size_t> OnEnd(const Prefix& prefix) {
    const LabelSequence labels = ToLabels(prefix);
    std::vector<std::string> words = WordsOf(labels, alphabet_);
    std::string trailing;
    for (auto it = labels.rbegin(); it != labels.rend() && *it != alphabet_.space_index(); ++it) {
      trailing.insert(0, alphabet_.symbol(*it));
    }
    double s = 0.0;
    if (!trailing.empty()) {
      if (lm_) s += Weighted(lm_->WordLogProb(words, trailing));
      words.push_back(std::move(trailing));
    }
    if (lm_) s += Weighted(lm_->EndLogProb(words));
    return {s, words.size()};
  }

 private:
  double Weighted(double log_prob) const {
    return log_prob == kLogZero ? kLogZero : alpha_ * log_prob;
  }

  const LanguageModel* lm_;
  double alpha_;
  const Alphabet& alphabet_;
  std::unordered_map<Prefix, double> cache_;
};

void CheckGrid(const PosteriorGrid& grid, const Alphabet& alphabet) {
  if (grid.frames() < 1) throw Error("decoder: empty posterior grid");
  if (grid.symbols() != static_cast<Eigen::Index>(alphabet.size())) {
    throw DimensionError("decoder: grid has " + std::to_string(grid.symbols()) +
                         " columns but the alphabet has " + std::to_string(alphabet.size()) +
                         " symbols");
  }
  if (!grid.probs.allFinite() || (grid.probs.array() < 0.0).any()) {
    throw Error("decoder: grid entries must be finite and non-negative");
  }
}

}  // namespace

void DecodeParams::Validate() const {
  if (beam_width < 1) throw Error("decoder: beam width must be at least 1");
  if (!(alpha >= 0)) throw Error("decoder: alpha must be non-negative");
  if (!std::isfinite(beta)) throw Error("decoder: beta must be finite");
  if (!(prune_threshold >= 0 && prune_threshold < 1)) {
    throw Error("decoder: prune threshold must lie in [0, 1)");
  }
}

LabelSequence GreedyPath(const PosteriorGrid& grid) {
  LabelSequence path(static_cast<std::size_t>(grid.frames()));
  for (Eigen::Index t = 0; t < grid.frames(); ++t) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < grid.symbols(); ++k) {
      if (grid.probs(t, k) > grid.probs(t, best)) best = k;
    }
    path[static_cast<std::size_t>(t)] = static_cast<int>(best);
  }
  return path;
}

std::string GreedyDecode(const PosteriorGrid& grid, const Alphabet& alphabet) {
  if (grid.frames() > 0) CheckGrid(grid, alphabet);
  return CollapseToText(GreedyPath(grid), alphabet);
}

double PrefixScore(double log_pb, double log_pnb, std::size_t num_words, double beta) {
  const double base = LogAdd(log_pb, log_pnb);
  if (num_words == 0 || beta == 0.0 || base == kLogZero) return base;
  return base + beta * std::log(static_cast<double>(num_words));
}

BeamSearchResult PrefixBeamSearch(const PosteriorGrid& grid, const LanguageModel* lm,
                                  const DecodeParams& params, const Alphabet& alphabet) {
  params.Validate();
  CheckGrid(grid, alphabet);
  const Eigen::Index T = grid.frames();
  const int K = static_cast<int>(alphabet.size());
  const int blank = alphabet.blank_index();
  const int space = alphabet.space_index();
  const Eigen::MatrixXd logp = grid.probs.unaryExpr([](double p) { return SafeLog(p); });
  WordScorer words(lm, params.alpha, alphabet);

  // Masses of every prefix proposed at the previous frame, pruned or not.
  // The catch-up branch reads pruned entries from here.
  std::unordered_map<Prefix, Mass> proposed_prev;
  std::vector<std::pair<Prefix, Mass>> beam = {{Prefix(), Mass{0.0, kLogZero}}};
  std::unordered_map<Prefix, bool> in_beam = {{Prefix(), true}};

  for (Eigen::Index t = 0; t < T; ++t) {
    std::unordered_map<Prefix, Mass> next;
    next.reserve(beam.size() * static_cast<std::size_t>(K));
    const double log_blank = logp(t, blank);

    for (const auto& [prefix, mass] : beam) {
      const double total = mass.total();
      if (log_blank != kLogZero) Accumulate(next[prefix].pb, log_blank + total);

      for (int c = 0; c < K; ++c) {
        if (c == blank) continue;
        const double lc = logp(t, c);
        if (lc == kLogZero || grid.probs(t, c) < params.prune_threshold) continue;

        Prefix extended = prefix;
        extended.push_back(static_cast<char32_t>(c));
        const double lm_term = c == space ? words.OnSpace(extended) : 0.0;

        if (!prefix.empty() && static_cast<int>(prefix.back()) == c) {
          // Repeat: a new symbol needs a blank in between; otherwise the
          // frame continues the last symbol of the unchanged prefix.
          if (lm_term != kLogZero) Accumulate(next[extended].pnb, lm_term + lc + mass.pb);
          Accumulate(next[prefix].pnb, lc + mass.pnb);
        } else if (lm_term != kLogZero) {
          Accumulate(next[extended].pnb, lm_term + lc + total);
        }

        if (!in_beam.contains(extended)) {
          auto old = proposed_prev.find(extended);
          if (old != proposed_prev.end()) {
            Mass& slot = next[extended];
            if (log_blank != kLogZero) Accumulate(slot.pb, log_blank + old->second.total());
            Accumulate(slot.pnb, lc + old->second.pnb);
          }
        }
      }
    }

    std::vector<Candidate> candidates;
    candidates.reserve(next.size());
    for (const auto& [prefix, mass] : next) {
      const double score = PrefixScore(mass.pb, mass.pnb, CountWords(prefix, space), params.beta);
      if (score != kLogZero) candidates.push_back({&prefix, mass, score});
    }
    const std::size_t keep = std::min<std::size_t>(candidates.size(), params.beam_width);
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), Better);

    std::vector<std::pair<Prefix, Mass>> new_beam;
    std::unordered_map<Prefix, bool> new_in_beam;
    new_beam.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
      new_beam.emplace_back(*candidates[i].prefix, candidates[i].mass);
      new_in_beam.emplace(*candidates[i].prefix, true);
    }
    beam = std::move(new_beam);
    in_beam = std::move(new_in_beam);
    proposed_prev = std::move(next);
  }

  BeamSearchResult result;
  std::vector<Prefix> keys;
  keys.reserve(beam.size());
  std::vector<Candidate> finals;
  for (const auto& [prefix, mass] : beam) keys.push_back(prefix);
  for (std::size_t i = 0; i < beam.size(); ++i) {
    const Mass& mass = beam[i].second;
    double score;
    if (params.end_of_utterance) {
      const auto [lm_score, n_words] = words.OnEnd(keys[i]);
      score = lm_score == kLogZero ? kLogZero
                                   : PrefixScore(mass.pb, mass.pnb, n_words, params.beta) + lm_score;
    } else {
      score = PrefixScore(mass.pb, mass.pnb, CountWords(keys[i], space), params.beta);
    }
    if (score != kLogZero) finals.push_back({&keys[i], mass, score});
  }
  std::sort(finals.begin(), finals.end(), Better);
  for (const Candidate& c : finals) {
    Hypothesis h;
    h.labels = ToLabels(*c.prefix);
    h.text = alphabet.Render(h.labels);
    h.log_pb = c.mass.pb;
    h.log_pnb = c.mass.pnb;
    h.score = c.score;
    result.hypotheses.push_back(std::move(h));
  }
  return result;
}

BeamSearchResult DecodeUtterance(const NetworkParams& net, const NetworkConfig& config,
                                 const FeatureMatrix& features, const LanguageModel* lm,
                                 const DecodeParams& params, const Alphabet& alphabet) {
  if (config.output_dim != static_cast<int>(alphabet.size())) {
    throw DimensionError("decoder: network output width does not match the alphabet");
  }
  return PrefixBeamSearch(Forward(net, config, features).grid, lm, params, alphabet);
}

void WritePosteriorGrid(std::ostream& out, const PosteriorGrid& grid, const Alphabet& alphabet) {
  if (grid.symbols() != static_cast<Eigen::Index>(alphabet.size())) {
    throw DimensionError("grid file: grid width does not match the alphabet");
  }
  binio::WriteMagic(out, "CTCP");
  binio::WriteU32(out, static_cast<std::uint32_t>(grid.frames()));
  binio::WriteU32(out, static_cast<std::uint32_t>(grid.symbols()));
  binio::WriteU32(out, static_cast<std::uint32_t>(alphabet.blank_index()));
  binio::WriteU32(out, static_cast<std::uint32_t>(alphabet.space_index()));
  for (const auto& s : alphabet.symbols()) binio::WriteString(out, s);
  for (Eigen::Index t = 0; t < grid.frames(); ++t) {
    for (Eigen::Index k = 0; k < grid.symbols(); ++k) {
      binio::WriteF32(out, static_cast<float>(grid.probs(t, k)));
    }
  }
}

std::pair<PosteriorGrid, Alphabet> ReadPosteriorGrid(std::istream& in) {
  binio::ExpectMagic(in, "CTCP", "grid file");
  const std::uint32_t T = binio::ReadU32(in);
  const std::uint32_t K = binio::ReadU32(in);
  const std::uint32_t blank = binio::ReadU32(in);
  const std::uint32_t space = binio::ReadU32(in);
  if (K == 0 || K > 65536 || blank >= K || space >= K) {
    throw FormatError("grid file: bad alphabet header");
  }
  std::vector<std::string> symbols(K);
  for (auto& s : symbols) s = binio::ReadString(in);
  Alphabet alphabet = [&] {
    try {
      const std::string b = symbols[blank], s = symbols[space];
      return Alphabet::Build(symbols, b, s);
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(std::string("grid file: ") + e.what());
    }
  }();
  PosteriorGrid grid;
  grid.probs.resize(T, K);
  for (std::uint32_t t = 0; t < T; ++t) {
    for (std::uint32_t k = 0; k < K; ++k) grid.probs(t, k) = binio::ReadF32(in);
  }
  return {std::move(grid), std::move(alphabet)};
}

void SavePosteriorGrid(const std::filesystem::path& path, const PosteriorGrid& grid,
                       const Alphabet& alphabet) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  WritePosteriorGrid(out, grid, alphabet);
}

std::pair<PosteriorGrid, Alphabet> LoadPosteriorGrid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return ReadPosteriorGrid(in);
}

}  // namespace ctcasr

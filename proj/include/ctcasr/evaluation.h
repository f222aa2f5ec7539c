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

#ifndef CTCASR_EVALUATION_H_
#define CTCASR_EVALUATION_H_

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctcasr {

struct EditStats {
  std::size_t distance = 0;
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
};

// Unit-cost Levenshtein distance. The S/I/D split comes from a backtrace
// that prefers a diagonal move, then deletion, then insertion.
EditStats EditDistance(std::span<const std::string> ref, std::span<const std::string> hyp);

// Character tokens of a string (one token per byte, spaces included unless
// count_spaces is false).
std::vector<std::string> CharTokens(std::string_view text, bool count_spaces = true);
// Space-separated words; runs of spaces count as one separator.
std::vector<std::string> WordTokens(std::string_view text);

struct ErrorReport {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t reference_length = 0;

  std::size_t errors() const { return substitutions + insertions + deletions; }
  // (S + I + D) / N; may exceed 1. Throws Error when N is zero.
  double rate() const;
  ErrorReport& operator+=(const ErrorReport& other);
};

// Throw Error on an empty reference.
ErrorReport CharErrors(std::string_view ref, std::string_view hyp, bool count_spaces = true);
ErrorReport WordErrors(std::string_view ref, std::string_view hyp);
double Cer(std::string_view ref, std::string_view hyp, bool count_spaces = true);
double Wer(std::string_view ref, std::string_view hyp);

// Corpus-level scoring: counts are summed over utterances before dividing.
struct CorpusScore {
  ErrorReport chars;
  ErrorReport words;
  std::size_t utterances = 0;

  void Add(std::string_view ref, std::string_view hyp, bool count_spaces = true);
};

// CSV with one row per utterance followed by a "TOTAL" row.
struct ScoredUtterance {
  std::string id;
  ErrorReport chars;
  ErrorReport words;
};
void WriteScoreCsv(std::ostream& out, std::span<const ScoredUtterance> rows, const CorpusScore& total);
void WriteScoreSummary(std::ostream& out, const CorpusScore& total);

}  // namespace ctcasr

#endif  // CTCASR_EVALUATION_H_

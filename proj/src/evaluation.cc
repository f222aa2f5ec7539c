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

#include "ctcasr/evaluation.h"

#include <iomanip>
#include <ostream>

#include "ctcasr/error.h"

namespace ctcasr {

EditStats EditDistance(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({sub, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  EditStats s;
  s.distance = at(n, m);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++s.substitutions;
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++s.deletions;
      --i;
    } else {
      ++s.insertions;
      --j;
    }
  }
  return s;
}

std::vector<std::string> CharTokens(std::string_view text, bool count_spaces) {
  std::vector<std::string> out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == ' ' && !count_spaces) continue;
    out.emplace_back(1, c);
  }
  return out;
}

std::vector<std::string> WordTokens(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

double ErrorReport::rate() const {
  if (reference_length == 0) throw Error("scoring: empty reference");
  return static_cast<double>(errors()) / static_cast<double>(reference_length);
}

ErrorReport& ErrorReport::operator+=(const ErrorReport& o) {
  substitutions += o.substitutions;
  insertions += o.insertions;
  deletions += o.deletions;
  reference_length += o.reference_length;
  return *this;
}

namespace {

ErrorReport Report(std::span<const std::string> ref, std::span<const std::string> hyp) {
  if (ref.empty()) throw Error("scoring: empty reference");
  const EditStats s = EditDistance(ref, hyp);
  return {s.substitutions, s.insertions, s.deletions, ref.size()};
}

}  // namespace

ErrorReport CharErrors(std::string_view ref, std::string_view hyp, bool count_spaces) {
  return Report(CharTokens(ref, count_spaces), CharTokens(hyp, count_spaces));
}

ErrorReport WordErrors(std::string_view ref, std::string_view hyp) {
  return Report(WordTokens(ref), WordTokens(hyp));
}

double Cer(std::string_view ref, std::string_view hyp, bool count_spaces) {
  return CharErrors(ref, hyp, count_spaces).rate();
}

double Wer(std::string_view ref, std::string_view hyp) { return WordErrors(ref, hyp).rate(); }

void CorpusScore::Add(std::string_view ref, std::string_view hyp, bool count_spaces) {
  chars += CharErrors(ref, hyp, count_spaces);
  words += WordErrors(ref, hyp);
  ++utterances;
}

void WriteScoreCsv(std::ostream& out, std::span<const ScoredUtterance> rows, const CorpusScore& total) {
  out << "id,char_sub,char_ins,char_del,char_ref,cer,word_sub,word_ins,word_del,word_ref,wer\n";
  auto line = [&](const std::string& id, const ErrorReport& c, const ErrorReport& w) {
    out << id << ',' << c.substitutions << ',' << c.insertions << ',' << c.deletions << ','
        << c.reference_length << ',' << std::setprecision(6) << c.rate() << ','
        << w.substitutions << ',' << w.insertions << ',' << w.deletions << ','
        << w.reference_length << ',' << w.rate() << '\n';
  };
  for (const auto& r : rows) line(r.id, r.chars, r.words);
  if (total.utterances > 0) line("TOTAL", total.chars, total.words);
}

void WriteScoreSummary(std::ostream& out, const CorpusScore& total) {
  out << "utterances: " << total.utterances << '\n';
  if (total.utterances == 0) return;
  out << std::fixed << std::setprecision(2);
  out << "CER: " << 100.0 * total.chars.rate() << "% (" << total.chars.errors() << " errors / "
      << total.chars.reference_length << " chars; S=" << total.chars.substitutions
      << " I=" << total.chars.insertions << " D=" << total.chars.deletions << ")\n";
  out << "WER: " << 100.0 * total.words.rate() << "% (" << total.words.errors() << " errors / "
      << total.words.reference_length << " words; S=" << total.words.substitutions
      << " I=" << total.words.insertions << " D=" << total.words.deletions << ")\n";
  out << std::defaultfloat;
}

}  // namespace ctcasr

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

#ifndef CTCASR_ALPHABET_H_
#define CTCASR_ALPHABET_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ctcasr {

// A frame-level or transcript-level sequence of alphabet indices.
using LabelSequence = std::vector<int>;

// Ordered output symbol inventory. Index assignment follows the order the
// symbols were given in. Immutable once built.
class Alphabet {
 public:
  // Throws Error on an empty list, duplicate symbols, or when `blank` or
  // `space` is not one of the symbols (or both name the same symbol).
  static Alphabet Build(std::vector<std::string> symbols,
                        const std::string& blank, const std::string& space);

  // The 32-class character set: blank "_", a-z, apostrophe, period,
  // hyphen, "<noise>" and space (" "). Blank is index 0, space is last.
  static Alphabet Default();

  std::size_t size() const { return symbols_.size(); }
  int blank_index() const { return blank_; }
  int space_index() const { return space_; }
  const std::string& symbol(int index) const;
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::string& space_symbol() const { return symbols_[space_]; }

  // -1 when absent.
  int IndexOf(std::string_view symbol) const;
  bool Contains(int index) const {
    return index >= 0 && static_cast<std::size_t>(index) < symbols_.size();
  }

  // Transcript text to non-blank indices, matching the longest symbol at
  // each position so multi-character tokens such as "<noise>" survive.
  // Throws Error on characters that no symbol covers.
  LabelSequence Encode(std::string_view text) const;

  // Concatenation of symbol strings; blank indices render as nothing.
  std::string Render(std::span<const int> labels) const;

  // Plain-text form: "#blank <sym>" and "#space <sym>" header lines, then
  // one symbol per line. A literal space symbol is written as "<space>".
  void Write(std::ostream& out) const;
  static Alphabet Read(std::istream& in);
  void Save(const std::filesystem::path& path) const;
  static Alphabet Load(const std::filesystem::path& path);

  bool operator==(const Alphabet& other) const {
    return symbols_ == other.symbols_ && blank_ == other.blank_ &&
           space_ == other.space_;
  }

 private:
  Alphabet() = default;

  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
  int blank_ = 0;
  int space_ = 0;
  std::size_t longest_symbol_ = 1;
};

// Merges adjacent duplicates, then removes blanks.
LabelSequence Collapse(std::span<const int> path, const Alphabet& alphabet);

// Collapse followed by Render.
std::string CollapseToText(std::span<const int> path, const Alphabet& alphabet);

// The complete words of a prefix: the prefix is split at every space and
// whatever trails the last space is dropped. Consecutive spaces produce
// empty words, which no lexicon or vocabulary contains.
std::vector<std::string> WordsOf(std::string_view prefix,
                                 const Alphabet& alphabet);

// Same as WordsOf, operating on a label prefix without blanks.
std::vector<std::string> WordsOf(std::span<const int> prefix,
                                 const Alphabet& alphabet);

}  // namespace ctcasr

#endif  // CTCASR_ALPHABET_H_

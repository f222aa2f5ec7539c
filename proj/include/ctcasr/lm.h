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

#ifndef CTCASR_LM_H_
#define CTCASR_LM_H_

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ctcasr {

inline constexpr std::string_view kSentenceBegin = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";

class Lexicon {
 public:
  // Throws Error on an empty list or a word containing a space.
  explicit Lexicon(std::vector<std::string> words);

  // One word per line; blank lines ignored.
  static Lexicon Load(const std::filesystem::path& path);
  static Lexicon Read(std::istream& in);

  bool Contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// 1 for lexicon words, 0 otherwise (including the empty word).
double DictionaryProb(const Lexicon& lexicon, std::string_view word);

// Backoff n-gram model in ARPA form. Probabilities and backoff weights are
// kept exactly as read (log10).
class NGramModel {
 public:
  struct Entry {
    std::vector<std::string> words;
    double log10_prob = 0.0;
    double log10_backoff = 0.0;
    bool has_backoff = false;
  };

  // Throws FormatError on a missing \data\ or \end\ marker, count mismatch,
  // or malformed entry line.
  static NGramModel Read(std::istream& in);
  static NGramModel Load(const std::filesystem::path& path);

  // Re-serializes in ARPA form with every number printed with `decimals`
  // digits after the point, entries in the order they were read.
  void Write(std::ostream& out, int decimals = 6) const;

  int order() const { return static_cast<int>(entries_.size()); }
  std::size_t count(int n) const { return entries_.at(n - 1).size(); }
  const std::vector<Entry>& entries(int n) const { return entries_.at(n - 1); }
  bool InVocabulary(std::string_view word) const;

  // Stored entry for an exact n-gram, or nullptr.
  const Entry* Find(std::span<const std::string> words) const;

  // log10 p(word | context) with standard backoff. Only the last order()-1
  // context words matter. Out-of-vocabulary words get -infinity.
  double Log10Prob(std::string_view word, std::span<const std::string> context) const;

  // 10^Log10Prob: a probability in [0, 1], exactly 0 for unknown words.
  double CondProb(std::string_view word, std::span<const std::string> context) const;

 private:
  static std::string Key(std::span<const std::string> words);

  std::vector<std::vector<Entry>> entries_;
  std::vector<std::unordered_map<std::string, std::size_t>> index_;
};

// What the prefix search needs from a word-level prior: the natural-log
// probability of the next complete word given the complete words before it.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  virtual double WordLogProb(std::span<const std::string> history,
                             const std::string& word) const = 0;
  // Natural-log probability of ending the sentence after `history`.
  virtual double EndLogProb(std::span<const std::string> history) const = 0;
};

class DictionaryLanguageModel : public LanguageModel {
 public:
  explicit DictionaryLanguageModel(std::shared_ptr<const Lexicon> lexicon)
      : lexicon_(std::move(lexicon)) {}
  double WordLogProb(std::span<const std::string> history,
                     const std::string& word) const override;
  double EndLogProb(std::span<const std::string> history) const override;

 private:
  std::shared_ptr<const Lexicon> lexicon_;
};

// Prepends <s> to the word history before querying the n-gram model.
class NGramLanguageModel : public LanguageModel {
 public:
  explicit NGramLanguageModel(std::shared_ptr<const NGramModel> model)
      : model_(std::move(model)) {}
  double WordLogProb(std::span<const std::string> history,
                     const std::string& word) const override;
  double EndLogProb(std::span<const std::string> history) const override;
  const NGramModel& model() const { return *model_; }

 private:
  std::vector<std::string> Context(std::span<const std::string> history) const;
  std::shared_ptr<const NGramModel> model_;
};

}  // namespace ctcasr

#endif  // CTCASR_LM_H_

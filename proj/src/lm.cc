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

#include "ctcasr/lm.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ctcasr/error.h"
#include "ctcasr/log_math.h"

namespace ctcasr {
namespace {

constexpr double kLn10 = 2.302585092994045684;

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitWhitespace(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

bool ParseDouble(const std::string& s, double& v) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  return ec == std::errc() && ptr == end;
}

std::string FormatFixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

}  // namespace

Lexicon::Lexicon(std::vector<std::string> words) {
  for (auto& w : words) {
    if (w.find(' ') != std::string::npos) throw Error("lexicon: word '" + w + "' contains a space");
    if (!w.empty()) words_.insert(std::move(w));
  }
  if (words_.empty()) throw Error("lexicon: no words");
}

Lexicon Lexicon::Read(std::istream& in) {
  std::vector<std::string> words;
  for (std::string line; std::getline(in, line);) {
    line = Trim(line);
    if (!line.empty()) words.push_back(line);
  }
  return Lexicon(std::move(words));
}

Lexicon Lexicon::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return Read(in);
}

bool Lexicon::Contains(std::string_view word) const {
  return words_.contains(std::string(word));
}

double DictionaryProb(const Lexicon& lexicon, std::string_view word) {
  return !word.empty() && lexicon.Contains(word) ? 1.0 : 0.0;
}

std::string NGramModel::Key(std::span<const std::string> words) {
  std::string key;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) key += ' ';
    key += words[i];
  }
  return key;
}

NGramModel NGramModel::Read(std::istream& in) {
  NGramModel model;
  std::vector<std::size_t> declared;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) -> FormatError {
    return FormatError("arpa line " + std::to_string(line_no) + ": " + msg);
  };

  bool in_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = Trim(line);
    if (line.empty()) continue;
    if (line == "\\data\\") {
      in_data = true;
      break;
    }
  }
  if (!in_data) throw FormatError("arpa: missing \\data\\ header");

  int section = 0;
  bool ended = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = Trim(line);
    if (line.empty()) continue;
    if (line == "\\end\\") {
      ended = true;
      break;
    }
    if (line.front() == '\\') {
      int n = 0;
      if (std::sscanf(line.c_str(), "\\%d-grams:", &n) != 1 || n < 1) {
        throw fail("unrecognized section header '" + line + "'");
      }
      if (n != section + 1 || static_cast<std::size_t>(n) > declared.size()) {
        throw fail("unexpected section \\" + std::to_string(n) + "-grams:");
      }
      section = n;
      model.entries_.emplace_back();
      model.index_.emplace_back();
      continue;
    }
    if (section == 0) {
      std::size_t n = 0, count = 0;
      if (std::sscanf(line.c_str(), "ngram %zu=%zu", &n, &count) != 2 || n != declared.size() + 1) {
        throw fail("malformed count line '" + line + "'");
      }
      declared.push_back(count);
      continue;
    }
    const auto fields = SplitWhitespace(line);
    const std::size_t n = static_cast<std::size_t>(section);
    if (fields.size() != n + 1 && fields.size() != n + 2) {
      throw fail("expected " + std::to_string(n) + " words in '" + line + "'");
    }
    Entry e;
    if (!ParseDouble(fields[0], e.log10_prob)) throw fail("bad probability '" + fields[0] + "'");
    e.words.assign(fields.begin() + 1, fields.begin() + 1 + static_cast<std::ptrdiff_t>(n));
    if (fields.size() == n + 2) {
      if (!ParseDouble(fields.back(), e.log10_backoff)) {
        throw fail("bad backoff weight '" + fields.back() + "'");
      }
      e.has_backoff = true;
    }
    auto& idx = model.index_[n - 1];
    if (!idx.emplace(Key(e.words), model.entries_[n - 1].size()).second) {
      throw fail("duplicate n-gram '" + Key(e.words) + "'");
    }
    model.entries_[n - 1].push_back(std::move(e));
  }
  if (!ended) throw FormatError("arpa: missing \\end\\ marker");
  if (declared.empty()) throw FormatError("arpa: no ngram counts in \\data\\ section");
  if (model.entries_.size() != declared.size()) {
    throw FormatError("arpa: declared " + std::to_string(declared.size()) + " orders, found " +
                      std::to_string(model.entries_.size()) + " sections");
  }
  for (std::size_t i = 0; i < declared.size(); ++i) {
    if (model.entries_[i].size() != declared[i]) {
      throw FormatError("arpa: declared " + std::to_string(declared[i]) + " " +
                        std::to_string(i + 1) + "-grams, found " +
                        std::to_string(model.entries_[i].size()));
    }
  }
  return model;
}

NGramModel NGramModel::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return Read(in);
}

void NGramModel::Write(std::ostream& out, int decimals) const {
  out << "\\data\\\n";
  for (int n = 1; n <= order(); ++n) out << "ngram " << n << "=" << count(n) << "\n";
  for (int n = 1; n <= order(); ++n) {
    out << "\n\\" << n << "-grams:\n";
    for (const Entry& e : entries(n)) {
      out << FormatFixed(e.log10_prob, decimals) << '\t' << Key(e.words);
      if (e.has_backoff) out << '\t' << FormatFixed(e.log10_backoff, decimals);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

bool NGramModel::InVocabulary(std::string_view word) const {
  return !index_.empty() && index_[0].contains(std::string(word));
}

const NGramModel::Entry* NGramModel::Find(std::span<const std::string> words) const {
  if (words.empty() || words.size() > index_.size()) return nullptr;
  const auto& idx = index_[words.size() - 1];
  auto it = idx.find(Key(words));
  return it == idx.end() ? nullptr : &entries_[words.size() - 1][it->second];
}

double NGramModel::Log10Prob(std::string_view word, std::span<const std::string> context) const {
  if (!InVocabulary(word)) return -std::numeric_limits<double>::infinity();
  const std::size_t max_context = static_cast<std::size_t>(order() - 1);
  if (context.size() > max_context) context = context.last(max_context);

  double backoff = 0.0;
  std::vector<std::string> ngram(context.begin(), context.end());
  ngram.emplace_back(word);
  for (std::size_t skip = 0;; ++skip) {
    std::span<const std::string> candidate(ngram.data() + skip, ngram.size() - skip);
    if (const Entry* e = Find(candidate)) return backoff + e->log10_prob;
    // Unigrams always hit for in-vocabulary words, so the loop ends there.
    if (const Entry* ctx = Find(candidate.first(candidate.size() - 1))) {
      if (ctx->has_backoff) backoff += ctx->log10_backoff;
    }
  }
}

double NGramModel::CondProb(std::string_view word, std::span<const std::string> context) const {
  const double lp = Log10Prob(word, context);
  return std::isinf(lp) ? 0.0 : std::pow(10.0, lp);
}

double DictionaryLanguageModel::WordLogProb(std::span<const std::string>,
                                            const std::string& word) const {
  return SafeLog(DictionaryProb(*lexicon_, word));
}

double DictionaryLanguageModel::EndLogProb(std::span<const std::string>) const { return 0.0; }

std::vector<std::string> NGramLanguageModel::Context(std::span<const std::string> history) const {
  const std::size_t keep = static_cast<std::size_t>(std::max(model_->order() - 1, 0));
  std::vector<std::string> ctx;
  if (history.size() < keep) ctx.emplace_back(kSentenceBegin);
  const std::size_t from = history.size() > keep ? history.size() - keep : 0;
  ctx.insert(ctx.end(), history.begin() + static_cast<std::ptrdiff_t>(from), history.end());
  return ctx;
}

double NGramLanguageModel::WordLogProb(std::span<const std::string> history,
                                       const std::string& word) const {
  return model_->Log10Prob(word, Context(history)) * kLn10;
}

double NGramLanguageModel::EndLogProb(std::span<const std::string> history) const {
  return model_->Log10Prob(kSentenceEnd, Context(history)) * kLn10;
}

}  // namespace ctcasr

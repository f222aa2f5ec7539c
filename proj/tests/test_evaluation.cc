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

#include <doctest.h>

#include <random>
#include <sstream>

#include "ctcasr/error.h"
#include "ctcasr/evaluation.h"

using namespace ctcasr;

namespace {

// Plain two-row Levenshtein, independent of the backtrace implementation.
std::size_t ReferenceDistance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

EditStats Chars(const std::string& a, const std::string& b) {
  const auto x = CharTokens(a);
  const auto y = CharTokens(b);
  return EditDistance(x, y);
}

std::string RandomString(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(0, 7), ch(0, 2);
  std::string s(static_cast<std::size_t>(len(rng)), 'a');
  for (char& c : s) c = static_cast<char>('a' + ch(rng));
  return s;
}

}  // namespace

TEST_CASE("edit distance examples") {
  CHECK(Chars("abc", "abc").distance == 0);
  const EditStats ins = Chars("", "abc");
  CHECK(ins.distance == 3);
  CHECK(ins.insertions == 3);
  const EditStats del = Chars("abc", "");
  CHECK(del.deletions == 3);
  const EditStats k = Chars("kitten", "sitting");
  CHECK(k.distance == 3);
  CHECK(k.distance == ReferenceDistance("kitten", "sitting"));
  CHECK(k.substitutions == 2);
  CHECK(k.insertions == 1);
}

TEST_CASE("edit distance is a metric on random strings") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const std::string a = RandomString(rng), b = RandomString(rng), c = RandomString(rng);
    const EditStats ab = Chars(a, b);
    CHECK(ab.distance == ReferenceDistance(a, b));
    CHECK(ab.distance == ab.substitutions + ab.insertions + ab.deletions);
    CHECK(ab.distance == Chars(b, a).distance);
    CHECK(Chars(a, c).distance <= ab.distance + Chars(b, c).distance);
    CHECK(Chars(a, a).distance == 0);
  }
}

TEST_CASE("error rates") {
  CHECK(Cer("abc", "abd") == doctest::Approx(1.0 / 3));
  CHECK(Wer("the cat", "the cat") == 0.0);
  CHECK(Wer("the cat sat", "the cat") == doctest::Approx(1.0 / 3));
  CHECK(WordErrors("the cat sat", "the cat").deletions == 1);
  CHECK(Cer("a b", "ab") == doctest::Approx(1.0 / 3));
  CHECK(Cer("a b", "ab", false) == 0.0);
  CHECK(Wer("a", "b c d") == 3.0);
  CHECK_THROWS_AS(Cer("", "x"), Error);
  CHECK_THROWS_AS(Wer("   ", "x"), Error);
}

TEST_CASE("tokenization") {
  CHECK(WordTokens("  the  cat ") == std::vector<std::string>{"the", "cat"});
  CHECK(CharTokens("a b").size() == 3);
  CHECK(CharTokens("a b", false).size() == 2);
}

TEST_CASE("corpus rates pool counts") {
  CorpusScore s;
  s.Add("abcd", "abcd");
  s.Add("ab", "xy");
  CHECK(s.utterances == 2);
  CHECK(s.chars.rate() == doctest::Approx(2.0 / 6));  // not the mean 0.5
  CHECK(s.words.rate() == doctest::Approx(0.5));

  std::ostringstream summary;
  WriteScoreSummary(summary, s);
  CHECK(summary.str().find("CER") != std::string::npos);
  CHECK(summary.str().find("WER") != std::string::npos);

  std::vector<ScoredUtterance> rows = {{"u1", CharErrors("abcd", "abcd"), WordErrors("abcd", "abcd")},
                                       {"u2", CharErrors("ab", "xy"), WordErrors("ab", "xy")}};
  std::ostringstream csv;
  WriteScoreCsv(csv, rows, s);
  const std::string text = csv.str();
  CHECK(text.find("u2") != std::string::npos);
  CHECK(text.find("TOTAL") != std::string::npos);
}

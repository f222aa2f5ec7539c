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

#include "ctcasr/alphabet.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "ctcasr/error.h"

namespace ctcasr {
namespace {

constexpr std::string_view kSpaceToken = "<space>";

std::string EscapeSymbol(const std::string& s) {
  return s == " " ? std::string(kSpaceToken) : s;
}

std::string UnescapeSymbol(const std::string& s) {
  return s == kSpaceToken ? std::string(" ") : s;
}

}  // namespace

Alphabet Alphabet::Build(std::vector<std::string> symbols,
                         const std::string& blank, const std::string& space) {
  if (symbols.empty()) throw Error("alphabet: no symbols");
  Alphabet a;
  a.symbols_ = std::move(symbols);
  for (std::size_t i = 0; i < a.symbols_.size(); ++i) {
    const std::string& s = a.symbols_[i];
    if (s.empty()) throw Error("alphabet: empty symbol at index " + std::to_string(i));
    if (!a.index_.emplace(s, static_cast<int>(i)).second) {
      throw Error("alphabet: duplicate symbol '" + s + "'");
    }
    a.longest_symbol_ = std::max(a.longest_symbol_, s.size());
  }
  a.blank_ = a.IndexOf(blank);
  a.space_ = a.IndexOf(space);
  if (a.blank_ < 0) throw Error("alphabet: blank symbol '" + blank + "' not in symbol list");
  if (a.space_ < 0) throw Error("alphabet: space symbol '" + space + "' not in symbol list");
  if (a.blank_ == a.space_) throw Error("alphabet: blank and space must differ");
  return a;
}

Alphabet Alphabet::Default() {
  std::vector<std::string> symbols = {"_"};
  for (char c = 'a'; c <= 'z'; ++c) symbols.emplace_back(1, c);
  for (const char* s : {"'", ".", "-", "<noise>", " "}) symbols.emplace_back(s);
  return Build(std::move(symbols), "_", " ");
}

const std::string& Alphabet::symbol(int index) const {
  if (!Contains(index)) throw Error("alphabet: index " + std::to_string(index) + " out of range");
  return symbols_[static_cast<std::size_t>(index)];
}

int Alphabet::IndexOf(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  return it == index_.end() ? -1 : it->second;
}

LabelSequence Alphabet::Encode(std::string_view text) const {
  LabelSequence out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    int found = -1;
    std::size_t len = std::min(longest_symbol_, text.size() - pos);
    for (; len > 0; --len) {
      found = IndexOf(text.substr(pos, len));
      if (found >= 0 && found != blank_) break;
      found = -1;
    }
    if (found < 0) {
      throw Error("alphabet: cannot encode '" + std::string(text.substr(pos, 1)) +
                  "' at offset " + std::to_string(pos));
    }
    out.push_back(found);
    pos += len;
  }
  return out;
}

std::string Alphabet::Render(std::span<const int> labels) const {
  std::string out;
  for (int l : labels) {
    if (l != blank_) out += symbol(l);
  }
  return out;
}

void Alphabet::Write(std::ostream& out) const {
  out << "#blank " << EscapeSymbol(symbols_[blank_]) << '\n';
  out << "#space " << EscapeSymbol(symbols_[space_]) << '\n';
  for (const auto& s : symbols_) out << EscapeSymbol(s) << '\n';
}

Alphabet Alphabet::Read(std::istream& in) {
  std::string line, blank, space;
  std::vector<std::string> symbols;
  bool have_blank = false, have_space = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("#blank ", 0) == 0) {
      blank = UnescapeSymbol(line.substr(7));
      have_blank = true;
    } else if (line.rfind("#space ", 0) == 0) {
      space = UnescapeSymbol(line.substr(7));
      have_space = true;
    } else {
      symbols.push_back(UnescapeSymbol(line));
    }
  }
  if (!have_blank) throw FormatError("alphabet file: missing #blank header");
  if (!have_space) throw FormatError("alphabet file: missing #space header");
  return Build(std::move(symbols), blank, space);
}

void Alphabet::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  Write(out);
}

Alphabet Alphabet::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return Read(in);
}

LabelSequence Collapse(std::span<const int> path, const Alphabet& alphabet) {
  LabelSequence out;
  int prev = -1;
  for (int l : path) {
    if (l != prev && l != alphabet.blank_index()) out.push_back(l);
    prev = l;
  }
  return out;
}

std::string CollapseToText(std::span<const int> path, const Alphabet& alphabet) {
  return alphabet.Render(Collapse(path, alphabet));
}

std::vector<std::string> WordsOf(std::string_view prefix, const Alphabet& alphabet) {
  const std::string& sep = alphabet.space_symbol();
  std::vector<std::string> words;
  std::size_t start = 0;
  for (std::size_t pos = prefix.find(sep); pos != std::string_view::npos;
       pos = prefix.find(sep, start)) {
    words.emplace_back(prefix.substr(start, pos - start));
    start = pos + sep.size();
  }
  return words;
}

std::vector<std::string> WordsOf(std::span<const int> prefix, const Alphabet& alphabet) {
  std::vector<std::string> words;
  std::string current;
  for (int l : prefix) {
    if (l == alphabet.space_index()) {
      words.push_back(std::move(current));
      current.clear();
    } else {
      current += alphabet.symbol(l);
    }
  }
  return words;
}

}  // namespace ctcasr

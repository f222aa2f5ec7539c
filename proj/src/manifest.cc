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

#include "ctcasr/manifest.h"

#include <fstream>
#include <set>

#include <json.hpp>

#include "ctcasr/error.h"

namespace ctcasr {
namespace {

std::filesystem::path Resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace

std::vector<Utterance> ReadManifest(std::istream& in, const std::filesystem::path& base_dir) {
  std::vector<Utterance> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "manifest line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (!j.is_object()) throw FormatError(where + ": record is not an object");
    Utterance u;
    try {
      if (j.contains("audio_path")) u.audio_path = Resolve(base_dir, j.at("audio_path").get<std::string>());
      if (j.contains("feature_path")) u.feature_path = Resolve(base_dir, j.at("feature_path").get<std::string>());
      if (j.contains("transcript")) u.transcript = j.at("transcript").get<std::string>();
      if (j.contains("id")) u.id = j.at("id").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (u.audio_path.empty() && u.feature_path.empty()) {
      throw FormatError(where + ": record needs audio_path or feature_path");
    }
    if (u.id.empty()) u.id = (u.audio_path.empty() ? u.feature_path : u.audio_path).stem().string();
    if (!seen.insert(u.id).second) throw FormatError(where + ": duplicate id '" + u.id + "'");
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<Utterance> ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return ReadManifest(in, std::filesystem::absolute(path).parent_path());
}

void WriteManifest(const std::filesystem::path& path, const std::vector<Utterance>& utterances,
                   const std::map<std::string, std::string>& extra) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& u : utterances) {
    nlohmann::ordered_json j;
    j["id"] = u.id;
    if (!u.audio_path.empty()) j["audio_path"] = std::filesystem::absolute(u.audio_path).string();
    if (!u.feature_path.empty()) j["feature_path"] = std::filesystem::absolute(u.feature_path).string();
    j["transcript"] = u.transcript;
    for (const auto& [k, v] : extra) j[k] = v;
    out << j.dump() << '\n';
  }
}

std::vector<std::pair<std::string, std::string>> ReadTranscripts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected id<TAB>text");
    }
    rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return rows;
}

void WriteTranscripts(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
  for (const auto& [id, text] : rows) out << id << '\t' << text << '\n';
}

}  // namespace ctcasr

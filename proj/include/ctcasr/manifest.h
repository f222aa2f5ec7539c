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

#ifndef CTCASR_MANIFEST_H_
#define CTCASR_MANIFEST_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ctcasr {

// One training or test record. Exactly one of audio_path / feature_path is
// typically set; both may be present after featurization.
struct Utterance {
  std::string id;
  std::filesystem::path audio_path;
  std::filesystem::path feature_path;
  std::string transcript;
};

// JSON-lines manifest. Relative paths are resolved against the manifest's
// directory. Records without "id" get the stem of their audio or feature
// file. Throws FormatError on invalid JSON or a record with neither path.
std::vector<Utterance> ReadManifest(const std::filesystem::path& path);
std::vector<Utterance> ReadManifest(std::istream& in, const std::filesystem::path& base_dir);

// Writes absolute paths. `extra` fields are added to every record.
void WriteManifest(const std::filesystem::path& path, const std::vector<Utterance>& utterances,
                   const std::map<std::string, std::string>& extra = {});

// "id<TAB>text" lines. Lines starting with '#' are comments.
std::vector<std::pair<std::string, std::string>> ReadTranscripts(const std::filesystem::path& path);
void WriteTranscripts(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows);

}  // namespace ctcasr

#endif  // CTCASR_MANIFEST_H_

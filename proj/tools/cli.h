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

#ifndef CTCASR_TOOLS_CLI_H_
#define CTCASR_TOOLS_CLI_H_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ctcasr/decoder.h"
#include "ctcasr/features.h"
#include "ctcasr/network.h"
#include "ctcasr/trainer.h"

namespace ctcasr::cli {

enum ExitCode : int { kOk = 0, kDataFailure = 1, kUsage = 2 };

// Bad flags, bad config keys or values. Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything a command can be configured with. The JSON form has four
// sections ("features", "network", "train", "decode") whose keys mirror the
// field names below.
struct RunConfig {
  FeatureConfig features;
  NetworkConfig network;
  // Set when the config names an input width explicitly; otherwise the width
  // is taken from the data.
  std::optional<int> input_dim;
  TrainConfig train;
  DecodeParams decode;
  std::string lm = "none";  // none | dict | ngram
  std::filesystem::path lexicon;
  std::filesystem::path arpa;
  bool greedy = false;
};

// Overlays `j` onto `config`. Unknown sections or keys, and values of the
// wrong type, throw UsageError. Relative paths resolve against `base_dir`.
void ApplyJson(RunConfig& config, const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::filesystem::path& path);

nlohmann::json ToJson(const RunConfig& config);

// 16 hex digits of FNV-1a over the canonical JSON dump.
std::string ConfigHash(const RunConfig& config);

// "# ctcasr <version> config <hash>"
std::string StampLine(const RunConfig& config);

// Entry point shared by the executable and the tests.
int Run(int argc, const char* const* argv);

}  // namespace ctcasr::cli

#endif  // CTCASR_TOOLS_CLI_H_

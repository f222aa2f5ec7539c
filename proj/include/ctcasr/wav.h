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

#ifndef CTCASR_WAV_H_
#define CTCASR_WAV_H_

#include <filesystem>
#include <vector>

namespace ctcasr {

// Mono audio with samples scaled to [-1, 1).
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 16000;
};

// Reads a RIFF/WAVE file holding mono 16-bit PCM. Throws FormatError for
// anything else (stereo, float, compressed, truncated).
AudioBuffer ReadWav(const std::filesystem::path& path);

// Writes mono 16-bit PCM, clamping samples to the representable range.
void WriteWav(const std::filesystem::path& path, const AudioBuffer& audio);

}  // namespace ctcasr

#endif  // CTCASR_WAV_H_

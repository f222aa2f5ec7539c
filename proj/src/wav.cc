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

#include "ctcasr/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "ctcasr/binary_io.h"
#include "ctcasr/error.h"

namespace ctcasr {
namespace {

std::uint16_t ReadU16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  if (in.gcount() != 2) throw FormatError("wav: truncated header");
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void WriteU16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

}  // namespace

AudioBuffer ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  const std::string where = "wav " + path.string();
  binio::ExpectMagic(in, "RIFF", where);
  binio::ReadU32(in);
  binio::ExpectMagic(in, "WAVE", where);

  bool have_fmt = false;
  AudioBuffer audio;
  while (true) {
    char id[4];
    in.read(id, 4);
    if (in.gcount() != 4) throw FormatError(where + ": no data chunk");
    const std::uint32_t size = binio::ReadU32(in);
    const std::string chunk(id, 4);
    if (chunk == "fmt ") {
      const std::uint16_t format = ReadU16(in);
      const std::uint16_t channels = ReadU16(in);
      const std::uint32_t rate = binio::ReadU32(in);
      binio::ReadU32(in);  // byte rate
      ReadU16(in);         // block align
      const std::uint16_t bits = ReadU16(in);
      if (format != 1) throw FormatError(where + ": not PCM (format " + std::to_string(format) + ")");
      if (channels != 1) throw FormatError(where + ": expected mono, got " + std::to_string(channels) + " channels");
      if (bits != 16) throw FormatError(where + ": expected 16-bit samples, got " + std::to_string(bits));
      if (rate == 0) throw FormatError(where + ": zero sample rate");
      audio.sample_rate = static_cast<int>(rate);
      in.ignore(size - 16 + (size & 1));
      have_fmt = true;
    } else if (chunk == "data") {
      if (!have_fmt) throw FormatError(where + ": data chunk before fmt chunk");
      const std::size_t n = size / 2;
      audio.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        audio.samples[i] = static_cast<std::int16_t>(ReadU16(in)) / 32768.0;
      }
      return audio;
    } else {
      in.ignore(size + (size & 1));
    }
  }
}

void WriteWav(const std::filesystem::path& path, const AudioBuffer& audio) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const auto n = static_cast<std::uint32_t>(audio.samples.size());
  const auto rate = static_cast<std::uint32_t>(audio.sample_rate);
  binio::WriteMagic(out, "RIFF");
  binio::WriteU32(out, 36 + 2 * n);
  binio::WriteMagic(out, "WAVE");
  binio::WriteMagic(out, "fmt ");
  binio::WriteU32(out, 16);
  WriteU16(out, 1);
  WriteU16(out, 1);
  binio::WriteU32(out, rate);
  binio::WriteU32(out, rate * 2);
  WriteU16(out, 2);
  WriteU16(out, 16);
  binio::WriteMagic(out, "data");
  binio::WriteU32(out, 2 * n);
  for (double s : audio.samples) {
    const double scaled = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    WriteU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
}

}  // namespace ctcasr

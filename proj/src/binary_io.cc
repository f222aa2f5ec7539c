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

#include "ctcasr/binary_io.h"

#include <array>
#include <bit>
#include <istream>
#include <ostream>

#include "ctcasr/error.h"

namespace ctcasr::binio {
namespace {

template <typename U>
void PutLE(std::ostream& out, U v) {
  std::array<char, sizeof(U)> bytes;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U GetLE(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw FormatError("unexpected end of binary data");
  }
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void WriteMagic(std::ostream& out, std::string_view magic) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

void ExpectMagic(std::istream& in, std::string_view magic, std::string_view what) {
  std::string got(magic.size(), '\0');
  in.read(got.data(), static_cast<std::streamsize>(got.size()));
  if (in.gcount() != static_cast<std::streamsize>(magic.size()) || got != magic) {
    throw FormatError(std::string(what) + ": bad magic, expected \"" +
                      std::string(magic) + "\"");
  }
}

void WriteU32(std::ostream& out, std::uint32_t v) { PutLE(out, v); }
void WriteI32(std::ostream& out, std::int32_t v) { PutLE(out, static_cast<std::uint32_t>(v)); }
void WriteF32(std::ostream& out, float v) { PutLE(out, std::bit_cast<std::uint32_t>(v)); }
void WriteF64(std::ostream& out, double v) { PutLE(out, std::bit_cast<std::uint64_t>(v)); }

void WriteString(std::ostream& out, std::string_view s) {
  WriteU32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t ReadU32(std::istream& in) { return GetLE<std::uint32_t>(in); }
std::int32_t ReadI32(std::istream& in) { return static_cast<std::int32_t>(GetLE<std::uint32_t>(in)); }
float ReadF32(std::istream& in) { return std::bit_cast<float>(GetLE<std::uint32_t>(in)); }
double ReadF64(std::istream& in) { return std::bit_cast<double>(GetLE<std::uint64_t>(in)); }

std::string ReadString(std::istream& in) {
  const std::uint32_t n = ReadU32(in);
  if (n > (1u << 20)) throw FormatError("string length " + std::to_string(n) + " too large");
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (in.gcount() != static_cast<std::streamsize>(n)) throw FormatError("unexpected end of binary data");
  return s;
}

}  // namespace ctcasr::binio

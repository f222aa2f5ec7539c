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

#ifndef CTCASR_BINARY_IO_H_
#define CTCASR_BINARY_IO_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace ctcasr::binio {

// Little-endian primitives shared by the FEAT, CTCP and NETP formats.
// Readers throw FormatError on a short read.

void WriteMagic(std::ostream& out, std::string_view magic);
void ExpectMagic(std::istream& in, std::string_view magic, std::string_view what);

void WriteU32(std::ostream& out, std::uint32_t v);
void WriteI32(std::ostream& out, std::int32_t v);
void WriteF32(std::ostream& out, float v);
void WriteF64(std::ostream& out, double v);
void WriteString(std::ostream& out, std::string_view s);  // u32 length + bytes

std::uint32_t ReadU32(std::istream& in);
std::int32_t ReadI32(std::istream& in);
float ReadF32(std::istream& in);
double ReadF64(std::istream& in);
std::string ReadString(std::istream& in);

}  // namespace ctcasr::binio

#endif  // CTCASR_BINARY_IO_H_

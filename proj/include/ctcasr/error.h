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

#ifndef CTCASR_ERROR_H_
#define CTCASR_ERROR_H_

#include <stdexcept>
#include <string>

namespace ctcasr {

// Base class for all errors raised by the library. Callers that only need
// to distinguish "bad input data" from programming errors catch this.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file contents (ARPA, WAV, binary tensors, manifests).
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(what) {}
};

// Shapes or sizes that do not agree with each other.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

}  // namespace ctcasr

#endif  // CTCASR_ERROR_H_

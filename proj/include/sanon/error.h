// Copyright (c) 2026 The sanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SANON_ERROR_H_
#define SANON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sanon {

enum class ErrorKind {
  kFormat,
  kUnsupported,
  kIo,
  kPrecondition,
  kValidation,
  kSchema,
  kDegenerateFrame,
  kNumerical,
  kStability,
  kConfiguration,
  kSamplingExhausted,
  kUndefinedBaseline,
  kUndefinedCorrelation,
};

std::string_view ErrorKindName(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void Require(bool condition, const std::string& message) {
  if (!condition) Fail(ErrorKind::kPrecondition, message);
}

}  // namespace sanon

#endif  // SANON_ERROR_H_

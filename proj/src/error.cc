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

#include "sanon/error.h"

namespace sanon {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kDegenerateFrame: return "degenerate_frame";
    case ErrorKind::kNumerical: return "numerical";
    case ErrorKind::kStability: return "stability";
    case ErrorKind::kConfiguration: return "configuration";
    case ErrorKind::kSamplingExhausted: return "sampling_exhausted";
    case ErrorKind::kUndefinedBaseline: return "undefined_baseline";
    case ErrorKind::kUndefinedCorrelation: return "undefined_correlation";
  }
  return "unknown";
}

}  // namespace sanon

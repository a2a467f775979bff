// Copyright 2026 The canonacct Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "canonacct/error.hpp"

namespace canonacct {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeResource: return "NegativeResource";
    case ErrorKind::OverAllocated: return "OverAllocated";
    case ErrorKind::UnknownPartition: return "UnknownPartition";
    case ErrorKind::UnsortedInput: return "UnsortedInput";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::MixedPartitions: return "MixedPartitions";
    case ErrorKind::UnknownScenario: return "UnknownScenario";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorKind kind, const std::string& message,
                     const std::optional<std::size_t>& line,
                     const std::string& path) {
  std::string out = to_string(kind);
  if (line) out += " at line " + std::to_string(*line);
  if (!path.empty()) out += " (" + path + ")";
  out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> line, std::string path)
    : std::runtime_error(decorate(kind, message, line, path)),
      kind_(kind),
      line_(line),
      path_(std::move(path)) {}

int Error::exit_code() const {
  switch (kind_) {
    case ErrorKind::ParseError:
    case ErrorKind::SchemaError:
    case ErrorKind::IoError:
      return 2;
    default:
      return 1;
  }
}

}  // namespace canonacct

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

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace canonacct {

enum class ErrorKind {
  NegativeResource,
  OverAllocated,
  UnknownPartition,
  UnsortedInput,
  EmptyInput,
  MixedPartitions,
  UnknownScenario,
  ParseError,
  SchemaError,
  ValidationError,
  IoError,
};

const char* to_string(ErrorKind kind);

// Single exception type for every domain and input failure. `line` is the
// 1-based input line (JSONL) when known; `path` is a JSON-pointer-like field
// path such as "jobs[1].request.cpu_cores".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> line = std::nullopt, std::string path = {});

  ErrorKind kind() const { return kind_; }
  const std::optional<std::size_t>& line() const { return line_; }
  const std::string& path() const { return path_; }

  // Validation/domain failures map to 1, parse and I/O failures to 2.
  int exit_code() const;

 private:
  ErrorKind kind_;
  std::optional<std::size_t> line_;
  std::string path_;
};

}  // namespace canonacct

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

#include <chrono>
#include <string>
#include <string_view>

#include "canonacct/rational.hpp"

namespace canonacct {

using Instant = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

// ISO-8601 "YYYY-MM-DDThh:mm:ss" followed by "Z" or "+hh:mm"/"-hh:mm".
// The zone designator is mandatory. Throws Error(ParseError).
Instant parse_timestamp(std::string_view text);

// Always UTC with a "Z" suffix.
std::string format_timestamp(Instant t);

// Duration expressed as an exact number of hours.
Rational to_hours(Seconds d);

}  // namespace canonacct

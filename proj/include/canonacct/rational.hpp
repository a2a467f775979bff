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

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace canonacct {

// Arbitrary-precision exact fraction, always held in lowest terms with a
// positive denominator.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// "num/den" with den >= 1, e.g. "10/7", "5/1", "0/1".
std::string to_exact_string(const Rational& value);

// Inverse of to_exact_string. Also accepts a bare integer ("5"). Throws
// Error(ParseError) on anything else, including a zero denominator.
Rational parse_exact(std::string_view text);

// Decimal rendering with `digits` significant digits, rounding half to even.
// Trailing zeros are kept so the precision is visible: 10/7 -> "1.429",
// 2 -> "2.000", 81920/7 -> "11700", 0 -> "0".
std::string to_decimal_string(const Rational& value, int digits = 4);

}  // namespace canonacct

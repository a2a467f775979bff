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

#include "canonacct/rational.hpp"

#include <cctype>

#include "canonacct/error.hpp"

namespace canonacct {

std::string to_exact_string(const Rational& value) {
  return boost::multiprecision::numerator(value).str() + "/" +
         boost::multiprecision::denominator(value).str();
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

BigInt parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  if (!all_digits(s))
    throw Error(ErrorKind::ParseError,
                "malformed exact rational '" + std::string(whole) + "'");
  BigInt v{std::string(s)};
  return negative ? BigInt(-v) : v;
}

BigInt pow10(int n) {
  BigInt p = 1;
  for (int i = 0; i < n; ++i) p *= 10;
  return p;
}

// Number of decimal digits in a positive integer.
int digit_count(const BigInt& v) { return static_cast<int>(v.str().size()); }

// Round num/den (both positive) to the nearest integer, ties to even.
BigInt round_half_even(const BigInt& num, const BigInt& den) {
  BigInt q = num / den;
  BigInt r = num % den;
  BigInt twice = 2 * r;
  if (twice > den || (twice == den && (q & 1) != 0)) ++q;
  return q;
}

}  // namespace

Rational parse_exact(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text, text));
  BigInt num = parse_integer(text.substr(0, slash), text);
  BigInt den = parse_integer(text.substr(slash + 1), text);
  if (den <= 0)
    throw Error(ErrorKind::ParseError,
                "non-positive denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string to_decimal_string(const Rational& value, int digits) {
  if (value == 0) return "0";
  std::string sign = value < 0 ? "-" : "";
  BigInt num = boost::multiprecision::abs(boost::multiprecision::numerator(value));
  BigInt den = boost::multiprecision::denominator(value);

  // exponent = floor(log10(num/den)), found from digit counts then corrected.
  int exponent = digit_count(num) - digit_count(den);
  auto below = [&](int e) {
    // num/den < 10^e ?
    return e >= 0 ? num < den * pow10(e) : num * pow10(-e) < den;
  };
  if (below(exponent)) --exponent;

  // mantissa = round(value * 10^(digits-1-exponent)), digits long.
  int shift = digits - 1 - exponent;
  BigInt scaled_num = shift >= 0 ? num * pow10(shift) : num;
  BigInt scaled_den = shift >= 0 ? den : den * pow10(-shift);
  BigInt mantissa = round_half_even(scaled_num, scaled_den);
  if (mantissa == pow10(digits)) {
    mantissa = pow10(digits - 1);
    ++exponent;
    --shift;
  }

  std::string m = mantissa.str();
  if (shift <= 0) return sign + m + std::string(static_cast<std::size_t>(-shift), '0');
  if (static_cast<std::size_t>(shift) >= m.size())
    return sign + "0." + std::string(static_cast<std::size_t>(shift) - m.size(), '0') + m;
  return sign + m.substr(0, m.size() - shift) + "." + m.substr(m.size() - shift);
}

}  // namespace canonacct

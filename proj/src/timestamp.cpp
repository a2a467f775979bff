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

#include "canonacct/timestamp.hpp"

#include <cstdio>

#include "canonacct/error.hpp"

namespace canonacct {

namespace {

bool read_fixed(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

[[noreturn]] void bad(std::string_view text, const char* why) {
  throw Error(ErrorKind::ParseError,
              "invalid timestamp '" + std::string(text) + "': " + why);
}

}  // namespace

Instant parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  int y, mo, d, h, mi, s;
  if (!read_fixed(text, 0, 4, y) || text.size() < 19 || text[4] != '-' ||
      !read_fixed(text, 5, 2, mo) || text[7] != '-' || !read_fixed(text, 8, 2, d) ||
      (text[10] != 'T' && text[10] != 't') || !read_fixed(text, 11, 2, h) ||
      text[13] != ':' || !read_fixed(text, 14, 2, mi) || text[16] != ':' ||
      !read_fixed(text, 17, 2, s))
    bad(text, "expected YYYY-MM-DDThh:mm:ss");

  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) bad(text, "no such calendar date");
  if (h > 23 || mi > 59 || s > 59) bad(text, "time of day out of range");

  std::string_view zone = text.substr(19);
  int offset_minutes = 0;
  if (zone == "Z" || zone == "z") {
    offset_minutes = 0;
  } else if (zone.size() == 6 && (zone[0] == '+' || zone[0] == '-') && zone[3] == ':') {
    int oh, om;
    if (!read_fixed(zone, 1, 2, oh) || !read_fixed(zone, 4, 2, om) || oh > 23 || om > 59)
      bad(text, "malformed zone offset");
    offset_minutes = (zone[0] == '-' ? -1 : 1) * (oh * 60 + om);
  } else if (zone.empty()) {
    bad(text, "missing zone designator");
  } else if (zone.front() == '.') {
    bad(text, "fractional seconds are not supported");
  } else {
    bad(text, "malformed zone designator");
  }

  Instant local = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
  return local - minutes{offset_minutes};
}

std::string format_timestamp(Instant t) {
  using namespace std::chrono;
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss<seconds> tod{t - day_point};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<long>(tod.hours().count()),
                static_cast<long>(tod.minutes().count()),
                static_cast<long long>(tod.seconds().count()));
  return buf;
}

Rational to_hours(Seconds d) { return Rational(d.count(), 3600); }

}  // namespace canonacct

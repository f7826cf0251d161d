#include "smilerisk/date.hpp"

#include <charconv>
#include <cstdio>

#include "smilerisk/error.hpp"

namespace smilerisk {

using namespace std::chrono;

Date::Date(int y, unsigned m, unsigned d) {
  year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) {
    throw Error(Errc::InvalidArgument, "invalid calendar date");
  }
  days_ = sys_days{ymd};
}

namespace {

bool parse_field(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Date Date::parse(std::string_view iso) {
  int y = 0, m = 0, d = 0;
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' ||
      !parse_field(iso.substr(0, 4), y) || !parse_field(iso.substr(5, 2), m) ||
      !parse_field(iso.substr(8, 2), d)) {
    throw Error(Errc::InvalidArgument,
                "malformed ISO-8601 date '" + std::string(iso) + "'");
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    throw Error(Errc::InvalidArgument,
                "impossible date '" + std::string(iso) + "'");
  }
  return Date(sys_days{ymd});
}

std::string Date::iso() const {
  year_month_day ymd{days_};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

}  // namespace smilerisk

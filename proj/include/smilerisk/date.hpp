#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace smilerisk {

/// Calendar date (no time zone). Parsed from and printed as ISO-8601
/// `YYYY-MM-DD`.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::sys_days days) : days_(days) {}
  Date(int year, unsigned month, unsigned day);

  /// Throws Error(InvalidArgument) on malformed or impossible dates.
  static Date parse(std::string_view iso);

  std::string iso() const;
  std::chrono::sys_days days() const { return days_; }
  Date plus_days(int n) const { return Date(days_ + std::chrono::days(n)); }

  auto operator<=>(const Date&) const = default;

 private:
  std::chrono::sys_days days_{};
};

}  // namespace smilerisk
